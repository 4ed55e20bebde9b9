#include <iostream>
#include <string>
#include <vector>

#include "lmlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lmlab::cli::run(args, std::cout, std::cerr);
}
