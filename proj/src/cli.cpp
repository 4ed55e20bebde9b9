#include "lmlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>

#include "lmlab/errors.hpp"
#include "lmlab/json_io.hpp"

namespace lmlab::cli {

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string format = "json";
  std::string mode = "proportional";
  std::string table;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  double grid_step = 1e-3;
  unsigned threads = 0;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::ios_base::failure("write to '" + path + "' failed");
}

PoolConfig pool_or_default(const json& doc) {
  return doc.contains("pool") ? doc.at("pool").get<PoolConfig>() : PoolConfig{};
}

int cmd_validate(const Options& o, std::ostream& out) {
  const json doc = read_json_file(o.input);
  std::vector<ScheduleViolation> problems;
  if (doc.contains("schedule")) {
    const PoolConfig pool = pool_or_default(doc);
    pool.validate();
    problems = validate_schedule(doc.at("schedule").get<RewardSchedule>(), pool);
  } else {
    problems = validate_schedule(doc.get<RewardSchedule>());
  }
  if (problems.empty()) {
    out << "OK\n";
    return kExitOk;
  }
  for (const auto& v : problems) out << "violation: " << v.message << '\n';
  return kExitDomain;
}

int cmd_strategy(const Options& o, std::ostream& out) {
  const json doc = read_json_file(o.input);
  const PoolConfig pool = pool_or_default(doc);
  const Price price(doc.at("price").get<double>());
  const auto schedule = doc.at("schedule").get<RewardSchedule>();
  const auto wallet = doc.at("wallet").get<ProviderWallet>();
  const auto others = doc.contains("opponents") ? doc.at("opponents").get<OpponentAggregate>() : OpponentAggregate{};
  BestResponseOptions br;
  if (o.tol) br.tol = *o.tol;

  Allocation alloc;
  json result = {{"mode", o.mode}};
  if (o.mode == "proportional") {
    alloc = proportional_allocation(wallet, schedule, price, pool);
  } else if (o.mode == "best-response") {
    alloc = best_response(wallet, others, schedule, price, pool, br);
  } else if (o.mode == "oracle") {
    alloc = brute_force_best_response(wallet, others, schedule, price, pool, o.grid_step);
    const Allocation exact = best_response(wallet, others, schedule, price, pool, br);
    result["best_response_reward"] = expected_reward(exact, others, schedule, price, pool);
    result["grid_step"] = o.grid_step;
  } else {
    throw FormatError("unknown strategy mode '" + o.mode + "'");
  }
  result["per_bin"] = json(alloc).at("per_bin");
  result["expected_reward"] = expected_reward(alloc, others, schedule, price, pool);
  write_text(o.output, result.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_design(const Options& o, std::ostream& out) {
  const json doc = read_json_file(o.input);
  const PoolConfig pool = pool_or_default(doc);
  pool.validate();
  const auto spec = (doc.contains("design") ? doc.at("design") : doc).get<DesignSpec>();
  const RewardSchedule schedule = realize(spec, pool);
  if (o.format == "csv") {
    write_text(o.output, schedule_table_csv(schedule, pool), out);
  } else {
    write_text(o.output, json(schedule).dump(2) + "\n", out);
  }
  if (!o.table.empty()) write_text(o.table, schedule_table_csv(schedule, pool), out);
  return kExitOk;
}

SimScenario load_scenario(const json& doc, const Options& o) {
  auto s = doc.get<SimScenario>();
  if (o.seed) s.seed = *o.seed;
  if (o.tol) s.tol = *o.tol;
  return s;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const json doc = read_json_file(o.input);
  if (doc.contains("scenarios")) {
    std::vector<SimScenario> batch;
    for (const auto& d : doc.at("scenarios")) batch.push_back(load_scenario(d, o));
    const auto reports = run_batch(batch, o.threads);
    if (o.output.empty()) {
      if (o.format == "csv") {
        for (std::size_t k = 0; k < reports.size(); ++k) out << "# scenario " << k << '\n' << report_csv(reports[k]);
      } else {
        out << json(reports).dump(2) << '\n';
      }
      return kExitOk;
    }
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const std::string prefix = o.output + "_" + std::to_string(k);
      write_text(prefix + ".json", json(reports[k]).dump(2) + "\n", out);
      write_text(prefix + ".csv", report_csv(reports[k]), out);
    }
    return kExitOk;
  }

  const SimReport report = run_scenario(load_scenario(doc, o));
  if (o.output.empty()) {
    out << (o.format == "csv" ? report_csv(report) : json(report).dump(2) + "\n");
  } else {
    write_text(o.output + ".json", json(report).dump(2) + "\n", out);
    write_text(o.output + ".csv", report_csv(report), out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Liquidity mining lab: reward schedules, LP strategies and pool simulations", "lmlab"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", o.input, "Input JSON file")->required();
    sub->add_option("-o,--output", o.output, "Output path (stdout if omitted)");
  };

  auto* validate = app.add_subcommand("validate", "Check a reward schedule");
  add_common(validate);

  auto* strategy = app.add_subcommand("strategy", "Compute a provider allocation");
  add_common(strategy);
  strategy->add_option("--mode", o.mode, "proportional | best-response | oracle")
      ->check(CLI::IsMember({"proportional", "best-response", "oracle"}));
  strategy->add_option("--tol", o.tol, "Best-response tolerance");
  strategy->add_option("--grid-step", o.grid_step, "Oracle lattice step");

  auto* design = app.add_subcommand("design", "Realize a DesignSpec into a schedule");
  add_common(design);
  design->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  design->add_option("--table", o.table, "Also write the per-bin CSV table here");

  auto* simulate = app.add_subcommand("simulate", "Run a scenario; --output is a prefix for .json and .csv");
  add_common(simulate);
  simulate->add_option("--format", o.format, "Stdout format when --output is omitted: json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--seed", o.seed, "Override the scenario seed");
  simulate->add_option("--tol", o.tol, "Override the scenario tolerance");
  simulate->add_option("--threads", o.threads, "Worker threads for scenario batches");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (strategy->parsed()) return cmd_strategy(o, out);
    if (design->parsed()) return cmd_design(o, out);
    return cmd_simulate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    err << "io error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace lmlab::cli
