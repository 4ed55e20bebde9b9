#pragma once

#include <cmath>
#include <utility>

namespace lmlab {

struct ScalarMax {
  double arg;
  double value;
};

// Golden-section maximization of a unimodal f on [lo, hi]. Stops once the
// bracket is narrower than `width_tol` or after `max_iter` shrinks.
template <typename F>
ScalarMax golden_section_maximize(F&& f, double lo, double hi, double width_tol, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > width_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

}  // namespace lmlab
