#ifndef QST_GOLDEN_SECTION_HPP
#define QST_GOLDEN_SECTION_HPP

#include <cmath>
#include <utility>

namespace qst {

/// Golden-section minimization of a unimodal scalar function on [a, b].
/// Deterministic; terminates when the bracket is narrower than x_tol.
/// Returns (x_min, f(x_min)) at the best evaluated point.
template <typename F>
std::pair<double, double> golden_section_minimize(F&& f, double a, double b,
                                                  double x_tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

/// Golden-section maximization; returns (x_max, f(x_max)).
template <typename F>
std::pair<double, double> golden_section_maximize(F&& f, double a, double b,
                                                  double x_tol) {
  auto neg = [&f](double x) { return -f(x); };
  auto [x, fneg] = golden_section_minimize(neg, a, b, x_tol);
  return {x, -fneg};
}

}  // namespace qst

#endif
