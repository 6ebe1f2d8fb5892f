#include "macorner/numerics/root_finding.hpp"

#include <cmath>
#include <string>

#include "macorner/errors.hpp"

namespace macorner {

RootResult bisect(const std::function<double(double)>& fn, double lo, double hi, double tol_x, double tol_f,
                  const BisectOptions& options) {
  if (!(lo < hi)) throw DomainError("bisect needs lo < hi");
  if (!(tol_x > 0.0) || tol_f < 0.0) throw DomainError("bisect needs tol_x > 0 and tol_f >= 0");

  RootResult out;
  auto eval = [&](double t) {
    const double y = fn(t);
    if (!std::isfinite(y)) throw SolverError("bisect: non-finite function value", y);
    out.history.emplace_back(t, y);
    return y;
  };

  double ya = options.f_lo ? *options.f_lo : eval(lo);
  double yb = options.f_hi ? *options.f_hi : eval(hi);
  if (options.f_lo) out.history.emplace(out.history.begin(), lo, ya);
  if (options.f_hi) out.history.emplace_back(hi, yb);

  if (std::abs(ya) <= tol_f) {
    out.root = lo;
    out.f_root = ya;
    return out;
  }
  if (std::abs(yb) <= tol_f) {
    out.root = hi;
    out.f_root = yb;
    return out;
  }
  if ((ya > 0.0) == (yb > 0.0)) {
    throw BracketError("bisect: fn(" + std::to_string(lo) + ") and fn(" + std::to_string(hi) +
                       ") have the same sign");
  }

  // Work with an increasing orientation: g(a) < 0 < g(b).
  const double sign = ya < 0.0 ? 1.0 : -1.0;
  double a = lo, b = hi;
  double ga = sign * ya, gb = sign * yb;

  const double eps = 0.5 * tol_x;
  const int n_half = std::max(0, static_cast<int>(std::ceil(std::log2((b - a) / (2.0 * eps)))));
  const int n_max = n_half + 1;
  const double kappa1 = 0.2 / (b - a);
  const double kappa2 = 2.0;

  int j = 0;
  double last_y = std::abs(ya) < std::abs(yb) ? ya : yb;
  while (b - a > 2.0 * eps) {
    const double mid = 0.5 * (a + b);
    double x = mid;
    if (options.method == BracketMethod::Itp) {
      const double radius = eps * std::ldexp(1.0, n_max - j) - 0.5 * (b - a);
      const double delta = kappa1 * std::pow(b - a, kappa2);
      const double xf = (b * ga - a * gb) / (ga - gb);
      const double sigma = mid - xf >= 0.0 ? 1.0 : -1.0;
      const double xt = delta <= std::abs(mid - xf) ? xf + sigma * delta : mid;
      x = std::abs(xt - mid) <= radius ? xt : mid - sigma * radius;
    }
    const double y = eval(x);
    ++j;
    out.iterations = j;
    last_y = y;
    if (std::abs(y) <= tol_f) {
      out.root = x;
      out.f_root = y;
      return out;
    }
    const double g = sign * y;
    if (g > 0.0) {
      b = x;
      gb = g;
    } else if (g < 0.0) {
      a = x;
      ga = g;
    } else {
      a = b = x;
    }
  }
  out.root = 0.5 * (a + b);
  out.f_root = last_y;
  return out;
}

}  // namespace macorner
