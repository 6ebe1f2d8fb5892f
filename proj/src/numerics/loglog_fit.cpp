#include "macorner/numerics/loglog_fit.hpp"

#include <cmath>

#include "macorner/errors.hpp"

namespace macorner {

FitResult fit_loglog_slope(const std::vector<ProfilePoint>& points, double r_min, double r_max) {
  if (!(r_min < r_max)) throw DomainError("fit window needs r_min < r_max");
  const double lo = r_min * (1.0 - 1e-12), hi = r_max * (1.0 + 1e-12);
  FitResult fit;
  fit.r_min = r_min;
  fit.r_max = r_max;
  std::vector<double> xs, ys;
  for (const auto& [r, y] : points) {
    if (!(r > 0.0) || r < lo || r > hi) continue;
    if (!(y > 0.0) || !std::isfinite(y)) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(std::log(r));
    ys.push_back(std::log(y));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 3) {
    throw InsufficientDataError("log-log fit needs 3 usable points in [" + std::to_string(r_min) + ", " +
                                std::to_string(r_max) + "], have " + std::to_string(n) + " (" +
                                std::to_string(fit.excluded) + " excluded)");
  }
  double mx = 0.0, my = 0.0;
  for (int k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("log-log fit needs distinct radii");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / n);
  fit.point_count = n;
  return fit;
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"slope", fit.slope},     {"intercept", fit.intercept}, {"rmin", fit.r_min},
          {"rmax", fit.r_max},      {"residual", fit.residual},   {"n", fit.point_count},
          {"excluded", fit.excluded}};
}

}  // namespace macorner
