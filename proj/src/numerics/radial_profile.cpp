#include "macorner/numerics/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "macorner/errors.hpp"

namespace macorner {

int arc_sample_count(double r, double h) {
  return std::max(64, static_cast<int>(std::ceil(std::numbers::pi * r / (2.0 * h))));
}

std::vector<double> geometric_radii(double r_min, double r_max, int n) {
  if (!(r_min > 0.0) || !(r_max > r_min) || n < 2) throw DomainError("geometric_radii needs 0 < r_min < r_max, n >= 2");
  std::vector<double> out(n);
  const double q = std::log(r_max / r_min) / (n - 1);
  for (int k = 0; k < n; ++k) out[k] = r_min * std::exp(q * k);
  out.back() = r_max;
  return out;
}

std::vector<ProfilePoint> radial_profile(const ScalarField& field, const QuadraticPolynomial& reference,
                                         const std::vector<double>& radii, ArcStatistic statistic) {
  std::vector<ProfilePoint> out;
  if (radii.empty()) return out;
  const double h = field.grid().h();
  const ScalarField diff = field.minus(reference);
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r >= 4.0 * h * (1.0 - 1e-12))) {
      throw ExtentError("radius " + std::to_string(r) + " is below 4h");
    }
    const int m = arc_sample_count(r, h);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const double th = 0.5 * std::numbers::pi * k / (m - 1);
      const double v = std::abs(diff.interpolate(Vec2(r * std::cos(th), r * std::sin(th))));
      acc = statistic == ArcStatistic::SupAbs ? std::max(acc, v) : acc + v;
    }
    out.emplace_back(r, statistic == ArcStatistic::SupAbs ? acc : acc / m);
  }
  return out;
}

}  // namespace macorner
