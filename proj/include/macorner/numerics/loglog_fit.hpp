#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

namespace macorner {

/// Least-squares line through (log r, log y).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  /// Root-mean-square deviation of log y from the fitted line.
  double residual = 0.0;
  int point_count = 0;
  /// Points inside the window dropped for y <= 0.
  int excluded = 0;
};

using ProfilePoint = std::pair<double, double>;

/// Fits the points with r in [r_min, r_max]. Throws InsufficientDataError
/// with fewer than three usable points.
FitResult fit_loglog_slope(const std::vector<ProfilePoint>& points, double r_min, double r_max);

nlohmann::json to_json(const FitResult& fit);

}  // namespace macorner
