#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "macorner/asymptotics/hessian.hpp"
#include "macorner/model/quadratic.hpp"
#include "macorner/numerics/loglog_fit.hpp"

namespace macorner {

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// [8h, R/40] and [R/3, 2R/3].
Window default_near_window(const Grid2D& g);
Window default_far_window(const Grid2D& g);

/// Radii ladder used inside a window (geometric, n points).
std::vector<double> window_radii(const Window& w, int n);

struct U12Limits {
  double near = 0.0;
  double far = 0.0;
  std::vector<ProfilePoint> near_profile;
  std::vector<ProfilePoint> far_profile;
};

nlohmann::json to_json(const U12Limits& r);

/// Median over the window arcs of the arc-averaged u12.
U12Limits u12_limits(const HessianField& H, const Window& near, const Window& far, int arcs_per_window = 12);

struct DeviationExponent {
  bool degenerate = false;
  std::optional<FitResult> fit;
  std::vector<ProfilePoint> profile;
};

nlohmann::json to_json(const DeviationExponent& r);

/// Log-log slope of sup over the arc of |u - reference| across the window.
DeviationExponent deviation_exponent(const ScalarField& u, const QuadraticPolynomial& reference, const Window& w,
                                     int n_radii = 16);

struct HarnackCoefficient {
  double a = 0.0;
  std::vector<ProfilePoint> per_radius;
  Window window;
  /// max a(r) - min a(r)
  double spread = 0.0;
  double relative_spread = 0.0;
};

nlohmann::json to_json(const HarnackCoefficient& r);

/// a(r) = int_0^alpha w(r, theta) sin(beta theta) dtheta / (r^beta alpha / 2)
/// with w = u o A_c^- - q on the sector of opening alpha = alpha_c^-;
/// composite Simpson with theta_samples points (odd, >= 129).
HarnackCoefficient harnack_coefficient(const ScalarField& u, const AngleConstants& k, const Window& w,
                                       int n_radii = 12, int theta_samples = 129);

enum class ConicalVerdict { Conical, Regular, Indeterminate };
std::string to_string(ConicalVerdict v);

struct ConicalIndicator {
  ConicalVerdict verdict = ConicalVerdict::Indeterminate;
  /// (r, arc-averaged minimum eigenvalue) in ladder order
  std::vector<ProfilePoint> trend;
  std::optional<FitResult> fit;
  bool monotone = false;
};

nlohmann::json to_json(const ConicalIndicator& r);

struct ConicalThresholds {
  double regular_fraction = 0.2;  // regular iff min eigenvalue >= this * sqrt(c)
  double slope = 0.2;            // conical needs log-log slope >= this
};

/// ladder: decreasing radii >= 8h, at least 4 of them. f0 is the constant
/// right-hand side, which sets the regular scale sqrt(f0).
ConicalIndicator conical_indicator(const HessianField& H, double f0, const std::vector<double>& ladder,
                                   const ConicalThresholds& thresholds = {});
inline ConicalIndicator conical_indicator(const HessianField& H, const AngleConstants& k,
                                          const std::vector<double>& ladder, const ConicalThresholds& thresholds = {}) {
  return conical_indicator(H, k.c, ladder, thresholds);
}

struct OrderingResult {
  bool ordered = false;
  double max_excess = 0.0;
  explicit operator bool() const { return ordered; }
};

/// u1 <= u2 + tol at every node.
OrderingResult ordering_check(const ScalarField& u1, const ScalarField& u2, double tol = 1e-6);

struct HessianLimit {
  double max_deviation = 0.0;
  std::vector<ProfilePoint> per_radius;
};

nlohmann::json to_json(const HessianLimit& r);

/// Max over the window arcs of the entrywise deviation |D^2 u - D^2 P_c^-|.
HessianLimit hessian_limit_at_infinity(const HessianField& H, const AngleConstants& k, const Window& far,
                                       int n_radii = 8);

}  // namespace macorner
