#include "macorner/asymptotics/analyses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macorner/errors.hpp"
#include "macorner/model/affine.hpp"
#include "macorner/numerics/radial_profile.hpp"

namespace macorner {

namespace {

nlohmann::json profile_json(const std::vector<ProfilePoint>& p) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [r, v] : p) a.push_back({r, v});
  return a;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_window(const Window& w) {
  if (!(w.lo > 0.0 && w.hi > w.lo)) throw DomainError("window needs 0 < lo < hi");
}

}  // namespace

Window default_near_window(const Grid2D& g) { return {8.0 * g.h(), g.R() / 40.0}; }
Window default_far_window(const Grid2D& g) { return {g.R() / 3.0, 2.0 * g.R() / 3.0}; }

std::vector<double> window_radii(const Window& w, int n) {
  check_window(w);
  return geometric_radii(w.lo, w.hi, n);
}

U12Limits u12_limits(const HessianField& H, const Window& near, const Window& far, int arcs_per_window) {
  if (arcs_per_window < 3) throw InsufficientDataError("u12 limits need at least 3 arcs per window");
  if (near.lo < 8.0 * H.grid().h() * (1.0 - 1e-12)) throw ExtentError("near window starts below 8h");
  U12Limits out;
  auto run = [&](const Window& w, std::vector<ProfilePoint>& prof) {
    std::vector<double> vals;
    for (double r : window_radii(w, arcs_per_window)) {
      const auto arc = hessian_on_arc(H, r);
      double acc = 0.0;
      for (const auto& m : arc) acc += m(0, 1);
      prof.emplace_back(r, acc / arc.size());
      vals.push_back(acc / arc.size());
    }
    return median(vals);
  };
  out.near = run(near, out.near_profile);
  out.far = run(far, out.far_profile);
  return out;
}

nlohmann::json to_json(const U12Limits& r) {
  return {{"near", r.near}, {"far", r.far}, {"near_profile", profile_json(r.near_profile)},
          {"far_profile", profile_json(r.far_profile)}};
}

DeviationExponent deviation_exponent(const ScalarField& u, const QuadraticPolynomial& reference, const Window& w,
                                     int n_radii) {
  check_window(w);
  DeviationExponent out;
  out.profile = radial_profile(u, reference, window_radii(w, n_radii), ArcStatistic::SupAbs);
  const double scale = std::max(1.0, w.hi * w.hi);
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * scale;
  bool all_small = true;
  for (const auto& [r, v] : out.profile) all_small = all_small && v <= floor;
  if (all_small) {
    out.degenerate = true;
    return out;
  }
  out.fit = fit_loglog_slope(out.profile, w.lo, w.hi);
  return out;
}

nlohmann::json to_json(const DeviationExponent& r) {
  nlohmann::json j = {{"degenerate", r.degenerate}, {"profile", profile_json(r.profile)}};
  j["fit"] = r.fit ? to_json(*r.fit) : nlohmann::json(nullptr);
  if (r.fit) j["slope"] = r.fit->slope;
  return j;
}

HarnackCoefficient harnack_coefficient(const ScalarField& u, const AngleConstants& k, const Window& w, int n_radii,
                                       int theta_samples) {
  check_window(w);
  if (theta_samples < 129 || theta_samples % 2 == 0) throw DomainError("Simpson rule needs an odd count >= 129");
  if (!(k.c < 1.0)) throw DomainError("Harnack coefficient needs c < 1");
  const AffineMap A = make_affine(k, Sign::Minus);
  const QuadraticPolynomial pminus = make_pc(k, Sign::Minus);
  // u o A - q = (u - P^-) o A
  const ScalarField diff = u.minus(pminus);
  const double alpha = k.alpha_minus, beta = k.beta_minus;
  const int N = theta_samples;
  const double dth = alpha / (N - 1);

  HarnackCoefficient out;
  out.window = w;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double r : window_radii(w, n_radii)) {
    double integral = 0.0;
    for (int j = 0; j < N; ++j) {
      const double th = j == N - 1 ? alpha : j * dth;
      Vec2 y = A(Vec2(r * std::cos(th), r * std::sin(th)));
      y[0] = std::max(y[0], 0.0);
      y[1] = std::max(y[1], 0.0);
      const double wv = diff.interpolate(y);
      const double weight = (j == 0 || j == N - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      integral += weight * wv * std::sin(beta * th);
    }
    integral *= dth / 3.0;
    const double a = integral / (std::pow(r, beta) * alpha / 2.0);
    out.per_radius.emplace_back(r, a);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    sum += a;
  }
  out.a = sum / out.per_radius.size();
  out.spread = hi - lo;
  out.relative_spread = out.a != 0.0 ? out.spread / std::abs(out.a) : std::numeric_limits<double>::infinity();
  return out;
}

nlohmann::json to_json(const HarnackCoefficient& r) {
  nlohmann::json j = {{"a", r.a},
                      {"per_radius", profile_json(r.per_radius)},
                      {"window", {r.window.lo, r.window.hi}},
                      {"spread", r.spread}};
  j["relative_spread"] = std::isfinite(r.relative_spread) ? nlohmann::json(r.relative_spread) : nlohmann::json(nullptr);
  return j;
}

std::string to_string(ConicalVerdict v) {
  switch (v) {
    case ConicalVerdict::Conical: return "conical";
    case ConicalVerdict::Regular: return "regular";
    default: return "indeterminate";
  }
}

ConicalIndicator conical_indicator(const HessianField& H, double f0, const std::vector<double>& ladder,
                                   const ConicalThresholds& thresholds) {
  if (ladder.size() < 4) throw InsufficientDataError("conical indicator needs at least 4 radii");
  const double h = H.grid().h();
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    if (ladder[j] < 8.0 * h * (1.0 - 1e-12)) throw ExtentError("ladder radius below 8h");
    if (j > 0 && !(ladder[j] < ladder[j - 1])) throw DomainError("ladder radii must decrease");
  }
  ConicalIndicator out;
  double lmin = std::numeric_limits<double>::infinity();
  for (double r : ladder) {
    const auto arc = hessian_on_arc(H, r);
    double acc = 0.0;
    for (const auto& m : arc) acc += min_eigenvalue(m);
    const double v = acc / arc.size();
    out.trend.emplace_back(r, v);
    lmin = std::min(lmin, v);
  }
  out.monotone = true;
  for (std::size_t j = 1; j < out.trend.size(); ++j) {
    if (!(out.trend[j].second < out.trend[j - 1].second)) out.monotone = false;
  }
  try {
    out.fit = fit_loglog_slope(out.trend, ladder.back(), ladder.front());
  } catch (const InsufficientDataError&) {
    out.fit.reset();
  }
  if (out.monotone && out.fit && out.fit->slope >= thresholds.slope) {
    out.verdict = ConicalVerdict::Conical;
  } else if (lmin >= thresholds.regular_fraction * std::sqrt(f0)) {
    out.verdict = ConicalVerdict::Regular;
  } else {
    out.verdict = ConicalVerdict::Indeterminate;
  }
  return out;
}

nlohmann::json to_json(const ConicalIndicator& r) {
  nlohmann::json j = {{"verdict", to_string(r.verdict)}, {"trend", profile_json(r.trend)}, {"monotone", r.monotone}};
  j["fit"] = r.fit ? to_json(*r.fit) : nlohmann::json(nullptr);
  return j;
}

OrderingResult ordering_check(const ScalarField& u1, const ScalarField& u2, double tol) {
  if (!(u1.grid() == u2.grid())) throw GridError("ordering check needs identical grids");
  OrderingResult out;
  out.max_excess = -std::numeric_limits<double>::infinity();
  const Grid2D& g = u1.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::Exterior) continue;
    out.max_excess = std::max(out.max_excess, u1[k] - u2[k]);
  }
  out.ordered = out.max_excess <= tol;
  return out;
}

HessianLimit hessian_limit_at_infinity(const HessianField& H, const AngleConstants& k, const Window& far,
                                       int n_radii) {
  HessianLimit out;
  for (double r : window_radii(far, n_radii)) {
    double worst = 0.0;
    for (const auto& m : hessian_on_arc(H, r)) {
      worst = std::max({worst, std::abs(m(0, 0) - 1.0), std::abs(m(1, 1) - 1.0), std::abs(m(0, 1) + k.s)});
    }
    out.per_radius.emplace_back(r, worst);
    out.max_deviation = std::max(out.max_deviation, worst);
  }
  return out;
}

nlohmann::json to_json(const HessianLimit& r) {
  return {{"max_deviation", r.max_deviation}, {"per_radius", profile_json(r.per_radius)}};
}

}  // namespace macorner
