#include "macorner/harmonic/sector_modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "macorner/errors.hpp"

namespace macorner {

namespace {

constexpr double kAngleTol = 1e-12;
constexpr int kThetaSamples = 2048;
constexpr int kMaxHalvings = 20;

void require_in_sector(const Vec2& x, double opening, const char* what) {
  double r = x.norm();
  if (r == 0.0) return;
  double theta = std::atan2(x[1], x[0]);
  if (theta < -kAngleTol || theta > opening + kAngleTol) {
    std::ostringstream os;
    os << what << ": point (" << x[0] << ", " << x[1] << ") is outside the sector of opening " << opening;
    throw DomainError(os.str());
  }
}

}  // namespace

double polar_angle(const Vec2& x) {
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0 && theta > -kAngleTol) theta = 0.0;
  return theta;
}

double v0(const AngleConstants& k, const Vec2& x) {
  require_in_sector(x, k.alpha_minus, "v0");
  double r = x.norm();
  if (r == 0.0) return 0.0;
  double theta = std::clamp(polar_angle(x), 0.0, k.alpha_minus);
  return std::pow(r, k.beta_minus) * std::sin(k.beta_minus * theta);
}

double SectorMode::value(const Vec2& x) const {
  require_in_sector(x, constants.alpha_minus, "sector mode");
  double r = x.norm();
  double theta = std::clamp(polar_angle(x), 0.0, constants.alpha_minus);
  if (r == 0.0) return degree > 0.0 ? 0.0 : amplitude * theta_profile(theta);
  return amplitude * std::pow(r, degree) * theta_profile(theta);
}

double SectorMode::laplacian(const Vec2& x) const {
  double r = x.norm();
  if (r == 0.0) throw DomainError("sector mode Laplacian is singular at the vertex");
  double theta = std::clamp(polar_angle(x), 0.0, constants.alpha_minus);
  return amplitude * std::pow(r, degree - 2.0) *
         (degree * degree * theta_profile(theta) + theta_profile_dd(theta));
}

nlohmann::json to_json(const SectorMode& m) {
  return {{"c", m.constants.c},         {"degree", m.degree}, {"amplitude", m.amplitude},
          {"delta", m.delta},           {"margin", m.margin}, {"profile_margin", m.profile_margin},
          {"halvings", m.halvings},     {"opening", m.constants.alpha_minus}};
}

SectorMode make_v1(const AngleConstants& k, double beta) {
  if (!(beta >= 0.0) || !(beta < k.beta_minus)) {
    std::ostringstream os;
    os << "make_v1 needs 0 <= beta < beta_minus = " << k.beta_minus << ", got " << beta;
    throw DomainError(os.str());
  }
  const double a = k.alpha_minus;
  const double bm = k.beta_minus;

  double delta = 0.5;
  for (int halving = 0; halving <= kMaxHalvings; ++halving, delta *= 0.5) {
    auto phi = [a, bm, delta](double t) { return std::sin(bm * t) + delta * t * (a - t); };
    auto phi_dd = [bm, delta](double t) { return -bm * bm * std::sin(bm * t) - 2.0 * delta; };
    double worst = -INFINITY;
    for (int i = 0; i <= kThetaSamples; ++i) {
      double t = a * i / kThetaSamples;
      worst = std::max(worst, beta * beta * phi(t) + phi_dd(t));
    }
    if (worst < 0.0) {
      SectorMode m;
      m.constants = k;
      m.degree = beta;
      m.delta = delta;
      m.halvings = halving;
      m.theta_profile = phi;
      m.theta_profile_dd = phi_dd;
      m.profile_margin = worst;
      m.amplitude = std::max(1.0, 2.0 / -worst);
      m.margin = m.amplitude * worst;
      return m;
    }
  }
  throw ConstructionError("make_v1: no admissible delta after 20 halvings");
}

Vec2 conformal_power(const AngleConstants& k, const Vec2& x, ConformalDirection dir, Sign sector) {
  const double beta = sector == Sign::Minus ? k.beta_minus : k.beta_plus;
  const double opening = sector == Sign::Minus ? k.alpha_minus : k.alpha_plus;
  double r = x.norm();
  if (dir == ConformalDirection::ToHalfPlane) {
    require_in_sector(x, opening, "conformal_power");
    if (r == 0.0) return Vec2::Zero();
    double theta = std::clamp(polar_angle(x), 0.0, opening);
    double rr = std::pow(r, beta);
    double tt = beta * theta;
    return Vec2(rr * std::cos(tt), rr * std::sin(tt));
  }
  require_in_sector(x, std::numbers::pi, "conformal_power");
  if (r == 0.0) return Vec2::Zero();
  double theta = std::clamp(polar_angle(x), 0.0, std::numbers::pi);
  double rr = std::pow(r, 1.0 / beta);
  double tt = theta / beta;
  return Vec2(rr * std::cos(tt), rr * std::sin(tt));
}

LatticeLaplacianReport lattice_laplacian(const AngleConstants& k, const std::function<double(const Vec2&)>& fn,
                                         double h, double rmin, double rmax,
                                         const std::function<double(const Vec2&)>& rhs) {
  if (!(h > 0.0) || !(rmin > 0.0) || !(rmax > rmin)) throw DomainError("lattice_laplacian: bad h or radii");
  const double a = k.alpha_minus;
  auto in_closed = [a](const Vec2& p) {
    if (p.norm() == 0.0) return true;
    double t = std::atan2(p[1], p[0]);
    return t >= -kAngleTol && t <= a + kAngleTol;
  };
  LatticeLaplacianReport rep;
  rep.h = h;
  rep.max_value = -INFINITY;
  rep.min_value = INFINITY;
  rep.max_shifted = -INFINITY;
  int n = static_cast<int>(std::ceil(rmax / h));
  for (int j = 1; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      Vec2 p(i * h, j * h);
      double r = p.norm();
      if (r < rmin || r > rmax || !in_closed(p)) continue;
      Vec2 nb[4] = {p + Vec2(h, 0), p - Vec2(h, 0), p + Vec2(0, h), p - Vec2(0, h)};
      bool ok = true;
      for (auto& q : nb) ok = ok && in_closed(q);
      if (!ok) continue;
      double u0 = fn(p);
      double lap = (fn(nb[0]) + fn(nb[1]) + fn(nb[2]) + fn(nb[3]) - 4.0 * u0) / (h * h);
      rep.max_value = std::max(rep.max_value, lap);
      rep.min_value = std::min(rep.min_value, lap);
      rep.max_abs = std::max(rep.max_abs, std::abs(lap));
      if (rhs) rep.max_shifted = std::max(rep.max_shifted, lap + rhs(p));
      ++rep.nodes;
    }
  }
  if (rep.nodes == 0) throw InsufficientDataError("lattice_laplacian: no admissible nodes");
  if (!rhs) rep.max_shifted = rep.max_value;
  return rep;
}

nlohmann::json to_json(const LatticeLaplacianReport& r) {
  return {{"h", r.h},           {"max", r.max_value},       {"min", r.min_value},
          {"max_abs", r.max_abs}, {"max_shifted", r.max_shifted}, {"nodes", r.nodes}};
}

}  // namespace macorner
