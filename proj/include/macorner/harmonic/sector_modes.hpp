#pragma once

#include <functional>

#include <json.hpp>

#include "macorner/model/angle_constants.hpp"
#include "macorner/model/types.hpp"

namespace macorner {

/// Polar angle in [0, pi] for points of the closed upper half-plane, with a
/// small tolerance for points a hair below the axis.
double polar_angle(const Vec2& x);

/// v0 = r^beta sin(beta theta) with beta = beta_minus, the positive harmonic
/// function of the sector 0 < theta < alpha_minus vanishing on both edges.
/// Throws DomainError for points outside the closed sector.
double v0(const AngleConstants& k, const Vec2& x);

/// A function A r^degree phi(theta) on the sector of opening alpha_minus.
struct SectorMode {
  AngleConstants constants;
  double degree = 0.0;
  double amplitude = 1.0;
  double delta = 0.0;
  std::function<double(double)> theta_profile;
  std::function<double(double)> theta_profile_dd;

  /// max over the theta grid of amplitude (degree^2 phi + phi''); the
  /// construction guarantees this is <= -1, so Delta(mode) <= -r^(degree-2).
  double margin = 0.0;
  /// max over the theta grid of degree^2 phi + phi'' before scaling.
  double profile_margin = 0.0;
  int halvings = 0;

  double value(const Vec2& x) const;
  /// Exact Laplacian r^(degree-2) A (degree^2 phi + phi'').
  double laplacian(const Vec2& x) const;
};

nlohmann::json to_json(const SectorMode& m);

/// Supersolution mode with phi = sin(beta_minus theta) + delta theta (alpha - theta).
/// delta halves from 0.5 until degree^2 phi + phi'' < 0 on 2048 theta samples,
/// then A >= 1 is chosen with twice the amplitude the inequality needs.
/// Throws DomainError unless 0 <= beta < beta_minus, ConstructionError when
/// 20 halvings do not produce a valid delta.
SectorMode make_v1(const AngleConstants& k, double beta);

enum class ConformalDirection { ToHalfPlane, FromHalfPlane };

/// (r, theta) -> (r^beta, beta theta) and its inverse, beta = beta_minus for
/// Sign::Minus and beta_plus for Sign::Plus. Throws DomainError for points
/// outside the closed sector or the closed upper half-plane.
Vec2 conformal_power(const AngleConstants& k, const Vec2& x, ConformalDirection dir, Sign sector = Sign::Minus);

/// Max over lattice nodes of the five-point Laplacian of fn, for nodes in
/// the sector with rmin <= r <= rmax whose four neighbours lie in the closed sector.
struct LatticeLaplacianReport {
  double h = 0.0;
  double max_value = 0.0;
  double min_value = 0.0;
  double max_abs = 0.0;
  /// max of Delta_h fn + rhs, when rhs is supplied.
  double max_shifted = 0.0;
  int nodes = 0;
};

LatticeLaplacianReport lattice_laplacian(const AngleConstants& k, const std::function<double(const Vec2&)>& fn,
                                         double h, double rmin, double rmax,
                                         const std::function<double(const Vec2&)>& rhs = {});

nlohmann::json to_json(const LatticeLaplacianReport& r);

}  // namespace macorner
