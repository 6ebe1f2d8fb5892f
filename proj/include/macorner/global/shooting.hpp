#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "macorner/ma_solver/solver.hpp"
#include "macorner/model/angle_constants.hpp"
#include "macorner/numerics/root_finding.hpp"

namespace macorner {

/// Dirichlet solve with det = c, data q on the axes and P_c^- + t x1 x2 on
/// the outer truncation. Requires 0 < c < 1 and t in (-1, 2s].
std::pair<ScalarField, SolveReport> solve_family_member(const AngleConstants& k, double t, double R, double h,
                                                        const SolverConfig& config,
                                                        GridShape shape = GridShape::Square);

struct ShootingOptions {
  GridShape shape = GridShape::Square;
  double tol_f = 5e-7;
  double tol_x = 1e-8;
  BracketMethod method = BracketMethod::Itp;
  /// Run the same shooting on the grid with spacing 2h first and use its
  /// t* and field to start the fine evaluations. Ignored when 2h does not
  /// divide 1.
  bool coarse_presolve = false;
  /// Step of the downward march that finds the lower bracket end for the
  /// P-underbar branch.
  double march_step = 0.125;
};

nlohmann::json to_json(const ShootingOptions& o);
/// Missing keys keep the values of base; malformed values throw InputError.
ShootingOptions shooting_options_from_json(const nlohmann::json& j, ShootingOptions base = {});

struct ShootingResult {
  double c = 0.0;
  double t_star = 0.0;
  double target = 0.0;
  double R = 0.0;
  double h = 0.0;
  std::optional<ScalarField> field;
  SolveReport report;
  /// Increasing in evaluation order: (t, u_t(1,1)).
  std::vector<std::pair<double, double>> bracket_history;
  /// Bracket that the final search ran on.
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
};

nlohmann::json to_json(const ShootingResult& r);

/// Shooting over [0, 2s] for u_t(1,1) = 1: the truncated P-bar.
ShootingResult shoot_pbar(const AngleConstants& k, double R, double h, const SolverConfig& config,
                          const ShootingOptions& options = {});

/// Shooting over (-1, 0) for u_t(1,1) = 0: the truncated P-underbar.
ShootingResult shoot_punder(const AngleConstants& k, double R, double h, const SolverConfig& config,
                            const ShootingOptions& options = {});

struct ExtrapolationPair {
  double R_small = 0.0;
  double R_large = 0.0;
  double max_difference = 0.0;
};

struct ExtrapolationReport {
  std::vector<ExtrapolationPair> pairs;
  /// Geometric ratio of successive differences (nan with a single pair).
  double decay_ratio = 0.0;
  bool decreasing = true;
  double region_radius = 0.0;
};

nlohmann::json to_json(const ExtrapolationReport& r);

/// Compares consecutive results on their common nodes inside B_region (the
/// whole common square when region_radius <= 0). Throws GridError with fewer
/// than two results or mismatched spacings.
ExtrapolationReport extrapolate_R(const std::vector<const ShootingResult*>& results, double region_radius = 0.0);

}  // namespace macorner
