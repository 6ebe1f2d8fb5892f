#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "macorner/errors.hpp"
#include "macorner/ma_solver/stencil.hpp"
#include "macorner/model/dirichlet_problem.hpp"
#include "macorner/model/scalar_field.hpp"

namespace macorner {

struct SolverConfig {
  /// Relative: converged means ||MA_h[u] - f||_inf <= newton_tol max(1, ||f||_inf).
  double newton_tol = 1e-9;
  int max_newton = 60;
  double damping = 0.5;
  double armijo = 1e-4;
  int continuation_steps = 4;
  double convexity_penalty_weight = 1.0;
  int gauss_seidel_sweeps = 200;
  int max_fallbacks = 3;
  /// Systems up to this size are solved by sparse LU, larger ones by
  /// multigrid-preconditioned BiCGSTAB.
  int direct_threshold = 120000;
  Stencil stencil = default_stencil();
  /// 1: one line per Newton step on stderr.
  int verbosity = 0;

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

nlohmann::json to_json(const SolverConfig& config);
/// Reads the keys present in j on top of base.
SolverConfig solver_config_from_json(const nlohmann::json& j, SolverConfig base = {});

struct ContinuationStep {
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  /// ||MA_h[u] - f||_inf / max(1, ||f||_inf)
  double final_residual = 0.0;
  std::vector<ContinuationStep> continuation;
  double convexity_violation = 0.0;
  int linear_iterations = 0;
  int fallback_sweeps = 0;
  std::string id;
};

nlohmann::json to_json(const SolveReport& report);

/// Newton gave up; carries the report of the failed run.
class ConvergenceError : public SolverError {
public:
  ConvergenceError(const std::string& what, SolveReport report)
      : SolverError(what, report.final_residual), report_(std::move(report)) {}
  const SolveReport& report() const noexcept { return report_; }

private:
  SolveReport report_;
};

/// MA_h[u] at interior nodes (zero elsewhere). Arms leaving the domain use
/// boundary(cut point); without boundary data such pairs are skipped.
ScalarField ma_operator(const ScalarField& u, const Stencil& stencil, const PointFunction& boundary = {},
                        double penalty = 1.0);

/// Damped semismooth Newton on MA_h[u] = f with u = phi on the boundary.
/// Without init: family members with t in [0, 2s] start from P_c^- + t x1 x2,
/// t < 0 runs continuation from t = 0, anything else starts from the
/// solution of Laplace u = 2 sqrt(f).
std::pair<ScalarField, SolveReport> solve_dirichlet(const DirichletProblem& problem, const SolverConfig& config,
                                                    const ScalarField* init = nullptr);

/// Warm start from the solution of a neighbouring problem on the same grid.
/// Family members with equal c move the guess by (t - t') x1 x2; other
/// problems move it by the linearized response to the change of boundary
/// data and right-hand side (one tangent solve).
std::pair<ScalarField, SolveReport> solve_dirichlet(const DirichletProblem& problem, const SolverConfig& config,
                                                    const ScalarField& neighbour,
                                                    const DirichletProblem& neighbour_problem);

struct ComparisonResult {
  bool ordered = false;
  /// max(u_lo - u_hi) over all nodes
  double max_excess = 0.0;
  /// min(u_hi - u_lo) over interior nodes
  double min_interior_gap = 0.0;
  explicit operator bool() const { return ordered; }
};

/// Solves both problems and tests u_lo <= u_hi + 10 newton_tol at every node.
ComparisonResult comparison_check(const DirichletProblem& lo, const DirichletProblem& hi,
                                  const SolverConfig& config);

}  // namespace macorner
