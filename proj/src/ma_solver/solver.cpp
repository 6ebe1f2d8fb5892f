#include "macorner/ma_solver/solver.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "macorner/errors.hpp"
#include "macorner/ma_solver/discrete_operator.hpp"
#include "macorner/numerics/multigrid.hpp"

namespace macorner {

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0)) throw DomainError("newton_tol must be positive");
  if (max_newton < 1) throw DomainError("max_newton must be at least 1");
  if (!(damping > 0.0 && damping < 1.0)) throw DomainError("damping must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw DomainError("armijo constant must lie in (0, 1)");
  if (continuation_steps < 1) throw DomainError("continuation_steps must be at least 1");
  if (!(convexity_penalty_weight > 0.0)) throw DomainError("convexity_penalty_weight must be positive");
  if (gauss_seidel_sweeps < 0 || max_fallbacks < 0) throw DomainError("fallback settings must be nonnegative");
  stencil.validate();
}

nlohmann::json to_json(const SolverConfig& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.stencil.pairs) pairs.push_back({{p.e.x, p.e.y}, {p.e_perp.x, p.e_perp.y}});
  return {{"newton_tol", c.newton_tol},
          {"max_newton", c.max_newton},
          {"damping", c.damping},
          {"armijo", c.armijo},
          {"continuation_steps", c.continuation_steps},
          {"convexity_penalty_weight", c.convexity_penalty_weight},
          {"gauss_seidel_sweeps", c.gauss_seidel_sweeps},
          {"max_fallbacks", c.max_fallbacks},
          {"direct_threshold", c.direct_threshold},
          {"stencil", pairs}};
}

SolverConfig solver_config_from_json(const nlohmann::json& j, SolverConfig c) {
  try {
    if (j.contains("newton_tol")) c.newton_tol = j.at("newton_tol").get<double>();
    if (j.contains("max_newton")) c.max_newton = j.at("max_newton").get<int>();
    if (j.contains("damping")) c.damping = j.at("damping").get<double>();
    if (j.contains("armijo")) c.armijo = j.at("armijo").get<double>();
    if (j.contains("continuation_steps")) c.continuation_steps = j.at("continuation_steps").get<int>();
    if (j.contains("convexity_penalty_weight")) {
      c.convexity_penalty_weight = j.at("convexity_penalty_weight").get<double>();
    }
    if (j.contains("gauss_seidel_sweeps")) c.gauss_seidel_sweeps = j.at("gauss_seidel_sweeps").get<int>();
    if (j.contains("max_fallbacks")) c.max_fallbacks = j.at("max_fallbacks").get<int>();
    if (j.contains("verbosity")) c.verbosity = j.at("verbosity").get<int>();
    if (j.contains("direct_threshold")) c.direct_threshold = j.at("direct_threshold").get<int>();
    if (j.contains("stencil")) {
      Stencil s;
      for (const auto& p : j.at("stencil")) {
        s.pairs.push_back({{p.at(0).at(0).get<int>(), p.at(0).at(1).get<int>()},
                           {p.at(1).at(0).get<int>(), p.at(1).at(1).get<int>()}});
      }
      c.stencil = s;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("solver config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.continuation) {
    steps.push_back({{"t", s.t}, {"iterations", s.iterations}, {"residual", s.residual}});
  }
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"residual", r.final_residual},
          {"continuation", steps},
          {"convexity_violation", r.convexity_violation},
          {"linear_iterations", r.linear_iterations},
          {"fallback_sweeps", r.fallback_sweeps},
          {"id", r.id}};
}

namespace {

/// Solves (-J) x = b for successive Jacobians of one operator. Small systems
/// use sparse LU; large ones BiCGSTAB with a multigrid hierarchy that is kept
/// across Newton steps until it stops being effective.
class LinearWorkspace {
public:
  LinearWorkspace(const DiscreteOperator& op, int direct_threshold)
      : op_(op), direct_(static_cast<int>(op.unknowns()) <= direct_threshold) {}

  Vector solve(const SparseMatrix& a, const Vector& b, double tol, int& iterations) {
    if (direct_) {
      ++iterations;
      return solve_linear(a, b, 1e-8);
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (!mg_ || attempt == 1) mg_ = std::make_unique<LatticeMultigrid>(a, op_.grid().n(), op_.node_to_unknown());
      const auto precond = [this](const Vector& v) { return mg_->apply(v); };
      KrylovResult r = bicgstab(a, b, precond, tol, 80, Vector::Zero(b.size()));
      iterations += r.iterations;
      if (r.converged) {
        if (r.iterations > 12) mg_.reset();
        return r.x;
      }
      if (attempt == 1) {
        throw SolverError("multigrid BiCGSTAB did not reach the inner tolerance", r.relative_residual);
      }
    }
    return {};
  }

private:
  const DiscreteOperator& op_;
  bool direct_;
  std::unique_ptr<LatticeMultigrid> mg_;
};

double inf_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // relative, as in the report
};

NewtonOutcome newton(const DiscreteOperator& op, const Vector& f, std::vector<double>& u, const SolverConfig& cfg,
                     LinearWorkspace& ws, SolveReport& report) {
  const double scale = std::max(1.0, inf_norm(f));
  const double target = cfg.newton_tol * scale;
  const auto& interior = op.interior();
  NewtonOutcome out;
  Vector F = op.apply(u) - f;
  double merit = F.norm();
  int fallbacks = 0;
  std::vector<double> trial;

  for (int it = 0; it < cfg.max_newton; ++it) {
    const double rinf = inf_norm(F);
    out.residual = rinf / scale;
    if (rinf <= target) {
      out.converged = true;
      return out;
    }
    const SparseMatrix a = op.negative_jacobian(u);
    const double eta = std::clamp(1e-2 * rinf, 1e-12, 1e-4);
    Vector delta;
    try {
      delta = ws.solve(a, F, eta, report.linear_iterations);
    } catch (const SolverError&) {
      delta.resize(0);
    }
    ++out.iterations;

    bool accepted = false;
    if (delta.size() == F.size()) {
      double lambda = 1.0;
      while (lambda >= 1.0 / 1024.0) {
        trial = u;
        for (std::size_t k = 0; k < interior.size(); ++k) trial[interior[k]] += lambda * delta[static_cast<Eigen::Index>(k)];
        Vector Ft = op.apply(trial) - f;
        const double mt = Ft.norm();
        if (std::isfinite(mt) && mt <= (1.0 - cfg.armijo * lambda) * merit) {
          if (cfg.verbosity > 0) {
            std::fprintf(stderr, "newton %3d  |F|inf %.3e  step %.4g  linear %d\n", it, rinf, lambda,
                         report.linear_iterations);
          }
          u.swap(trial);
          F = std::move(Ft);
          merit = mt;
          accepted = true;
          break;
        }
        lambda *= cfg.damping;
      }
    }
    if (accepted) continue;

    // Stalled. At the rounding floor there is nothing left to gain.
    if (rinf <= 10.0 * target) {
      out.residual = rinf / scale;
      return out;
    }
    if (fallbacks >= cfg.max_fallbacks || cfg.gauss_seidel_sweeps == 0) return out;
    ++fallbacks;
    for (int s = 0; s < cfg.gauss_seidel_sweeps; ++s) op.gauss_seidel_sweep(u, f);
    report.fallback_sweeps += cfg.gauss_seidel_sweeps;
    F = op.apply(u) - f;
    merit = F.norm();
  }
  const double rinf = inf_norm(F);
  out.residual = rinf / scale;
  out.converged = rinf <= target;
  return out;
}

std::vector<double> initial_from_field(const ScalarField& init, const DirichletProblem& problem) {
  if (!(init.grid() == *problem.grid)) throw GridError("initial field lives on a different grid");
  std::vector<double> u = init.values();
  const Grid2D& g = *problem.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) u[k] = problem.boundary(g.point(k));
    if (g.kind(k) == NodeKind::Exterior) u[k] = 0.0;
  }
  return u;
}

std::vector<double> boundary_filled(const DirichletProblem& problem) {
  const Grid2D& g = *problem.grid;
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) != NodeKind::Exterior) u[k] = problem.boundary(g.point(k));
  }
  return u;
}

/// Laplace u = 2 sqrt(f) with the problem's boundary data (5-point stencil;
/// interior nodes always have their four axis neighbours).
std::vector<double> poisson_start(const DirichletProblem& problem, const DiscreteOperator& op, int direct_threshold) {
  const Grid2D& g = *problem.grid;
  const int m = g.n() + 1;
  const double h2 = g.h() * g.h();
  std::vector<double> u = boundary_filled(problem);
  const auto& interior = op.interior();
  const auto& map = op.node_to_unknown();
  SparseSystem sys(static_cast<int>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const std::int64_t idx = interior[k];
    sys.add(static_cast<int>(k), static_cast<int>(k), 4.0 / h2);
    double rhs = -2.0 * std::sqrt(problem.rhs(g.point(static_cast<std::size_t>(idx))));
    for (std::int64_t off : {std::int64_t{1}, std::int64_t{-1}, std::int64_t{m}, -std::int64_t{m}}) {
      const std::int64_t nb = idx + off;
      if (map[nb] >= 0) {
        sys.add(static_cast<int>(k), map[nb], -1.0 / h2);
      } else {
        rhs += u[nb] / h2;
      }
    }
    sys.rhs[static_cast<Eigen::Index>(k)] = rhs;
  }
  Vector x;
  const SparseMatrix a = sys.matrix();
  if (static_cast<int>(interior.size()) <= direct_threshold) {
    x = solve_linear(a, sys.rhs, 1e-10);
  } else {
    LatticeMultigrid mg(a, g.n(), map);
    KrylovResult r = bicgstab(a, sys.rhs, [&](const Vector& v) { return mg.apply(v); }, 1e-10, 200,
                              Vector::Zero(sys.rhs.size()));
    if (!r.converged) throw SolverError("initial Poisson solve failed", r.relative_residual);
    x = r.x;
  }
  for (std::size_t k = 0; k < interior.size(); ++k) u[interior[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

std::string report_id(const Grid2D& g, const std::vector<double>& u, const SolveReport& r) {
  std::uint64_t hsh = 1469598103934665603ULL;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      hsh ^= b[k];
      hsh *= 1099511628211ULL;
    }
  };
  const int n = g.n();
  const double h = g.h();
  mix(&n, sizeof n);
  mix(&h, sizeof h);
  mix(u.data(), u.size() * sizeof(double));
  mix(&r.iterations, sizeof r.iterations);
  char buf[32];
  std::snprintf(buf, sizeof buf, "solve-%016" PRIx64, hsh);
  return buf;
}

Vector rhs_values(const DirichletProblem& problem, const DiscreteOperator& op) {
  Vector f(static_cast<Eigen::Index>(op.unknowns()));
  for (std::size_t k = 0; k < op.unknowns(); ++k) {
    f[static_cast<Eigen::Index>(k)] = problem.rhs(problem.grid->point(static_cast<std::size_t>(op.interior()[k])));
  }
  return f;
}

/// u_prev solves prev; returns u_prev + du with (-J) du = dF, dF the
/// linearized change of the residual when moving from prev to next.
std::vector<double> tangent_predict(const DirichletProblem& prev, const DirichletProblem& next,
                                    const std::vector<double>& u_prev, const SolverConfig& cfg, int& linear_iterations) {
  const Grid2D& g = *next.grid;
  const double eps = 1e-6;
  const PointFunction blend = [&](const Vec2& x) {
    const double a = prev.boundary(x);
    return a + eps * (next.boundary(x) - a);
  };
  DiscreteOperator op_prev(next.grid, cfg.stencil, prev.boundary, cfg.convexity_penalty_weight);
  DiscreteOperator op_eps(next.grid, cfg.stencil, blend, cfg.convexity_penalty_weight);
  std::vector<double> ue = u_prev;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) ue[k] = blend(g.point(k));
  }
  const Vector df = rhs_values(next, op_prev) - rhs_values(prev, op_prev);
  const Vector dF = (op_eps.apply(ue) - op_prev.apply(u_prev)) / eps - df;
  LinearWorkspace ws(op_prev, cfg.direct_threshold);
  const Vector du = ws.solve(op_prev.negative_jacobian(u_prev), dF, 1e-8, linear_iterations);
  std::vector<double> u = u_prev;
  const auto& interior = op_prev.interior();
  for (std::size_t k = 0; k < interior.size(); ++k) u[interior[k]] += du[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) u[k] = next.boundary(g.point(k));
  }
  return u;
}

/// Starting guess for next from a solution of prev. Two members of one
/// family differ by (t - t') x1 x2 in their data, and adding that to u_prev
/// keeps the guess smooth. The tangent solve can excite the checkerboard mode
/// that the diagonal pair does not see, so it is kept for other problems.
std::vector<double> predict(const DirichletProblem& prev, const DirichletProblem& next,
                            const std::vector<double>& u_prev, const SolverConfig& cfg, int& linear_iterations) {
  if (prev.family && next.family && prev.family->c == next.family->c) {
    const Grid2D& g = *next.grid;
    const double dt = next.family->t - prev.family->t;
    std::vector<double> u = u_prev;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.kind(k) == NodeKind::Exterior) continue;
      const Vec2 x = g.point(k);
      u[k] = g.is_boundary(k) ? next.boundary(x) : u[k] + dt * x[0] * x[1];
    }
    return u;
  }
  return tangent_predict(prev, next, u_prev, cfg, linear_iterations);
}

}  // namespace

ScalarField ma_operator(const ScalarField& u, const Stencil& stencil, const PointFunction& boundary, double penalty) {
  DiscreteOperator op(u.grid_ptr(), stencil, boundary, penalty);
  const Vector v = op.apply(u.values());
  std::vector<double> out(u.grid().size(), 0.0);
  for (std::size_t k = 0; k < op.unknowns(); ++k) out[op.interior()[k]] = v[static_cast<Eigen::Index>(k)];
  FieldMeta meta;
  meta.provenance = "ma_operator";
  return ScalarField(u.grid_ptr(), std::move(out), meta);
}

namespace {

std::pair<ScalarField, SolveReport> run_solve(const DirichletProblem& problem, const SolverConfig& config,
                                              std::vector<double> u, SolveReport report);

}  // namespace

std::pair<ScalarField, SolveReport> solve_dirichlet(const DirichletProblem& problem, const SolverConfig& config,
                                                    const ScalarField& neighbour,
                                                    const DirichletProblem& neighbour_problem) {
  config.validate();
  problem.validate();
  if (!(neighbour.grid() == *problem.grid) || !neighbour_problem.grid || !(*neighbour_problem.grid == *problem.grid)) {
    throw GridError("warm start lives on a different grid");
  }
  SolveReport report;
  std::vector<double> u = predict(neighbour_problem, problem, initial_from_field(neighbour, neighbour_problem),
                                          config, report.linear_iterations);
  return run_solve(problem, config, std::move(u), std::move(report));
}

std::pair<ScalarField, SolveReport> solve_dirichlet(const DirichletProblem& problem, const SolverConfig& config,
                                                    const ScalarField* init) {
  config.validate();
  problem.validate();
  SolveReport report;

  std::vector<double> u;
  const std::optional<FamilyTag>& fam = problem.family;
  const double s = fam ? std::sqrt(std::max(0.0, 1.0 - fam->c)) : 0.0;

  if (init) {
    u = initial_from_field(*init, problem);
  } else if (fam && fam->t >= 0.0 && fam->t <= 2.0 * s + 1e-15) {
    u = boundary_filled(problem);
  } else if (fam && fam->t < 0.0 && fam->c <= 1.0) {
    // continuation from the exact solution at t = 0 with predictor steps
    DirichletProblem start = make_family_problem(problem.grid, fam->c, 0.0);
    u = boundary_filled(start);
    double t_prev = 0.0;
    double step = fam->t / config.continuation_steps;
    while (t_prev > fam->t) {
      const double t_next = std::max(fam->t, t_prev + step);
      const DirichletProblem stage = make_family_problem(problem.grid, fam->c, t_next);
      DiscreteOperator op(problem.grid, config.stencil, stage.boundary, config.convexity_penalty_weight);
      LinearWorkspace ws(op, config.direct_threshold);
      const DirichletProblem from = make_family_problem(problem.grid, fam->c, t_prev);
      std::vector<double> trial = predict(from, stage, u, config, report.linear_iterations);
      const Vector f = rhs_values(stage, op);
      NewtonOutcome o = newton(op, f, trial, config, ws, report);
      report.iterations += o.iterations;
      report.continuation.push_back({t_next, o.iterations, o.residual});
      if (!o.converged) {
        step *= 0.5;
        if (std::abs(step) < 1e-4) {
          report.final_residual = o.residual;
          throw ConvergenceError("continuation in t stalled at t = " + std::to_string(t_next), report);
        }
        continue;
      }
      u.swap(trial);
      t_prev = t_next;
    }
  } else {
    DiscreteOperator op(problem.grid, config.stencil, problem.boundary, config.convexity_penalty_weight);
    u = poisson_start(problem, op, config.direct_threshold);
  }
  return run_solve(problem, config, std::move(u), std::move(report));
}

namespace {

std::pair<ScalarField, SolveReport> run_solve(const DirichletProblem& problem, const SolverConfig& config,
                                              std::vector<double> u, SolveReport report) {
  const Grid2D& g = *problem.grid;
  const std::optional<FamilyTag>& fam = problem.family;
  DiscreteOperator op(problem.grid, config.stencil, problem.boundary, config.convexity_penalty_weight);
  LinearWorkspace ws(op, config.direct_threshold);
  const Vector f = rhs_values(problem, op);
  NewtonOutcome o = newton(op, f, u, config, ws, report);
  report.iterations += o.iterations;
  report.final_residual = o.residual;
  report.converged = o.converged;
  report.convexity_violation = op.convexity_violation(u);
  report.id = report_id(g, u, report);
  if (!o.converged) {
    throw ConvergenceError("Newton iteration stalled at relative residual " + std::to_string(o.residual), report);
  }

  FieldMeta meta;
  if (fam) {
    meta.c = fam->c;
    meta.t = fam->t;
  }
  meta.provenance = "solve_dirichlet";
  meta.report_id = report.id;
  return {ScalarField(problem.grid, std::move(u), meta), report};
}

}  // namespace

ComparisonResult comparison_check(const DirichletProblem& lo, const DirichletProblem& hi, const SolverConfig& config) {
  if (!lo.grid || !hi.grid || !(*lo.grid == *hi.grid)) throw GridError("comparison needs identical grids");
  const auto [ulo, rlo] = solve_dirichlet(lo, config);
  const auto [uhi, rhi] = solve_dirichlet(hi, config);
  const Grid2D& g = *lo.grid;
  ComparisonResult out;
  out.max_excess = -std::numeric_limits<double>::infinity();
  out.min_interior_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::Exterior) continue;
    const double d = ulo[k] - uhi[k];
    out.max_excess = std::max(out.max_excess, d);
    if (g.kind(k) == NodeKind::Interior) out.min_interior_gap = std::min(out.min_interior_gap, -d);
  }
  out.ordered = out.max_excess <= 10.0 * config.newton_tol;
  return out;
}

}  // namespace macorner
