#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "macorner/errors.hpp"
#include "macorner/ma_solver/discrete_operator.hpp"
#include "macorner/ma_solver/solver.hpp"
#include "macorner/model/angle_constants.hpp"
#include "macorner/model/quadratic.hpp"

using namespace macorner;

namespace {

double max_abs_error(const ScalarField& u, const PointFunction& exact) {
  double e = 0.0;
  for (std::size_t k = 0; k < u.grid().size(); ++k) {
    if (u.grid().kind(k) != NodeKind::Exterior) e = std::max(e, std::abs(u[k] - exact(u.grid().point(k))));
  }
  return e;
}

// Convex but not quadratic: Hessian diag(e^x1, e^x2) + 0.2 I.
double smooth_convex(const Vec2& x) { return std::exp(x[0]) + std::exp(x[1]) + 0.1 * x.squaredNorm(); }

}  // namespace

TEST_CASE("stencil validation") {
  Stencil s = default_stencil();
  CHECK(s.pairs.size() == 4);
  CHECK(s.reach() == 2);
  CHECK_NOTHROW(s.validate());
  Stencil skew = s;
  skew.pairs.push_back({{1, 0}, {1, 1}});
  CHECK_THROWS_AS(skew.validate(), DomainError);
  Stencil no_diag;
  no_diag.pairs = {{{1, 0}, {0, 1}}};
  CHECK_THROWS_AS(no_diag.validate(), DomainError);
}

TEST_CASE("operator is exact on quadratics aligned with a stencil pair") {
  for (double c : {0.25, 0.5, 0.75}) {
    AngleConstants k = make_angle_constants(c);
    for (GridShape shape : {GridShape::Square, GridShape::QuarterDisc}) {
      auto g = make_grid(1.0 / 8.0, 2.0, shape);
      QuadraticPolynomial p = make_pc(k, Sign::Minus);
      DiscreteOperator op(g, default_stencil(), [&](const Vec2& x) { return p(x); });
      ScalarField u = ScalarField::sample(g, p);
      Vector m = op.apply(u.values());
      CHECK((m.array() - c).abs().maxCoeff() <= 1e-11);
      // the diagonal pair is the eigenbasis of D^2 P_c^-
      int pair = -1;
      op.apply_at(u.values(), 0, &pair);
      CHECK(pair == 1);
    }
  }
}

TEST_CASE("a Hessian-free field reads as a convexity violation") {
  auto g = make_grid(0.25, 2.0);
  auto data = [](const Vec2& x) { return x[0] * x[1]; };
  DiscreteOperator op(g, default_stencil(), data, 1.0);
  ScalarField u = ScalarField::sample(g, data);
  CHECK(op.convexity_violation(u.values()) == doctest::Approx(-1.0));
  // penalised value along the diagonal pair: 1 * 0 + (-1)
  CHECK(op.apply(u.values()).maxCoeff() == doctest::Approx(-1.0));
}

TEST_CASE("the operator is monotone in neighbour values") {
  auto g = make_grid(0.125, 2.0);
  DiscreteOperator op(g, default_stencil(), smooth_convex);
  ScalarField u = ScalarField::sample(g, smooth_convex);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> bump(0.0, 0.05);
  const auto& interior = op.interior();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = rng() % interior.size();
    std::vector<double> v = u.values();
    const double before = op.apply_at(v, k);
    // raise every other node: MA_h at k may only grow
    for (std::size_t j = 0; j < v.size(); ++j)
      if (static_cast<std::int32_t>(j) != interior[k]) v[j] += bump(rng);
    CHECK(op.apply_at(v, k) >= before - 1e-12);
    // raise the centre only: MA_h at k may only drop
    std::vector<double> w = u.values();
    w[interior[k]] += bump(rng);
    CHECK(op.apply_at(w, k) <= before + 1e-12);
  }
}

TEST_CASE("negative Jacobian is an M-matrix that matches finite differences") {
  auto g = make_grid(0.125, 1.0);
  // the mixed term keeps the argmin pair strict at every node
  auto fn = [](const Vec2& x) { return smooth_convex(x) + 0.3 * x[0] * x[1]; };
  DiscreteOperator op(g, default_stencil(), fn);
  ScalarField u = ScalarField::sample(g, fn);
  SparseMatrix jm = op.negative_jacobian(u.values());
  const std::size_t n = op.unknowns();
  REQUIRE(jm.rows() == static_cast<Eigen::Index>(n));
  for (int col = 0; col < jm.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(jm, col); it; ++it) {
      if (it.row() == it.col()) CHECK(it.value() > 0.0);
      else CHECK(it.value() <= 0.0);
    }
  }
  Eigen::MatrixXd dense(jm);
  const Vector base = op.apply(u.values());
  const double delta = 1e-7;
  for (std::size_t j = 0; j < n; j += 5) {
    std::vector<double> v = u.values();
    v[op.interior()[j]] += delta;
    const Vector fd = -(op.apply(v) - base) / delta;
    CHECK((fd - dense.col(static_cast<Eigen::Index>(j))).lpNorm<Eigen::Infinity>() <= 1e-4 * dense.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("Gauss-Seidel sweeps satisfy the local equation") {
  auto g = make_grid(0.125, 1.0);
  QuadraticPolynomial p = make_pc(make_angle_constants(0.5), Sign::Minus);
  DiscreteOperator op(g, default_stencil(), [&](const Vec2& x) { return p(x); });
  ScalarField u = ScalarField::sample(g, [&](const Vec2& x) { return p(x) + 0.05 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]); });
  const Vector f = Vector::Constant(static_cast<Eigen::Index>(op.unknowns()), 0.5);
  double start = (op.apply(u.values()) - f).lpNorm<Eigen::Infinity>();
  for (int s = 0; s < 300; ++s) op.gauss_seidel_sweep(u.values(), f);
  CHECK((op.apply(u.values()) - f).lpNorm<Eigen::Infinity>() < 1e-3 * start);
  CHECK(max_abs_error(u, [&](const Vec2& x) { return p(x); }) <= 1e-4);
}

TEST_CASE("Newton reproduces P_c^- and q exactly") {
  for (double c : {0.25, 0.5, 0.75, 1.0}) {
    auto g = make_grid(1.0 / 16.0, 2.0);
    DirichletProblem prob = make_family_problem(g, c, 0.0);
    auto [u, rep] = solve_dirichlet(prob, SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.final_residual <= 1e-9);
    QuadraticPolynomial p = c < 1.0 ? make_pc(make_angle_constants(c), Sign::Minus) : family_quadratic(0.0, 0.0);
    CHECK(max_abs_error(u, [&](const Vec2& x) { return p(x); }) <= 1e-10);
  }
}

TEST_CASE("Newton from a Laplace start on a quarter disc") {
  auto g = make_grid(1.0 / 16.0, 2.0, GridShape::QuarterDisc);
  // no closed form here: the oracle is the discrete equation itself
  DirichletProblem prob;
  prob.grid = g;
  prob.rhs = [](const Vec2& x) { return 1.0 + x[0]; };
  prob.boundary = smooth_convex;
  auto [u, rep] = solve_dirichlet(prob, SolverConfig{});
  CHECK(rep.converged);
  DiscreteOperator op(g, default_stencil(), prob.boundary);
  const Vector m = op.apply(u.values());
  for (std::size_t k = 0; k < op.unknowns(); ++k) {
    CHECK(std::abs(m[k] - prob.rhs(g->point(op.interior()[k]))) <= 1e-8);
  }
  CHECK(op.convexity_violation(u.values()) == 0.0);
}

TEST_CASE("warm start from a neighbouring family member") {
  auto g = make_grid(1.0 / 16.0, 4.0);
  const double c = 0.75;
  DirichletProblem a = make_family_problem(g, c, 0.2);
  DirichletProblem b = make_family_problem(g, c, 0.3);
  auto [ua, ra] = solve_dirichlet(a, SolverConfig{});
  auto [cold, rc] = solve_dirichlet(b, SolverConfig{});
  auto [warm, rw] = solve_dirichlet(b, SolverConfig{}, ua, a);
  CHECK(rw.converged);
  CHECK(rw.iterations <= rc.iterations);
  double diff = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) diff = std::max(diff, std::abs(warm[k] - cold[k]));
  CHECK(diff <= 1e-8);
}

TEST_CASE("ordered data give ordered solutions") {
  auto g = make_grid(1.0 / 8.0, 2.0);
  DirichletProblem lo = make_family_problem(g, 0.5, 0.0);
  DirichletProblem hi = make_family_problem(g, 0.5, 0.4);
  ComparisonResult r = comparison_check(lo, hi, SolverConfig{});
  CHECK(r.ordered);
  CHECK(r.min_interior_gap > 0.0);
  ComparisonResult rev = comparison_check(hi, lo, SolverConfig{});
  CHECK_FALSE(rev.ordered);
}

TEST_CASE("solver configuration round trip and validation") {
  SolverConfig c;
  c.newton_tol = 1e-7;
  c.max_newton = 12;
  SolverConfig d = solver_config_from_json(to_json(c));
  CHECK(d.newton_tol == 1e-7);
  CHECK(d.max_newton == 12);
  SolverConfig bad;
  bad.newton_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);

  auto g = make_grid(0.25, 2.0);
  SolverConfig tiny;
  tiny.max_newton = 1;
  tiny.max_fallbacks = 0;
  tiny.continuation_steps = 1;
  DirichletProblem p = make_constant_rhs_problem(g, 2.0, smooth_convex);
  CHECK_THROWS_AS(solve_dirichlet(p, tiny), ConvergenceError);
}
