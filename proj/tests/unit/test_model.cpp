#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "macorner/errors.hpp"
#include "macorner/model/affine.hpp"
#include "macorner/model/angle_constants.hpp"
#include "macorner/model/dirichlet_problem.hpp"
#include "macorner/model/field_io.hpp"
#include "macorner/model/quadratic.hpp"
#include "macorner/model/rescale.hpp"
#include "macorner/model/scalar_field.hpp"

using namespace macorner;
using std::numbers::pi;

TEST_CASE("sector constants at c = 0.75 and c = 0.5") {
  AngleConstants k = make_angle_constants(0.75);
  CHECK(k.s == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.alpha_minus == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
  CHECK(k.alpha_plus == doctest::Approx(pi / 3.0).epsilon(1e-14));
  CHECK(k.beta_minus == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(k.beta_plus == doctest::Approx(3.0).epsilon(1e-14));

  // cos(3 pi / 4) = -1/sqrt 2 = -sqrt(1 - 0.5)
  AngleConstants h = make_angle_constants(0.5);
  CHECK(h.alpha_minus == doctest::Approx(0.75 * pi).epsilon(1e-14));
  CHECK(h.beta_minus == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  AngleConstants one = make_angle_constants(1.0);
  CHECK(one.beta_minus == doctest::Approx(2.0));
  CHECK(one.beta_plus == doctest::Approx(2.0));
}

TEST_CASE("c outside (0, 1] is rejected") {
  CHECK_THROWS_AS(make_angle_constants(0.0), DomainError);
  CHECK_THROWS_AS(make_angle_constants(-1.0), DomainError);
  CHECK_THROWS_AS(make_angle_constants(1.5), DomainError);
  CHECK_THROWS_AS(make_angle_constants(NAN), DomainError);
}

TEST_CASE("both quadratic solutions have determinant c") {
  for (double c : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    AngleConstants k = make_angle_constants(c);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      QuadraticPolynomial p = make_pc(k, s);
      CHECK(std::abs(p.hessian_det() - c) <= 1e-14);
      CHECK(p.h11 == 1.0);
      CHECK(p.h22 == 1.0);
      CHECK(p.h12 == doctest::Approx(sign_value(s) * std::sqrt(1.0 - c)));
    }
  }
}

TEST_CASE("affine maps carry P_c to q and invert") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double c : {0.25, 0.5, 0.75}) {
    AngleConstants k = make_angle_constants(c);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      AffineMap a = make_affine(k, s);
      AffineMap round = a.compose(a.inverse());
      CHECK((round.matrix() - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
      QuadraticPolynomial p = make_pc(k, s);
      for (int i = 0; i < 100; ++i) {
        Vec2 x(unit(rng), unit(rng));
        CHECK(std::abs(p(a(x)) - 0.5 * x.squaredNorm()) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(make_affine(make_angle_constants(1.0), Sign::Minus), DomainError);
}

TEST_CASE("family quadratic reduces to q on the axes") {
  QuadraticPolynomial f = family_quadratic(0.5, 0.3);
  for (double r : {0.5, 1.0, 3.0}) {
    CHECK(f(Vec2(r, 0)) == doctest::Approx(0.5 * r * r));
    CHECK(f(Vec2(0, r)) == doctest::Approx(0.5 * r * r));
  }
  CHECK(f(Vec2(1, 1)) == doctest::Approx(1.0 - 0.5 + 0.3));
}

TEST_CASE("grid invariants") {
  Grid2D g(0.25, 2.0);
  CHECK(g.n() == 8);
  CHECK(g.point(g.node_at(Vec2(1, 1))).isApprox(Vec2(1, 1)));
  CHECK(g.count(NodeKind::Interior) == 7u * 7u);
  CHECK_THROWS_AS(Grid2D(0.3, 2.0), DomainError);
  CHECK_THROWS_AS(Grid2D(0.25, 2.1), DomainError);

  Grid2D d(0.125, 2.0, GridShape::QuarterDisc);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.kind(k) != NodeKind::Exterior) CHECK(d.point(k).norm() <= 2.0 + 1e-12);
  }
  CHECK(d.kind(d.index(16, 16)) == NodeKind::Exterior);
  CHECK(grid_shape_from_string(to_string(GridShape::QuarterDisc)) == GridShape::QuarterDisc);
  CHECK_THROWS_AS(grid_shape_from_string("hexagon"), InputError);
}

TEST_CASE("field interpolation is exact on quadratics") {
  auto g = make_grid(0.125, 4.0);
  QuadraticPolynomial p = make_pc(make_angle_constants(0.75), Sign::Minus);
  ScalarField u = ScalarField::sample(g, p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    Vec2 x(pos(rng), pos(rng));
    CHECK(std::abs(u.interpolate(x) - p(x)) <= 1e-12);
  }
  CHECK(u.value_at_unit_point() == doctest::Approx(0.5));
  CHECK_THROWS_AS(u.interpolate(Vec2(4.5, 1.0)), ExtentError);
}

TEST_CASE("quadratic rescaling fixes homogeneous quadratics") {
  auto g = make_grid(0.125, 4.0);
  QuadraticPolynomial p = make_pc(make_angle_constants(0.5), Sign::Plus);
  ScalarField u = ScalarField::sample(g, p);
  for (double lam : {0.5, 1.0}) {
    ScalarField v = quadratic_rescale(u, lam, g);
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(std::abs(v[k] - p(g->point(k))) <= 1e-12);
  }
  // lambda = 2 halves the admissible extent
  ScalarField w = quadratic_rescale(u, 2.0);
  CHECK(w.grid().R() == doctest::Approx(2.0));
  CHECK(w.meta().lambda.value() == 2.0);
  CHECK_THROWS_AS(quadratic_rescale(u, 2.0, g), ExtentError);
  CHECK_THROWS_AS(quadratic_rescale(u, 0.0), DomainError);
}

TEST_CASE("rescaling a non-quadratic field follows lambda^-2 u(lambda x)") {
  auto g = make_grid(0.0625, 2.0);
  auto fn = [](const Vec2& x) { return std::pow(x.norm(), 3.0); };
  ScalarField u = ScalarField::sample(g, fn);
  auto target = make_grid(0.0625, 1.0);
  ScalarField v = quadratic_rescale(u, 2.0, target);
  // lambda^-2 (lambda r)^3 = lambda r^3; nodes of the target map onto nodes of the source
  for (std::size_t k = 0; k < target->size(); ++k) {
    CHECK(v[k] == doctest::Approx(2.0 * fn(target->point(k))).epsilon(1e-12));
  }
}

TEST_CASE("field files round trip and reject damaged input") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "macorner_model_io";
  fs::create_directories(dir);
  auto g = make_grid(0.25, 2.0, GridShape::QuarterDisc);
  FieldMeta meta;
  meta.c = 0.75;
  meta.t = 0.125;
  meta.provenance = "unit";
  ScalarField u = ScalarField::sample(g, [](const Vec2& x) { return std::sin(x[0]) + x[1] / 3.0; }, meta);
  save_field(u, dir / "f");
  ScalarField v = load_field(dir / "f");
  CHECK(v.grid() == u.grid());
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->kind(k) != NodeKind::Exterior) CHECK(v[k] == u[k]);
  CHECK(v.meta().c.value() == 0.75);
  CHECK(v.meta().t.value() == 0.125);

  {
    std::ifstream is(dir / "f.csv");
    std::string all((std::istreambuf_iterator<char>(is)), {});
    std::ofstream os(dir / "g.csv");
    os << all.substr(0, all.size() / 2);
    fs::copy_file(dir / "f.json", dir / "g.json", fs::copy_options::overwrite_existing);
  }
  CHECK_THROWS_AS(load_field(dir / "g"), InputError);
  CHECK_THROWS_AS(load_field(dir / "missing"), InputError);
}

TEST_CASE("problem validation") {
  auto g = make_grid(0.25, 2.0);
  DirichletProblem p = make_family_problem(g, 0.75, 0.2);
  CHECK_NOTHROW(p.validate());
  CHECK(p.family.has_value());
  CHECK(p.boundary(Vec2(1, 1)) == doctest::Approx(1.0 - 0.5 + 0.2));
  DirichletProblem bad = make_constant_rhs_problem(g, -1.0, [](const Vec2&) { return 0.0; });
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(make_family_problem(g, 1.2, 0.0), DomainError);
}
