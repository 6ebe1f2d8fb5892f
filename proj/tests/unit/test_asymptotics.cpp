#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "macorner/asymptotics/analyses.hpp"
#include "macorner/errors.hpp"
#include "macorner/harmonic/sector_modes.hpp"
#include "macorner/model/affine.hpp"
#include "macorner/model/rescale.hpp"

using namespace macorner;

namespace {

// P^- + a v0 o A^-1: the exact form of a field with Harnack coefficient a.
ScalarField harnack_field(const AngleConstants& k, double a, std::shared_ptr<const Grid2D> g) {
  const AffineMap inv = make_affine(k, Sign::Minus).inverse();
  const QuadraticPolynomial pm = make_pc(k, Sign::Minus);
  return ScalarField::sample(g, [&](const Vec2& x) { return pm(x) + a * v0(k, inv(x)); });
}

}  // namespace

TEST_CASE("central-difference Hessian is exact on quadratics") {
  auto g = make_grid(1.0 / 16.0, 2.0);
  AngleConstants k = make_angle_constants(0.75);
  HessianField H(ScalarField::sample(g, make_pc(k, Sign::Plus)));
  int valid = 0;
  for (std::size_t n = 0; n < g->size(); ++n) {
    const Vec2 x = g->point(n);
    const bool inner = x.minCoeff() >= 2 * g->h() - 1e-12 && x.maxCoeff() <= g->R() - 2 * g->h() + 1e-12;
    CHECK(H.valid(n) == inner);
    if (!H.valid(n)) continue;
    ++valid;
    CHECK(H.u11(n) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(H.u22(n) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(H.u12(n) == doctest::Approx(0.5).epsilon(1e-10));
  }
  CHECK(valid > 0);
  auto m = H.interpolate(Vec2(1.03, 0.71));
  REQUIRE(m.has_value());
  CHECK(min_eigenvalue(*m) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(H.interpolate(Vec2(0.01, 1.0)).has_value());
}

TEST_CASE("Hessian audit accepts P^+ and flags corrupted nodes") {
  auto g = make_grid(1.0 / 16.0, 2.0);
  AngleConstants k = make_angle_constants(0.75);
  HessianField H(ScalarField::sample(g, make_pc(k, Sign::Plus)));
  HessianAudit ok = hessian_audit(H, k);
  CHECK(ok.pass);
  CHECK(ok.max_abs_u12.value == doctest::Approx(0.5));
  CHECK(ok.min_det.value == doctest::Approx(0.75));
  const std::size_t n = g->index(10, 12);
  H.set(n, 1.2, 0.1, 1.0);
  HessianAudit bad = hessian_audit(H, k);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_u11.value == doctest::Approx(1.2));
  CHECK((bad.max_u11.where - g->point(n)).norm() <= 1e-12);
  CHECK_FALSE(bad.violations.empty());
}

TEST_CASE("u12 limits of the two quadratic solutions") {
  auto g = make_grid(1.0 / 64.0, 16.0);
  AngleConstants k = make_angle_constants(0.75);
  Window nw = default_near_window(*g), fw = default_far_window(*g);
  CHECK(nw.lo == doctest::Approx(0.125));
  CHECK(nw.hi == doctest::Approx(0.4));
  CHECK(fw.lo == doctest::Approx(16.0 / 3.0));
  CHECK(fw.hi == doctest::Approx(32.0 / 3.0));
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    HessianField H(ScalarField::sample(g, make_pc(k, s)));
    U12Limits lim = u12_limits(H, nw, fw);
    CHECK(lim.near == doctest::Approx(sign_value(s) * 0.5).epsilon(1e-10));
    CHECK(lim.far == doctest::Approx(sign_value(s) * 0.5).epsilon(1e-10));
    CHECK(lim.near_profile.size() == 12);
  }
  // 8h > R/40 on coarse grids: the default near window is empty
  auto coarse = make_grid(1.0 / 32.0, 8.0);
  HessianField Hc(ScalarField::sample(coarse, make_pc(k, Sign::Plus)));
  CHECK(default_near_window(*coarse).lo > default_near_window(*coarse).hi);
  CHECK_THROWS_AS(u12_limits(Hc, default_near_window(*coarse), default_far_window(*coarse)), DomainError);
}

TEST_CASE("deviation exponent of a radial power") {
  auto g = make_grid(1.0 / 64.0, 4.0);
  AngleConstants k = make_angle_constants(0.5);
  QuadraticPolynomial pm = make_pc(k, Sign::Minus);
  ScalarField u = ScalarField::sample(g, [&](const Vec2& x) { return pm(x) + 0.3 * std::pow(x.norm(), 2.5); });
  DeviationExponent d = deviation_exponent(u, pm, {0.25, 2.0});
  REQUIRE(d.fit.has_value());
  CHECK_FALSE(d.degenerate);
  CHECK(d.fit->slope == doctest::Approx(2.5).epsilon(1e-3));
  DeviationExponent flat = deviation_exponent(ScalarField::sample(g, pm), pm, {0.25, 2.0});
  CHECK(flat.degenerate);
  CHECK_FALSE(flat.fit.has_value());
}

TEST_CASE("Harnack coefficient of P^- + a v0 o A^-1") {
  auto g = make_grid(1.0 / 32.0, 4.0);
  AngleConstants k = make_angle_constants(0.75);
  for (double a : {0.6, -0.4}) {
    ScalarField u = harnack_field(k, a, g);
    HarnackCoefficient hc = harnack_coefficient(u, k, {0.5, 1.5});
    CHECK(hc.a == doctest::Approx(a).epsilon(1e-3));
    CHECK(hc.relative_spread <= 1e-3);
    CHECK(hc.per_radius.size() == 12);
  }
  // lambda^-2 (a v0)(lambda y) = lambda^(beta - 2) a v0(y)
  ScalarField u = harnack_field(k, 0.6, g);
  for (double lam : {0.5, 2.0}) {
    ScalarField v = quadratic_rescale(u, lam);
    const Window w = lam < 1.0 ? Window{0.5, 1.5} : Window{0.25, 0.75};
    CHECK(harnack_coefficient(v, k, w).a == doctest::Approx(0.6 * std::pow(lam, k.beta_minus - 2.0)).epsilon(2e-3));
  }
  CHECK(harnack_coefficient(ScalarField::sample(g, make_pc(k, Sign::Minus)), k, {0.5, 1.5}).a ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conical indicator on radial model fields") {
  auto g = make_grid(1.0 / 256.0, 1.0);
  const std::vector<double> ladder = {0.125, 0.125 / std::sqrt(2.0), 0.0625, 0.0625 / std::sqrt(2.0), 0.03125};
  // F(r) = r^p / (p (p - 1)): eigenvalues r^(p-2) and r^(p-2) / (p - 1)
  const double p = 2.5;
  ScalarField cone = ScalarField::sample(g, [&](const Vec2& x) { return std::pow(x.norm(), p) / (p * (p - 1)); });
  ConicalIndicator ci = conical_indicator(HessianField(cone), 1.0, ladder);
  CHECK(ci.verdict == ConicalVerdict::Conical);
  CHECK(ci.monotone);
  REQUIRE(ci.fit.has_value());
  CHECK(ci.fit->slope == doctest::Approx(p - 2.0).epsilon(2e-2));

  ConicalIndicator reg = conical_indicator(HessianField(ScalarField::sample(g, family_quadratic(0.0, 0.0))), 1.0, ladder);
  CHECK(reg.verdict == ConicalVerdict::Regular);
  CHECK_FALSE(reg.monotone);

  ScalarField shallow = ScalarField::sample(g, [](const Vec2& x) { return 0.05 * x.squaredNorm(); });
  CHECK(conical_indicator(HessianField(shallow), 1.0, ladder).verdict == ConicalVerdict::Indeterminate);
  CHECK(conical_indicator(HessianField(shallow), 0.01, ladder).verdict == ConicalVerdict::Regular);

  CHECK_THROWS_AS(conical_indicator(HessianField(cone), 1.0, {0.1, 0.09, 0.08}), InsufficientDataError);
  CHECK_THROWS_AS(conical_indicator(HessianField(cone), 1.0, {0.1, 0.09, 0.08, 0.02}), ExtentError);
  CHECK_THROWS_AS(conical_indicator(HessianField(cone), 1.0, {0.1, 0.12, 0.08, 0.04}), DomainError);
}

TEST_CASE("ordering and Hessian limit") {
  auto g = make_grid(1.0 / 16.0, 4.0);
  AngleConstants k = make_angle_constants(0.5);
  ScalarField lo = ScalarField::sample(g, make_pc(k, Sign::Minus));
  ScalarField hi = ScalarField::sample(g, make_pc(k, Sign::Plus));
  CHECK(ordering_check(lo, hi).ordered);
  OrderingResult rev = ordering_check(hi, lo);
  CHECK_FALSE(rev.ordered);
  CHECK(rev.max_excess == doctest::Approx(2.0 * std::sqrt(0.5) * 16.0));
  CHECK_THROWS_AS(ordering_check(lo, ScalarField::sample(make_grid(0.125, 4.0), make_pc(k, Sign::Minus))), GridError);

  HessianField H(lo);
  CHECK(hessian_limit_at_infinity(H, k, default_far_window(*g)).max_deviation <= 1e-10);
  HessianField Hp(hi);
  CHECK(hessian_limit_at_infinity(Hp, k, default_far_window(*g)).max_deviation ==
        doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-9));
}
