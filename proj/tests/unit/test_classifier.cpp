#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "macorner/classifier/classifier.hpp"
#include "macorner/errors.hpp"

using namespace macorner;

TEST_CASE("normalization reduces the vertex to det = c_eff with q on the axes") {
  VertexData d;
  d.f0 = 2.0;
  d.p1 = 4.0;
  d.p2 = 1.0;
  d.rhs = [](const Vec2& x) { return 2.0 + x[0]; };
  d.boundary = [](const Vec2& x) { return 2.0 * x[0] * x[0] + 0.5 * x[1] * x[1] + x[0] * x[1]; };
  QuadraticPolynomial sub;
  sub.h11 = 4.0;
  sub.h22 = 1.0;
  sub.h12 = 0.5;
  d.subsolution = sub;

  Normalization n = normalize_vertex(d);
  CHECK(n.c_eff == doctest::Approx(0.5));
  VertexData nd = normalized_data(d, n);
  CHECK(nd.f0 == doctest::Approx(0.5));
  CHECK(nd.p1 == doctest::Approx(1.0));
  CHECK(nd.p2 == doctest::Approx(1.0));
  // phi(map y) = q(y) + y1 y2 / 2
  for (Vec2 y : {Vec2(1.0, 0.0), Vec2(0.0, 2.0), Vec2(1.0, 1.0)}) {
    CHECK(nd.boundary(y) == doctest::Approx(0.5 * y.squaredNorm() + 0.5 * y[0] * y[1]));
    CHECK(nd.rhs(y) == doctest::Approx((2.0 + 0.5 * y[0]) / 4.0));
  }
  CHECK(nd.subsolution->h11 == doctest::Approx(1.0));
  CHECK(nd.subsolution->h12 == doctest::Approx(0.25));
  CHECK(nd.subsolution->hessian_det() == doctest::Approx(sub.hessian_det() / 4.0));

  VertexData back = denormalized_data(nd, n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Vec2 x(u(rng), u(rng));
    CHECK(back.boundary(x) == doctest::Approx(d.boundary(x)));
    CHECK(back.rhs(x) == doctest::Approx(d.rhs(x)));
  }
  CHECK(back.p1 == doctest::Approx(4.0));
  CHECK(back.subsolution->h12 == doctest::Approx(0.5));

  VertexData bad;
  bad.p1 = 0.0;
  CHECK_THROWS_AS(normalize_vertex(bad), DomainError);
}

TEST_CASE("strict subsolution margins") {
  auto g = make_grid(0.25, 2.0);
  QuadraticPolynomial sub;
  sub.h11 = 1.2;
  sub.h22 = 1.0;
  sub.h12 = 0.0;
  SubsolutionMargin strict = check_strict_subsolution(sub, [](const Vec2&) { return 1.0; }, *g);
  CHECK(strict.strict);
  CHECK(strict.margin == doctest::Approx(0.2));
  SubsolutionMargin weak = check_strict_subsolution(sub, [](const Vec2&) { return 1.2; }, *g);
  CHECK_FALSE(weak.strict);
  CHECK(weak.weak);
  SubsolutionMargin fails = check_strict_subsolution(sub, [](const Vec2& x) { return 1.0 + x[0]; }, *g);
  CHECK(fails.margin == doctest::Approx(1.2 - 3.0));
  CHECK_FALSE(fails.strict);
  CHECK_FALSE(fails.weak);

  QuadraticPolynomial saddle;
  saddle.h11 = 1.0;
  saddle.h22 = -1.0;
  CHECK_THROWS_AS(check_strict_subsolution(saddle, [](const Vec2&) { return 1.0; }, *g), ConvexityError);

  ScalarField field = ScalarField::sample(make_grid(1.0 / 16.0, 2.0), sub);
  SubsolutionMargin fm = check_strict_subsolution(field, [](const Vec2&) { return 1.0; });
  CHECK(fm.strict);
  CHECK(fm.margin == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("conical ladder") {
  auto l = conical_ladder(1.0 / 32.0, 5);
  REQUIRE(l.size() == 5);
  CHECK(l.back() == doctest::Approx(0.25));
  CHECK(l.front() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i - 1] / l[i] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("c_eff = 1 is classified C2 with a note") {
  VertexData d;
  d.id = "unit";
  d.f0 = 6.0;
  d.p1 = 2.0;
  d.p2 = 3.0;
  ClassifyConfig cfg;
  cfg.R = 4.0;
  cfg.h = 1.0 / 16.0;
  RegularityVerdict v = classify_vertex(d, cfg);
  CHECK(v.kind == RegularityKind::C2);
  CHECK(v.c_eff == doctest::Approx(1.0));
  CHECK_FALSE(v.note.empty());
  CHECK(to_json(v).at("kind") == "C2");
  CHECK(v.evidence.contains("conical"));
}

TEST_CASE("an exact P^- vertex shows no Holder gain") {
  VertexData d;
  d.f0 = 0.5;
  ClassifyConfig cfg;
  cfg.R = 4.0;
  cfg.h = 1.0 / 16.0;
  // the solution is P^- itself: |u - P^+| ~ r^2 exactly, so alpha = 0
  CHECK_THROWS_AS(classify_vertex(d, cfg), ConsistencyError);
  cfg.branch = OuterBranch::PBar;
  VertexData big = d;
  big.f0 = 2.0;
  CHECK_THROWS_AS(classify_vertex(big, cfg), DomainError);
}

TEST_CASE("classify configuration and vertex batches") {
  ClassifyConfig c;
  c.R = 16.0;
  c.branch = OuterBranch::PUnder;
  c.ladder_size = 6;
  ClassifyConfig back = classify_config_from_json(to_json(c));
  CHECK(back.R == 16.0);
  CHECK(back.branch == OuterBranch::PUnder);
  CHECK(back.ladder_size == 6);
  CHECK_THROWS_AS(classify_config_from_json({{"R", "large"}}), InputError);

  nlohmann::json batch = nlohmann::json::parse(R"([
    {"id": "a", "f0": 1.25, "p1": 1, "p2": 1},
    {"id": "b", "f0": 0.75, "p1": 1, "p2": 1, "branch": "pbar"},
    {"f0": 1.0, "p1": 2, "p2": 0.5, "outer_t": 0.1}
  ])");
  auto v = vertex_batch_from_json(batch, ClassifyConfig{});
  REQUIRE(v.size() == 3);
  CHECK(v[0].first.id == "a");
  CHECK_FALSE(v[0].second.has_value());
  CHECK(v[1].second->branch == OuterBranch::PBar);
  CHECK(v[2].first.id == "2");
  CHECK(v[2].second->outer_t == 0.1);
  CHECK_THROWS_AS(vertex_batch_from_json(nlohmann::json::parse(R"([{"f0": 1, "p1": 1}])"), {}), InputError);
  CHECK_THROWS_AS(vertex_batch_from_json(nlohmann::json::parse(R"([{"f0": 1, "p1": 1, "p2": 1, "x": 0}])"), {}),
                  InputError);
  CHECK_THROWS_AS(vertex_batch_from_json(nlohmann::json::parse(R"({"f0": 1})"), {}), InputError);
  CHECK(regularity_kind_from_string(to_string(RegularityKind::C2alpha)) == RegularityKind::C2alpha);
  CHECK_THROWS_AS(outer_branch_from_string("sideways"), InputError);
}

TEST_CASE("log-modulus ladder on a coarse lattice") {
  LogModulusConfig cfg;
  cfg.h = 1.0 / 32.0;
  cfg.zoom = 0.5;
  cfg.levels = 2;
  cfg.r_min = 0.13;
  cfg.r_max = 0.5;
  cfg.samples_per_level = 4;
  LogModulusResult r = log_modulus_experiment(0.1, cfg);
  CHECK(r.profile.size() >= 6);
  for (std::size_t i = 1; i < r.profile.size(); ++i) CHECK(r.profile[i][0] < r.profile[i - 1][0]);
  for (const auto& p : r.profile) {
    CHECK(p[1] > 0.0);
    CHECK(p[2] == doctest::Approx(p[1] * std::abs(std::log(p[0]))));
  }
  CHECK(r.min_excess >= -1e-8);
  CHECK(r.reports.size() == 2);

  LogModulusResult zero = log_modulus_experiment(0.0, cfg);
  for (const auto& p : zero.profile) CHECK(std::abs(p[1]) <= 1e-8);

  cfg.r_min = 0.01;
  CHECK_THROWS_AS(log_modulus_experiment(0.1, cfg), InsufficientDataError);
  cfg.zoom = 1.5;
  CHECK_THROWS_AS(log_modulus_experiment(0.1, cfg), DomainError);
}
