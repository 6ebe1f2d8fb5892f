// Acceptance suite: one PASS/FAIL line per criterion. With item numbers as
// arguments only those run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "macorner/asymptotics/analyses.hpp"
#include "macorner/asymptotics/hessian.hpp"
#include "macorner/classifier/classifier.hpp"
#include "macorner/global/shooting.hpp"
#include "macorner/harmonic/laplace_sector.hpp"
#include "macorner/harmonic/sector_modes.hpp"
#include "macorner/model/quadratic.hpp"
#include "macorner/model/rescale.hpp"

using namespace macorner;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const SolverConfig kSolver{};

// Shooting results shared between items.
struct Fields {
  std::map<double, ShootingResult> bar8, under8;
  std::optional<ShootingResult> bar16;
  double bar16_seconds = 0.0;

  const ShootingResult& pbar8(double c) {
    auto it = bar8.find(c);
    if (it == bar8.end()) it = bar8.emplace(c, shoot_pbar(make_angle_constants(c), 8.0, 1.0 / 32.0, kSolver)).first;
    return it->second;
  }
  const ShootingResult& punder8(double c) {
    auto it = under8.find(c);
    if (it == under8.end())
      it = under8.emplace(c, shoot_punder(make_angle_constants(c), 8.0, 1.0 / 32.0, kSolver)).first;
    return it->second;
  }
  const ShootingResult& pbar16() {
    if (!bar16) {
      ShootingOptions o;
      o.coarse_presolve = true;
      const auto t0 = Clock::now();
      bar16 = shoot_pbar(make_angle_constants(0.75), 16.0, 1.0 / 64.0, kSolver, o);
      bar16_seconds = seconds_since(t0);
    }
    return *bar16;
  }
};

Fields fields;

Outcome quadratic_exactness() {
  auto g = make_grid(1.0 / 32.0, 4.0);
  double worst = 0.0;
  auto run = [&](double c, const QuadraticPolynomial& p) {
    auto [u, rep] = solve_dirichlet(make_constant_rhs_problem(g, c, [p](const Vec2& x) { return p(x); }), kSolver);
    for (std::size_t n = 0; n < g->size(); ++n) worst = std::max(worst, std::abs(u[n] - p(g->point(n))));
  };
  for (double c : {0.25, 0.5, 0.75})
    for (Sign s : {Sign::Plus, Sign::Minus}) run(c, make_pc(make_angle_constants(c), s));
  run(1.0, quadratic_q());
  return {worst <= 1e-8, fmt("max nodewise error %.3e over P^+-, c = 0.25, 0.5, 0.75 and q at c = 1", worst)};
}

Outcome shooting_normalization() {
  const ShootingResult& bar = fields.pbar8(0.75);
  const ShootingResult& under = fields.punder8(0.75);
  const double two_s = 2.0 * make_angle_constants(0.75).s;
  std::optional<double> at0, at2s;
  for (const auto& [t, v] : bar.bracket_history) {
    if (t == 0.0) at0 = v;
    if (t == two_s) at2s = v;
  }
  if (!at0 || !at2s) return {false, "bracket history lacks an endpoint"};
  const double e0 = std::abs(*at0 - 0.5), e1 = std::abs(*at2s - 1.5);
  const double fin = std::abs(bar.field->value_at_unit_point() - 1.0);
  const double und = std::abs(under.field->value_at_unit_point());
  const double half = under.field->interpolate(Vec2(0.5, 0.5));
  const bool ok = e0 <= 1e-8 && e1 <= 1e-8 && fin <= 1e-6 && und <= 1e-6 && half < 0.0;
  return {ok, fmt("endpoint errors %.1e %.1e, |u(1,1)-1| = %.1e (t* = %.8f); under |u(1,1)| = %.1e, u(1/2,1/2) = %.4f",
                  e0, e1, fin, bar.t_star, und, half)};
}

Outcome sandwich() {
  std::ostringstream os;
  bool ok = true;
  for (double c : {0.5, 0.75}) {
    const AngleConstants k = make_angle_constants(c);
    const ScalarField& bar = *fields.pbar8(c).field;
    const ScalarField& under = *fields.punder8(c).field;
    const QuadraticPolynomial pm = make_pc(k, Sign::Minus), pp = make_pc(k, Sign::Plus);
    const Grid2D& g = bar.grid();
    const double m = 4 * g.h();
    double g1 = 1e300, g2 = 1e300, g3 = 1e300;
    int nodes = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec2 x = g.point(n);
      if (x.minCoeff() <= m || x.maxCoeff() >= g.R() - m) continue;
      g1 = std::min(g1, pm(x) - under[n]);
      g2 = std::min(g2, bar[n] - pm(x));
      g3 = std::min(g3, pp(x) - bar[n]);
      ++nodes;
    }
    ok = ok && nodes > 0 && g1 >= -1e-6 && g2 >= -1e-6 && g3 >= -1e-6;
    os << fmt("c = %.2f: min gaps %.2e %.2e %.2e over %d nodes; ", c, g1, g2, g3, nodes);
  }
  return {ok, os.str()};
}

Outcome hessian_bounds() {
  const ShootingResult& bar = fields.pbar16();
  HessianAudit a = hessian_audit(hessian_field(*bar.field), make_angle_constants(0.75));
  const bool bounds = a.max_u11.value <= 1.02 && a.max_u22.value <= 1.02 && a.max_abs_u12.value <= 0.52;
  const bool time = fields.bar16_seconds <= 900.0;
  return {bounds && time, fmt("max u11 %.4f, max u22 %.4f, max |u12| %.4f; shooting %.0f s (limit 900)",
                              a.max_u11.value, a.max_u22.value, a.max_abs_u12.value, fields.bar16_seconds)};
}

Outcome mixed_limits() {
  const ScalarField& u = *fields.pbar16().field;
  U12Limits l = u12_limits(hessian_field(u), default_near_window(u.grid()), default_far_window(u.grid()));
  const bool ok = l.near >= 0.45 && l.near <= 0.55 && l.far >= -0.55 && l.far <= -0.45;
  return {ok, fmt("near median u12 %.4f (want [0.45, 0.55]), far median %.4f (want [-0.55, -0.45])", l.near, l.far)};
}

Outcome exponents() {
  const ScalarField& u = *fields.pbar16().field;
  const AngleConstants k = make_angle_constants(0.75);
  DeviationExponent dp = deviation_exponent(u, make_pc(k, Sign::Plus), default_near_window(u.grid()));
  DeviationExponent dm = deviation_exponent(u, make_pc(k, Sign::Minus), default_far_window(u.grid()));
  if (!dp.fit || !dm.fit) return {false, "degenerate deviation profile"};
  const bool ok = dp.fit->slope >= 2.05 && dm.fit->slope >= 1.35 && dm.fit->slope <= 1.65;
  return {ok, fmt("near slope vs P^+ %.4f (want >= 2.05), far slope vs P^- %.4f (want [1.35, 1.65])", dp.fit->slope,
                  dm.fit->slope)};
}

Outcome harnack() {
  const AngleConstants k = make_angle_constants(0.75);
  const ScalarField& u = *fields.pbar16().field;
  const Window fw = default_far_window(u.grid());
  HarnackCoefficient a = harnack_coefficient(u, k, fw);
  // lambda^-2 u(lambda x) carries a lambda^(beta - 2): the sqrt 2 factor is lambda = 1/2
  HarnackCoefficient half = harnack_coefficient(quadratic_rescale(u, 0.5), k, fw);
  const Window inner{fw.lo / 2, fw.hi / 2};
  HarnackCoefficient two = harnack_coefficient(quadratic_rescale(u, 2.0), k, inner);
  HarnackCoefficient base_inner = harnack_coefficient(u, k, inner);
  const ScalarField& under = *fields.punder8(0.75).field;
  HarnackCoefficient au = harnack_coefficient(under, k, default_far_window(under.grid()));
  const double ratio = half.a / a.a;
  const bool ok = a.a > 0.0 && a.relative_spread <= 0.15 && std::abs(ratio / std::sqrt(2.0) - 1.0) <= 0.10 && au.a < 0.0;
  return {ok, fmt("a(Pbar) %.4f spread %.1f%%; a(rescale 1/2)/a %.4f vs sqrt 2; a(rescale 2)/a %.4f vs 1/sqrt 2; "
                  "a(Punder) %.4f",
                  a.a, 100.0 * a.relative_spread, ratio, two.a / base_inner.a, au.a)};
}

Outcome trichotomy() {
  std::ostringstream os;
  bool ok = true;
  auto run = [&](const char* name, double f0, OuterBranch b, double h, RegularityKind want) {
    VertexData d;
    d.id = name;
    d.f0 = f0;
    ClassifyConfig cfg;
    cfg.branch = b;
    cfg.h = h;
    try {
      RegularityVerdict v = classify_vertex(d, cfg);
      ok = ok && v.kind == want;
      os << fmt("%s -> %s", name, to_string(v.kind).c_str());
      if (v.alpha) os << fmt(" (alpha %.3f)", *v.alpha);
    } catch (const std::exception& e) {
      ok = false;
      os << name << " -> error: " << e.what();
    }
    os << "; ";
  };
  run("c_eff 1.25", 1.25, OuterBranch::Given, 1.0 / 64.0, RegularityKind::Conical);
  run("Pbar 0.75", 0.75, OuterBranch::PBar, 1.0 / 32.0, RegularityKind::C2alpha);
  run("Punder 0.75", 0.75, OuterBranch::PUnder, 1.0 / 32.0, RegularityKind::Conical);
  run("c_eff 1", 1.0, OuterBranch::Given, 1.0 / 32.0, RegularityKind::C2);
  return {ok, os.str()};
}

Outcome log_modulus() {
  const auto t0 = Clock::now();
  LogModulusResult r = log_modulus_experiment(0.1, LogModulusConfig{});
  const double t = seconds_since(t0);
  const bool ok = r.min_excess >= -1e-8 && r.variation <= 2.0 && t <= 1200.0;
  return {ok, fmt("min(u - q) %.2e, variation of u12 |log r| %.3f over %zu radii, %.0f s (limit 1200)", r.min_excess,
                  r.variation, r.profile.size(), t)};
}

Outcome harmonic() {
  const AngleConstants k = make_angle_constants(0.75);
  auto fn = [&](const Vec2& x) { return v0(k, x); };
  std::vector<double> res;
  double C = 0.0;
  for (double h : {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0}) {
    res.push_back(lattice_laplacian(k, fn, h, 0.5, 2.0).max_abs);
    C = std::max(C, res.back() / (h * h));
  }
  const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
  SectorMode m = make_v1(k, 1.0);
  LatticeLaplacianReport lr = lattice_laplacian(k, [&](const Vec2& x) { return m.value(x); }, 1.0 / 64.0, 0.05, 2.0);
  DecayReport d = sector_decay_check(k, 1.8, {0.2, 0.1, 0.05}, 1.0 / 32.0);
  std::ostringstream seq;
  for (const auto& s : d.samples) seq << fmt(" %.3f", s.normalized_max);
  const bool ok = std::min(o1, o2) >= 1.9 && lr.max_value < 0.0 && m.margin < 0.0 && d.normalized_decreasing;
  return {ok, fmt("v0 residual C = %.3f, orders %.2f %.2f; v1 max lattice Laplacian %.3f; decay%s", C, o1, o2,
                  lr.max_value, seq.str().c_str())};
}

Outcome comparison() {
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto g = make_grid(1.0 / 16.0, 2.0);
  int ordered = 0;
  double worst = -1e300;
  for (int i = 0; i < 20; ++i) {
    QuadraticPolynomial p;
    p.h11 = 0.5 + 1.5 * u(rng);
    p.h22 = 0.5 + 1.5 * u(rng);
    p.h12 = (2.0 * u(rng) - 1.0) * 0.8 * std::sqrt(p.h11 * p.h22);
    p.b = Vec2(u(rng) - 0.5, u(rng) - 0.5);
    const double f = 0.25 + u(rng);
    const double lift = 0.05 + 0.5 * u(rng), w1 = 1.0 + 4.0 * u(rng), w2 = 1.0 + 4.0 * u(rng);
    PointFunction lo = [p](const Vec2& x) { return p(x); };
    PointFunction hi = [p, lift, w1, w2](const Vec2& x) {
      return p(x) + lift * (1.0 + std::sin(w1 * x[0]) * std::cos(w2 * x[1]));
    };
    ComparisonResult r = comparison_check(make_constant_rhs_problem(g, f, lo), make_constant_rhs_problem(g, f, hi), kSolver);
    if (r.ordered) ++ordered;
    worst = std::max(worst, r.max_excess);
  }
  return {ordered == 20, fmt("%d of 20 pairs ordered, max(u_lo - u_hi) %.2e", ordered, worst)};
}

struct Item {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Item> items = {
      {1, "quadratic exactness", quadratic_exactness},
      {2, "shooting bracket and normalization", shooting_normalization},
      {3, "sandwich ordering", sandwich},
      {4, "Hessian bounds at R = 16, h = 1/64", hessian_bounds},
      {5, "mixed-derivative limits", mixed_limits},
      {6, "deviation exponents", exponents},
      {7, "Harnack coefficient and scaling", harnack},
      {8, "conical trichotomy", trichotomy},
      {9, "log-modulus sharpness", log_modulus},
      {10, "harmonic module", harmonic},
      {11, "comparison principle", comparison},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Item& it : items) {
    if (!wanted.empty() && !wanted.count(it.number)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", it.number, it.name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
