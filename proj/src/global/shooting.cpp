#include "macorner/global/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "macorner/errors.hpp"

namespace macorner {

std::pair<ScalarField, SolveReport> solve_family_member(const AngleConstants& k, double t, double R, double h,
                                                        const SolverConfig& config, GridShape shape) {
  if (!(k.c > 0.0 && k.c < 1.0)) throw DomainError("family members need 0 < c < 1");
  if (!(t > -1.0 && t <= 2.0 * k.s + 1e-15)) throw DomainError("family parameter t must lie in (-1, 2s]");
  return solve_dirichlet(make_family_problem(make_grid(h, R, shape), k.c, t), config);
}

namespace {

/// Solves family members on one grid, warm-starting every solve from the
/// nearest parameter already solved.
class FamilyEvaluator {
public:
  FamilyEvaluator(const AngleConstants& k, std::shared_ptr<const Grid2D> grid, const SolverConfig& cfg)
      : k_(k), grid_(std::move(grid)), cfg_(cfg) {}

  struct Entry {
    double t;
    ScalarField u;
    SolveReport report;
  };

  /// Uses field as if it solved the member t (an interpolated coarse solution).
  void seed(double t, ScalarField field) { seed_.emplace(Entry{t, std::move(field), {}}); }

  const Entry& solve(double t) {
    for (const auto& e : cache_) {
      if (e->t == t) return *e;
    }
    const DirichletProblem problem = make_family_problem(grid_, k_.c, t);
    const Entry* from = nearest(t, nullptr);
    std::optional<std::pair<ScalarField, SolveReport>> sol;
    if (!from || t == 0.0 || t == 2.0 * k_.s) {
      // the data are the exact quadratic solution here
      sol.emplace(solve_dirichlet(problem, cfg_));
    } else if (const Entry* other = nearest(t, from); other && other->t != from->t) {
      // the data are affine in t, so the secant guess has exact boundary values
      const double w = (t - from->t) / (other->t - from->t);
      ScalarField guess = from->u;
      for (std::size_t n = 0; n < guess.values().size(); ++n) guess[n] += w * (other->u[n] - from->u[n]);
      try {
        sol.emplace(solve_dirichlet(problem, cfg_, &guess));
      } catch (const SolverError&) {
        sol.emplace(solve_stepping(problem, t, *from, 0));
      }
    } else {
      sol.emplace(solve_stepping(problem, t, *from, 0));
    }
    cache_.push_back(std::make_unique<Entry>(Entry{t, std::move(sol->first), sol->second}));
    ++evaluations_;
    return *cache_.back();
  }

  double value(double t) { return solve(t).u.value_at_unit_point(); }
  int evaluations() const { return evaluations_; }

private:
  /// Entry closest to t other than skip.
  const Entry* nearest(double t, const Entry* skip) const {
    const Entry* best = seed_ && &*seed_ != skip ? &*seed_ : nullptr;
    for (const auto& e : cache_) {
      if (e.get() == skip) continue;
      if (!best || std::abs(e->t - t) < std::abs(best->t - t)) best = e.get();
    }
    return best;
  }

  std::pair<ScalarField, SolveReport> solve_stepping(const DirichletProblem& problem, double t, const Entry& from,
                                                     int depth) {
    const DirichletProblem from_problem = make_family_problem(grid_, k_.c, from.t);
    try {
      return solve_dirichlet(problem, cfg_, from.u, from_problem);
    } catch (const SolverError&) {
      if (depth >= 4) throw;
    }
    // split the parameter step
    const double mid = 0.5 * (from.t + t);
    auto half = solve_stepping(make_family_problem(grid_, k_.c, mid), mid, from, depth + 1);
    Entry mid_entry{mid, std::move(half.first), half.second};
    return solve_stepping(problem, t, mid_entry, depth + 1);
  }

  AngleConstants k_;
  std::shared_ptr<const Grid2D> grid_;
  SolverConfig cfg_;
  std::vector<std::unique_ptr<Entry>> cache_;
  std::optional<Entry> seed_;
  int evaluations_ = 0;
};

void check_monotone(std::vector<std::pair<double, double>> history) {
  std::sort(history.begin(), history.end());
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (history[k].first > history[k - 1].first && !(history[k].second > history[k - 1].second)) {
      throw ConsistencyError("u_t(1,1) is not increasing in t: u(" + std::to_string(history[k - 1].first) +
                             ") = " + std::to_string(history[k - 1].second) + ", u(" +
                             std::to_string(history[k].first) + ") = " + std::to_string(history[k].second));
    }
  }
}

ScalarField interpolate_onto(const ScalarField& coarse, std::shared_ptr<const Grid2D> fine,
                             const DirichletProblem& fine_problem) {
  return ScalarField::sample(fine, [&](const Vec2& x) {
    try {
      return coarse.interpolate(x);
    } catch (const ExtentError&) {
      return fine_problem.boundary(x);
    }
  });
}

enum class Branch { Bar, Under };

ShootingResult shoot(const AngleConstants& k, double R, double h, const SolverConfig& config,
                     const ShootingOptions& options, Branch branch) {
  if (!(k.c > 0.0 && k.c < 1.0)) throw DomainError("shooting needs 0 < c < 1");
  if (R < 4.0 - 1e-12) throw DomainError("shooting needs R >= 4");
  auto grid = make_grid(h, R, options.shape);
  grid->node_at(Vec2(1.0, 1.0));

  ShootingResult out;
  out.c = k.c;
  out.R = R;
  out.h = h;
  out.target = branch == Branch::Bar ? 1.0 : 0.0;

  FamilyEvaluator eval(k, grid, config);
  auto& history = out.bracket_history;
  auto record = [&](double t) {
    const double v = eval.value(t);
    history.emplace_back(t, v);
    return v;
  };

  // Optional coarse pass: its t* and field start the fine search.
  std::optional<double> t_hint;
  double slope_hint = 0.0;
  const double h2 = 2.0 * h;
  const bool coarse_ok = options.coarse_presolve && std::abs(1.0 / h2 - std::round(1.0 / h2)) < 1e-9 &&
                         std::abs(R / h2 - std::round(R / h2)) < 1e-9;
  if (coarse_ok) {
    ShootingOptions copt = options;
    copt.coarse_presolve = false;
    ShootingResult coarse = shoot(k, R, h2, config, copt, branch);
    t_hint = coarse.t_star;
    auto hist = coarse.bracket_history;
    std::sort(hist.begin(), hist.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < hist.size(); ++j) {
      const double mid = 0.5 * (hist[j].first + hist[j - 1].first);
      if (std::abs(mid - coarse.t_star) < best && hist[j].first > hist[j - 1].first) {
        best = std::abs(mid - coarse.t_star);
        slope_hint = (hist[j].second - hist[j - 1].second) / (hist[j].first - hist[j - 1].first);
      }
    }
    const DirichletProblem fine_problem = make_family_problem(grid, k.c, coarse.t_star);
    eval.seed(coarse.t_star, interpolate_onto(*coarse.field, grid, fine_problem));
  }

  double lo, hi, f_lo, f_hi;
  if (branch == Branch::Bar) {
    lo = 0.0;
    hi = 2.0 * k.s;
    f_lo = record(lo) - out.target;
    f_hi = record(hi) - out.target;
  } else {
    hi = 0.0;
    f_hi = record(hi) - out.target;
    if (!(f_hi > 0.0)) throw ConsistencyError("u_0(1,1) should be positive on the lower branch");
    lo = hi;
    f_lo = f_hi;
    if (!t_hint) {
      // march down until u_t(1,1) changes sign
      while (f_lo > 0.0) {
        hi = lo;
        f_hi = f_lo;
        lo = std::max(lo - options.march_step, -1.0 + 1e-3);
        if (lo <= -1.0 + 1e-3 && hi <= -1.0 + 1e-3) {
          throw ConsistencyError("u_t(1,1) stays positive down to t = -1");
        }
        f_lo = record(lo) - out.target;
      }
    }
  }
  if (!t_hint && !(f_lo < 0.0 && f_hi > 0.0)) {
    throw ConsistencyError("shooting endpoints do not bracket the target");
  }

  if (t_hint) {
    // narrow the bracket around the coarse root using the fine values
    const double t0 = std::clamp(*t_hint, branch == Branch::Bar ? lo : -1.0 + 1e-3, hi);
    const double f0 = record(t0) - out.target;
    double slope = slope_hint > 0.0 ? slope_hint : 1.0;
    double step = -f0 / slope;
    double ta = t0, fa = f0;
    for (int tries = 0; tries < 8; ++tries) {
      const double tb = branch == Branch::Bar ? std::clamp(ta + 1.5 * step, 0.0, 2.0 * k.s)
                                              : std::clamp(ta + 1.5 * step, -1.0 + 1e-3, 0.0);
      const double fb = record(tb) - out.target;
      if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) {
        lo = std::min(ta, tb);
        hi = std::max(ta, tb);
        f_lo = ta < tb ? fa : fb;
        f_hi = ta < tb ? fb : fa;
        break;
      }
      if (tb != ta) slope = (fb - fa) / (tb - ta);
      if (!(slope > 0.0)) {
        check_monotone(history);
        throw ConsistencyError("non-increasing shooting function near the coarse root");
      }
      ta = tb;
      fa = fb;
      step = -fa / slope * 2.0;
      if (tries == 7) throw ConsistencyError("could not bracket the target near the coarse root");
    }
  }
  check_monotone(history);
  out.lo = lo;
  out.hi = hi;

  BisectOptions bo;
  bo.method = options.method;
  bo.f_lo = f_lo;
  bo.f_hi = f_hi;
  const RootResult root = bisect([&](double t) { return record(t) - out.target; }, lo, hi, options.tol_x,
                                 options.tol_f, bo);
  check_monotone(history);

  const auto& entry = eval.solve(root.root);
  out.t_star = root.root;
  out.field = entry.u;
  out.field->meta().provenance = branch == Branch::Bar ? "shoot_pbar" : "shoot_punder";
  out.report = entry.report;
  out.evaluations = eval.evaluations();
  const double final_value = out.field->value_at_unit_point();
  if (std::abs(final_value - out.target) > 1e-6) {
    throw SolverError("shooting stopped with u(1,1) = " + std::to_string(final_value), final_value - out.target);
  }
  return out;
}

}  // namespace

ShootingResult shoot_pbar(const AngleConstants& k, double R, double h, const SolverConfig& config,
                          const ShootingOptions& options) {
  return shoot(k, R, h, config, options, Branch::Bar);
}

ShootingResult shoot_punder(const AngleConstants& k, double R, double h, const SolverConfig& config,
                            const ShootingOptions& options) {
  return shoot(k, R, h, config, options, Branch::Under);
}

nlohmann::json to_json(const ShootingResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [t, v] : r.bracket_history) hist.push_back({t, v});
  return {{"c", r.c},
          {"t_star", r.t_star},
          {"target", r.target},
          {"R", r.R},
          {"h", r.h},
          {"bracket_history", hist},
          {"bracket", {r.lo, r.hi}},
          {"evaluations", r.evaluations},
          {"value_at_unit_point", r.field ? r.field->value_at_unit_point() : NAN},
          {"report", to_json(r.report)}};
}

ExtrapolationReport extrapolate_R(const std::vector<const ShootingResult*>& results, double region_radius) {
  if (results.size() < 2) throw GridError("extrapolation needs at least two results");
  std::vector<const ShootingResult*> sorted = results;
  for (const auto* r : sorted) {
    if (!r || !r->field) throw GridError("extrapolation input without field");
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->R < b->R; });
  const double h = sorted.front()->field->grid().h();
  for (const auto* r : sorted) {
    if (std::abs(r->field->grid().h() - h) > 1e-12 * h) throw GridError("extrapolation needs a common spacing");
  }
  ExtrapolationReport rep;
  rep.region_radius = region_radius;
  const Grid2D& g0 = sorted.front()->field->grid();
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    const ScalarField& a = *sorted[k - 1]->field;
    const ScalarField& b = *sorted[k]->field;
    double dmax = 0.0;
    for (int j = 0; j <= g0.n(); ++j) {
      for (int i = 0; i <= g0.n(); ++i) {
        if (!a.grid().is_active(i, j) || !b.grid().is_active(i, j)) continue;
        const Vec2 x = g0.point(i, j);
        if (region_radius > 0.0 && x.norm() > region_radius * (1.0 + 1e-12)) continue;
        dmax = std::max(dmax, std::abs(a.at(i, j) - b.at(i, j)));
      }
    }
    rep.pairs.push_back({sorted[k - 1]->R, sorted[k]->R, dmax});
  }
  for (std::size_t k = 1; k < rep.pairs.size(); ++k) {
    if (!(rep.pairs[k].max_difference < rep.pairs[k - 1].max_difference)) rep.decreasing = false;
  }
  rep.decay_ratio = NAN;
  if (rep.pairs.size() >= 2) {
    bool positive = true;
    for (const auto& p : rep.pairs) positive = positive && p.max_difference > 0.0;
    if (positive) {
      const int n = static_cast<int>(rep.pairs.size());
      double mx = 0.0, my = 0.0;
      for (int k = 0; k < n; ++k) {
        mx += k;
        my += std::log(rep.pairs[k].max_difference);
      }
      mx /= n;
      my /= n;
      double sxx = 0.0, sxy = 0.0;
      for (int k = 0; k < n; ++k) {
        sxx += (k - mx) * (k - mx);
        sxy += (k - mx) * (std::log(rep.pairs[k].max_difference) - my);
      }
      rep.decay_ratio = std::exp(sxy / sxx);
    }
  }
  return rep;
}

nlohmann::json to_json(const ExtrapolationReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"R_small", p.R_small}, {"R_large", p.R_large}, {"max_difference", p.max_difference}});
  }
  nlohmann::json j = {{"pairs", pairs}, {"decreasing", r.decreasing}, {"region_radius", r.region_radius}};
  j["decay_ratio"] = std::isfinite(r.decay_ratio) ? nlohmann::json(r.decay_ratio) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ShootingOptions& o) {
  return {{"shape", to_string(o.shape)},
          {"tol_f", o.tol_f},
          {"tol_x", o.tol_x},
          {"method", o.method == BracketMethod::Itp ? "itp" : "bisection"},
          {"coarse_presolve", o.coarse_presolve},
          {"march_step", o.march_step}};
}

ShootingOptions shooting_options_from_json(const nlohmann::json& j, ShootingOptions o) {
  try {
    if (j.contains("shape")) o.shape = grid_shape_from_string(j.at("shape").get<std::string>());
    if (j.contains("tol_f")) o.tol_f = j.at("tol_f").get<double>();
    if (j.contains("tol_x")) o.tol_x = j.at("tol_x").get<double>();
    if (j.contains("method")) {
      auto m = j.at("method").get<std::string>();
      if (m == "itp") o.method = BracketMethod::Itp;
      else if (m == "bisection") o.method = BracketMethod::Bisection;
      else throw InputError("shooting method must be itp or bisection, got " + m);
    }
    if (j.contains("coarse_presolve")) o.coarse_presolve = j.at("coarse_presolve").get<bool>();
    if (j.contains("march_step")) o.march_step = j.at("march_step").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("shooting options: ") + e.what());
  }
  if (!(o.tol_f > 0.0) || !(o.tol_x > 0.0) || !(o.march_step > 0.0)) {
    throw InputError("shooting tolerances and march step must be positive");
  }
  return o;
}

}  // namespace macorner
