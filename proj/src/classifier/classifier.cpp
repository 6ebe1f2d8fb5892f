#include "macorner/classifier/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "macorner/asymptotics/hessian.hpp"
#include "macorner/errors.hpp"
#include "macorner/model/angle_constants.hpp"

namespace macorner {

void VertexData::validate() const {
  if (!(f0 > 0.0) || !(p1 > 0.0) || !(p2 > 0.0) || !std::isfinite(f0) || !std::isfinite(p1) ||
      !std::isfinite(p2)) {
    std::ostringstream os;
    os << "vertex data needs f0, p1, p2 > 0 (got " << f0 << ", " << p1 << ", " << p2 << ")";
    throw DomainError(os.str());
  }
}

Normalization normalize_vertex(const VertexData& data) {
  data.validate();
  Normalization n;
  n.c_eff = data.f0 / (data.p1 * data.p2);
  Mat2 m = Mat2::Zero();
  m(0, 0) = 1.0 / std::sqrt(data.p1);
  m(1, 1) = 1.0 / std::sqrt(data.p2);
  n.map = AffineMap(m);
  return n;
}

namespace {

QuadraticPolynomial pull_back(const QuadraticPolynomial& p, const Mat2& m) {
  Mat2 h = m.transpose() * p.hessian() * m;
  QuadraticPolynomial out;
  out.h11 = h(0, 0);
  out.h12 = h(0, 1);
  out.h22 = h(1, 1);
  out.b = m.transpose() * p.b;
  out.d = p.d;
  return out;
}

}  // namespace

VertexData normalized_data(const VertexData& data, const Normalization& n) {
  const AffineMap map = n.map;
  const Mat2 m = map.matrix();
  const double jac2 = map.det() * map.det();
  VertexData out;
  out.id = data.id;
  out.f0 = data.f0 * jac2;
  out.p1 = data.p1 * m(0, 0) * m(0, 0);
  out.p2 = data.p2 * m(1, 1) * m(1, 1);
  if (data.rhs) out.rhs = [f = data.rhs, map, jac2](const Vec2& y) { return f(map(y)) * jac2; };
  if (data.boundary) out.boundary = [g = data.boundary, map](const Vec2& y) { return g(map(y)); };
  if (data.subsolution) out.subsolution = pull_back(*data.subsolution, m);
  return out;
}

VertexData denormalized_data(const VertexData& normalized, const Normalization& n) {
  Normalization inv;
  inv.c_eff = n.c_eff;
  inv.map = n.map.inverse();
  // Same transformation rules, with the inverse map; p1, p2 pick up 1/m^2.
  return normalized_data(normalized, inv);
}

nlohmann::json to_json(const SubsolutionMargin& m) {
  return {{"margin", m.margin}, {"strict", m.strict},   {"weak", m.weak},
          {"min_eigenvalue", m.min_eigenvalue}, {"tol", m.tol}, {"nodes", m.nodes}};
}

namespace {

SubsolutionMargin finish_margin(SubsolutionMargin m) {
  if (m.min_eigenvalue < -m.tol) {
    std::ostringstream os;
    os << "subsolution is not convex: minimum Hessian eigenvalue " << m.min_eigenvalue;
    throw ConvexityError(os.str());
  }
  m.strict = m.margin > m.tol;
  m.weak = std::abs(m.margin) <= m.tol;
  return m;
}

}  // namespace

SubsolutionMargin check_strict_subsolution(const QuadraticPolynomial& sub, const PointFunction& f,
                                           const Grid2D& grid, double tol) {
  if (!f) throw DomainError("subsolution check needs a right-hand side");
  SubsolutionMargin m;
  m.tol = tol;
  m.min_eigenvalue = min_eigenvalue(sub.hessian());
  m.margin = std::numeric_limits<double>::infinity();
  const double det = sub.hessian_det();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.kind(k) == NodeKind::Exterior) continue;
    m.margin = std::min(m.margin, det - f(grid.point(k)));
    ++m.nodes;
  }
  return finish_margin(m);
}

SubsolutionMargin check_strict_subsolution(const ScalarField& sub, const PointFunction& f, double tol) {
  if (!f) throw DomainError("subsolution check needs a right-hand side");
  HessianField H(sub);
  SubsolutionMargin m;
  m.tol = tol;
  m.min_eigenvalue = std::numeric_limits<double>::infinity();
  m.margin = std::numeric_limits<double>::infinity();
  const Grid2D& g = sub.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!H.valid(k)) continue;
    Mat2 a = H.at(k);
    m.min_eigenvalue = std::min(m.min_eigenvalue, min_eigenvalue(a));
    m.margin = std::min(m.margin, a.determinant() - f(g.point(k)));
    ++m.nodes;
  }
  if (m.nodes == 0) throw InsufficientDataError("subsolution field has no valid Hessian nodes");
  return finish_margin(m);
}

std::string to_string(RegularityKind k) {
  switch (k) {
    case RegularityKind::C2alpha: return "C2alpha";
    case RegularityKind::C2: return "C2";
    default: return "Conical";
  }
}

RegularityKind regularity_kind_from_string(const std::string& s) {
  if (s == "C2alpha") return RegularityKind::C2alpha;
  if (s == "C2") return RegularityKind::C2;
  if (s == "Conical") return RegularityKind::Conical;
  throw InputError("unknown regularity kind " + s);
}

nlohmann::json to_json(const RegularityVerdict& v) {
  nlohmann::json j = {{"kind", to_string(v.kind)}, {"c_eff", v.c_eff}, {"evidence", v.evidence}};
  j["alpha"] = v.alpha ? nlohmann::json(*v.alpha) : nlohmann::json(nullptr);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

std::string to_string(OuterBranch b) {
  switch (b) {
    case OuterBranch::Given: return "given";
    case OuterBranch::PBar: return "pbar";
    default: return "punder";
  }
}

OuterBranch outer_branch_from_string(const std::string& s) {
  if (s == "given") return OuterBranch::Given;
  if (s == "pbar") return OuterBranch::PBar;
  if (s == "punder") return OuterBranch::PUnder;
  throw InputError("outer branch must be given, pbar or punder; got " + s);
}

nlohmann::json to_json(const ClassifyConfig& c) {
  return {{"R", c.R},
          {"h", c.h},
          {"shape", to_string(c.shape)},
          {"branch", to_string(c.branch)},
          {"outer_t", c.outer_t},
          {"c_one_band", c.c_one_band},
          {"ladder_size", c.ladder_size},
          {"solver", to_json(c.solver)},
          {"shooting", to_json(c.shooting)},
          {"thresholds", {{"regular_fraction", c.thresholds.regular_fraction}, {"slope", c.thresholds.slope}}}};
}

ClassifyConfig classify_config_from_json(const nlohmann::json& j, ClassifyConfig c) {
  try {
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("h")) c.h = j.at("h").get<double>();
    if (j.contains("shape")) c.shape = grid_shape_from_string(j.at("shape").get<std::string>());
    if (j.contains("branch")) c.branch = outer_branch_from_string(j.at("branch").get<std::string>());
    if (j.contains("outer_t")) c.outer_t = j.at("outer_t").get<double>();
    if (j.contains("c_one_band")) c.c_one_band = j.at("c_one_band").get<double>();
    if (j.contains("ladder_size")) c.ladder_size = j.at("ladder_size").get<int>();
    if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"), c.solver);
    if (j.contains("shooting")) c.shooting = shooting_options_from_json(j.at("shooting"), c.shooting);
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("regular_fraction")) c.thresholds.regular_fraction = t.at("regular_fraction").get<double>();
      if (t.contains("slope")) c.thresholds.slope = t.at("slope").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("classify config: ") + e.what());
  }
  if (!(c.R > 0.0) || !(c.h > 0.0) || c.ladder_size < 4 || !(c.c_one_band >= 0.0)) {
    throw InputError("classify config needs R, h > 0, ladder_size >= 4, c_one_band >= 0");
  }
  return c;
}

std::vector<double> conical_ladder(double h, int size) {
  if (size < 4) throw InsufficientDataError("conical ladder needs at least 4 radii");
  std::vector<double> out;
  for (int i = size - 1; i >= 0; --i) out.push_back(8.0 * h * std::pow(std::sqrt(2.0), i));
  return out;
}

RegularityVerdict classify_vertex(const VertexData& data, const ClassifyConfig& config) {
  const Normalization nrm = normalize_vertex(data);
  const VertexData nd = normalized_data(data, nrm);
  const double c = nrm.c_eff;
  const bool at_one = std::abs(c - 1.0) <= config.c_one_band;
  const bool below = c < 1.0 && !at_one;

  RegularityVerdict v;
  v.c_eff = c;
  nlohmann::json ev;
  ev["normalization"] = {{"c_eff", c}, {"m11", nrm.map.matrix()(0, 0)}, {"m22", nrm.map.matrix()(1, 1)}};
  ev["config"] = to_json(config);
  const PointFunction rhs = nd.rhs ? nd.rhs : PointFunction([c](const Vec2&) { return c; });
  if (nd.subsolution) {
    auto g = make_grid(config.h, config.R, config.shape);
    ev["subsolution"] = to_json(check_strict_subsolution(*nd.subsolution, rhs, *g));
  }

  std::optional<ScalarField> field;
  if (config.branch != OuterBranch::Given) {
    if (!below) throw DomainError("pbar / punder outer data exist only for c_eff < 1");
    if (nd.boundary || nd.rhs) throw DomainError("shooting branches use the family data, not custom samplers");
    AngleConstants k = make_angle_constants(c);
    ShootingResult sr = config.branch == OuterBranch::PBar
                            ? shoot_pbar(k, config.R, config.h, config.solver, config.shooting)
                            : shoot_punder(k, config.R, config.h, config.solver, config.shooting);
    ev["shooting"] = to_json(sr);
    field = std::move(sr.field);
  } else {
    auto grid = make_grid(config.h, config.R, config.shape);
    DirichletProblem problem;
    if (!nd.boundary && !nd.rhs && c <= 1.0) {
      problem = make_family_problem(grid, c, config.outer_t);
    } else {
      PointFunction boundary = nd.boundary;
      if (!boundary) {
        QuadraticPolynomial outer = family_quadratic(c < 1.0 ? std::sqrt(1.0 - c) : 0.0, config.outer_t);
        boundary = [outer](const Vec2& x) { return outer(x); };
      }
      problem.grid = grid;
      problem.rhs = rhs;
      problem.boundary = boundary;
    }
    auto [u, report] = solve_dirichlet(problem, config.solver);
    ev["solve"] = to_json(report);
    field = std::move(u);
  }

  HessianField H(*field);
  const double h = field->grid().h();
  ConicalIndicator ind = conical_indicator(H, c, conical_ladder(h, config.ladder_size), config.thresholds);
  ev["conical"] = to_json(ind);

  Window near{8.0 * h, 16.0 * h};
  QuadraticPolynomial reference = below ? make_pc(make_angle_constants(c), Sign::Plus) : quadratic_q();
  std::optional<double> alpha;
  try {
    DeviationExponent dev = deviation_exponent(*field, reference, near);
    ev["deviation"] = to_json(dev);
    if (!dev.degenerate && dev.fit) alpha = dev.fit->slope - 2.0;
  } catch (const Error& e) {
    ev["deviation"] = {{"error", e.what()}};
  }
  try {
    ev["u12"] = to_json(u12_limits(H, near, default_far_window(field->grid())));
  } catch (const Error& e) {
    ev["u12"] = {{"error", e.what()}};
  }

  if (c > 1.0 && !at_one) {
    if (ind.verdict == ConicalVerdict::Regular) {
      throw ConsistencyError("c_eff = " + std::to_string(c) +
                             " > 1 admits no regular vertex, yet the conical indicator reports a regular one");
    }
    v.kind = RegularityKind::Conical;
    if (ind.verdict == ConicalVerdict::Indeterminate) v.note = "indicator indeterminate; conical by c_eff > 1";
  } else if (at_one) {
    v.kind = RegularityKind::C2;
    v.note = "c_eff = 1: C^2 at best, C^{2,alpha} fails in general (see the log-modulus experiment)";
  } else if (ind.verdict == ConicalVerdict::Regular) {
    if (!alpha || !(*alpha > 0.0)) {
      throw ConsistencyError("regular indicator at c_eff < 1 but no positive Holder exponent was measured");
    }
    v.kind = RegularityKind::C2alpha;
    v.alpha = alpha;
  } else {
    v.kind = RegularityKind::Conical;
    if (ind.verdict == ConicalVerdict::Indeterminate) v.note = "indicator indeterminate; not regular";
  }
  v.evidence = std::move(ev);
  return v;
}

std::vector<std::pair<VertexData, std::optional<ClassifyConfig>>> vertex_batch_from_json(
    const nlohmann::json& j, const ClassifyConfig& base) {
  if (!j.is_array()) throw InputError("vertex batch must be a JSON list");
  std::vector<std::pair<VertexData, std::optional<ClassifyConfig>>> out;
  static const char* known[] = {"id", "f0", "p1", "p2", "branch", "outer_t", "config"};
  for (const auto& rec : j) {
    if (!rec.is_object()) throw InputError("vertex record must be an object");
    for (const auto& [key, value] : rec.items()) {
      (void)value;
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
        throw InputError("unknown vertex record key " + key);
      }
    }
    VertexData d;
    std::optional<ClassifyConfig> cfg;
    try {
      d.id = rec.value("id", std::to_string(out.size()));
      d.f0 = rec.at("f0").get<double>();
      d.p1 = rec.at("p1").get<double>();
      d.p2 = rec.at("p2").get<double>();
      if (rec.contains("config") || rec.contains("branch") || rec.contains("outer_t")) {
        ClassifyConfig c = base;
        if (rec.contains("config")) c = classify_config_from_json(rec.at("config"), c);
        if (rec.contains("branch")) c.branch = outer_branch_from_string(rec.at("branch").get<std::string>());
        if (rec.contains("outer_t")) c.outer_t = rec.at("outer_t").get<double>();
        cfg = c;
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("vertex record: ") + e.what());
    }
    d.validate();
    out.emplace_back(std::move(d), std::move(cfg));
  }
  return out;
}

nlohmann::json to_json(const LogModulusResult& r) {
  nlohmann::json prof = nlohmann::json::array();
  for (const auto& p : r.profile) prof.push_back({p[0], p[1], p[2]});
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& s : r.reports) reps.push_back(to_json(s));
  return {{"epsilon", r.epsilon}, {"profile", prof},         {"fit", to_json(r.fit)},
          {"variation", r.variation}, {"min_excess", r.min_excess}, {"reports", reps}};
}

LogModulusResult log_modulus_experiment(double epsilon, const LogModulusConfig& cfg) {
  if (!(cfg.zoom > 0.0) || !(cfg.zoom < 1.0) || cfg.levels < 1 || cfg.samples_per_level < 1) {
    throw DomainError("log-modulus ladder needs 0 < zoom < 1 and at least one level");
  }
  const double rho_top = 0.5;
  const double rho_low = std::max(cfg.zoom * rho_top, 8.0 * cfg.h);
  if (cfg.zoom * rho_top < 8.0 * cfg.h * (1.0 - 1e-12)) {
    throw InsufficientDataError("zoom levels leave gaps: zoom * 0.5 is below 8h");
  }
  if (cfg.r_min < std::pow(cfg.zoom, cfg.levels - 1) * rho_low * (1.0 - 1e-12) || cfg.r_max > rho_top) {
    throw InsufficientDataError("zoom ladder does not reach the requested radii");
  }

  LogModulusResult res;
  res.epsilon = epsilon;
  res.min_excess = std::numeric_limits<double>::infinity();
  const QuadraticPolynomial q = quadratic_q();
  auto grid = make_grid(cfg.h, 1.0, GridShape::QuarterDisc);

  std::optional<ScalarField> prev;
  for (int level = 0; level < cfg.levels; ++level) {
    PointFunction boundary;
    if (level == 0) {
      boundary = [epsilon](const Vec2& y) { return 0.5 * y.squaredNorm() + epsilon * y[0] * y[1]; };
    } else {
      const ScalarField& u = *prev;
      const double lam = cfg.zoom;
      boundary = [&u, lam](const Vec2& y) {
        if (std::min(y[0], y[1]) <= 1e-12) return 0.5 * y.squaredNorm();
        return u.interpolate(lam * y) / (lam * lam);
      };
    }
    DirichletProblem problem = make_constant_rhs_problem(grid, 1.0, boundary);
    auto [u, report] = solve_dirichlet(problem, cfg.solver);
    res.reports.push_back(report);
    for (std::size_t k = 0; k < grid->size(); ++k) {
      if (grid->kind(k) == NodeKind::Exterior) continue;
      res.min_excess = std::min(res.min_excess, u[k] - q(grid->point(k)));
    }

    HessianField H(u);
    const double scale = std::pow(cfg.zoom, level);
    for (int s = 0; s < cfg.samples_per_level; ++s) {
      // geometric radii in (zoom * rho_top, rho_top]
      double rho = rho_top * std::pow(cfg.zoom, static_cast<double>(s) / cfg.samples_per_level);
      if (rho < rho_low) continue;
      double r = scale * rho;
      if (r < cfg.r_min * (1.0 - 1e-12) || r > cfg.r_max * (1.0 + 1e-12)) continue;
      auto arc = hessian_on_arc(H, rho);
      double acc = 0.0;
      for (const auto& m : arc) acc += m(0, 1);
      double u12 = acc / arc.size();
      res.profile.push_back({r, u12, u12 * std::abs(std::log(r))});
    }
    prev = std::move(u);
  }

  if (res.profile.size() < 3) throw InsufficientDataError("log-modulus ladder resolved fewer than 3 radii");
  std::vector<ProfilePoint> pts;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : res.profile) {
    pts.emplace_back(p[0], p[2]);
    lo = std::min(lo, p[2]);
    hi = std::max(hi, p[2]);
  }
  res.variation = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (lo > 0.0) res.fit = fit_loglog_slope(pts, cfg.r_min, cfg.r_max);
  return res;
}

}  // namespace macorner
