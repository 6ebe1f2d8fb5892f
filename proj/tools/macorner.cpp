// Command-line front end: solve, pbar, punder, asymptotics, classify,
// laplace-sector, sweep. Every run writes under --out DIR and leaves a
// manifest.json naming its artifacts and the hash of the effective config.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "macorner/asymptotics/analyses.hpp"
#include "macorner/asymptotics/hessian.hpp"
#include "macorner/classifier/classifier.hpp"
#include "macorner/errors.hpp"
#include "macorner/global/shooting.hpp"
#include "macorner/harmonic/laplace_sector.hpp"
#include "macorner/ma_solver/solver.hpp"
#include "macorner/model/field_io.hpp"
#include "macorner/numerics/linear_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace macorner;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

// One flat namespace shared by flags and the JSON config file.
json default_config() {
  return {{"c", nullptr},
          {"t", 0.0},
          {"R", 8.0},
          {"h", 0.03125},
          {"shape", "square"},
          {"near-lo", nullptr},
          {"near-hi", nullptr},
          {"far-lo", nullptr},
          {"far-hi", nullptr},
          {"newton-tol", 1e-9},
          {"max-newton", 60},
          {"tol-f", 5e-7},
          {"tol-x", 1e-8},
          {"coarse-presolve", false},
          {"seed", 1},
          {"threads", nullptr},
          {"verbosity", 0},
          {"field", nullptr},
          {"analyses", "all"},
          {"vertices", nullptr},
          {"f0", nullptr},
          {"p1", 1.0},
          {"p2", 1.0},
          {"branch", "given"},
          {"outer-t", 0.0},
          {"rho", json::array({0.2, 0.1, 0.05})},
          {"beta", 1.8},
          {"cs", json::array({0.5, 0.75})},
          {"branches", "pbar,punder"},
          {"out", "out"}};
}

struct FlagHelp {
  const char* key;
  const char* help;
};

const FlagHelp kFlags[] = {
    {"c", "right-hand side constant c"},
    {"t", "outer coefficient t in P_c^- + t x1 x2"},
    {"R", "truncation radius"},
    {"h", "lattice spacing"},
    {"shape", "square | quarter-disc"},
    {"near-lo", "near window lower radius"},
    {"near-hi", "near window upper radius"},
    {"far-lo", "far window lower radius"},
    {"far-hi", "far window upper radius"},
    {"newton-tol", "Newton residual tolerance"},
    {"max-newton", "Newton iteration cap"},
    {"tol-f", "shooting tolerance on u(1,1)"},
    {"tol-x", "shooting tolerance on t"},
    {"seed", "seed for randomized checks"},
    {"threads", "parallelism cap (default MA_CORNER_THREADS or 1)"},
    {"verbosity", "solver log level"},
    {"field", "field stem or CSV path"},
    {"analyses", "comma list: u12-limits,alpha,beta,coeff-a,conical,hessian-audit or all"},
    {"vertices", "JSON list of vertex records"},
    {"f0", "vertex right-hand side"},
    {"p1", "vertex phi_11(0)"},
    {"p2", "vertex phi_22(0)"},
    {"branch", "outer data: given | pbar | punder"},
    {"outer-t", "outer coefficient for the given branch"},
    {"rho", "comma list of inner radii"},
    {"beta", "growth exponent of the arc data"},
    {"cs", "comma list of c values"},
    {"branches", "comma list of pbar, punder"},
    {"out", "output directory"},
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw InputError("bad number in list: " + item);
    out.push_back(v);
  }
  return out;
}

// Converts a raw flag string to the JSON type of its default.
json coerce(const std::string& key, const std::string& raw, const json& dflt) {
  try {
    if (dflt.is_array()) return parse_list(raw);
    if (dflt.is_boolean()) return raw == "true" || raw == "1";
    if (dflt.is_number_integer()) {
      std::size_t used = 0;
      long v = std::stol(raw, &used);
      if (used != raw.size()) throw InputError("");
      return v;
    }
    if (dflt.is_string() || key == "field" || key == "vertices") return raw;
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("bad value for --" + key + ": " + raw);
  }
}

json load_config_file(const std::string& path, const json& defaults) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InputError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError("config file must hold a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!defaults.contains(k)) throw InputError("unknown config key " + k);
    (void)v;
  }
  return j;
}

template <class T>
T get(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("missing or malformed value for ") + key);
  }
}

double require_number(const json& cfg, const char* key) {
  if (cfg.at(key).is_null()) throw InputError(std::string("--") + key + " is required");
  return get<double>(cfg, key);
}

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, text.data(), text.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

class Run {
public:
  Run(std::string command, json cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {
    dir_ = get<std::string>(cfg_, "out");
    fs::create_directories(dir_);
  }

  const json& cfg() const { return cfg_; }

  void write_json(const std::string& name, const json& j, const std::string& kind) {
    std::ofstream os(dir_ / name);
    os << j.dump(2) << '\n';
    if (!os) throw Error("cannot write " + (dir_ / name).string());
    add(name, kind);
  }

  void write_field(const std::string& stem, const ScalarField& u) {
    save_field(u, dir_ / stem);
    add(stem + ".csv", "field");
    add(stem + ".json", "field-metadata");
  }

  std::ofstream open(const std::string& name, const std::string& kind) {
    add(name, kind);
    return std::ofstream(dir_ / name);
  }

  void finish() {
    std::sort(artifacts_.begin(), artifacts_.end(),
              [](const json& a, const json& b) { return a["path"] < b["path"]; });
    json hashed = cfg_;
    hashed.erase("out");
    hashed.erase("threads");
    json manifest = {{"command", command_},
                     {"config", cfg_},
                     {"config_hash", sha256_hex(hashed.dump())},
                     {"linear_backend", linear_backend_name()},
                     {"artifacts", artifacts_}};
    std::ofstream os(dir_ / "manifest.json");
    os << manifest.dump(2) << '\n';
  }

private:
  void add(const std::string& name, const std::string& kind) {
    std::lock_guard<std::mutex> lock(mu_);
    artifacts_.push_back({{"path", name}, {"kind", kind}});
  }

  std::string command_;
  json cfg_;
  fs::path dir_;
  json artifacts_ = json::array();
  std::mutex mu_;
};

SolverConfig solver_config(const json& cfg) {
  SolverConfig s;
  s.newton_tol = get<double>(cfg, "newton-tol");
  s.max_newton = get<int>(cfg, "max-newton");
  s.verbosity = get<int>(cfg, "verbosity");
  s.validate();
  return s;
}

ShootingOptions shooting_options(const json& cfg) {
  ShootingOptions o;
  o.shape = grid_shape_from_string(get<std::string>(cfg, "shape"));
  o.tol_f = get<double>(cfg, "tol-f");
  o.tol_x = get<double>(cfg, "tol-x");
  o.coarse_presolve = get<bool>(cfg, "coarse-presolve");
  return o;
}

int thread_cap(const json& cfg) {
  if (!cfg.at("threads").is_null()) return std::max(1, get<int>(cfg, "threads"));
  if (const char* env = std::getenv("MA_CORNER_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw InputError(std::string("MA_CORNER_THREADS must be an integer, got ") + env);
    }
  }
  return 1;
}

void cmd_solve(Run& run) {
  const json& cfg = run.cfg();
  double c = require_number(cfg, "c");
  auto grid = make_grid(get<double>(cfg, "h"), get<double>(cfg, "R"),
                        grid_shape_from_string(get<std::string>(cfg, "shape")));
  DirichletProblem problem = make_family_problem(grid, c, get<double>(cfg, "t"));
  auto [u, report] = solve_dirichlet(problem, solver_config(cfg));
  run.write_field("field", u);
  run.write_json("report.json", to_json(report), "solve-report");
}

void cmd_shoot(Run& run, bool under) {
  const json& cfg = run.cfg();
  AngleConstants k = make_angle_constants(require_number(cfg, "c"));
  if (k.c >= 1.0) throw DomainError("shooting needs 0 < c < 1");
  double R = get<double>(cfg, "R"), h = get<double>(cfg, "h");
  ShootingResult r = under ? shoot_punder(k, R, h, solver_config(cfg), shooting_options(cfg))
                           : shoot_pbar(k, R, h, solver_config(cfg), shooting_options(cfg));
  run.write_field("field", *r.field);
  json j = to_json(r);
  if (under) j["value_at_half_point"] = r.field->interpolate(Vec2(0.5, 0.5));
  run.write_json("shooting.json", j, "shooting-result");
}

ScalarField open_field(const json& cfg) {
  if (cfg.at("field").is_null()) throw InputError("--field is required");
  fs::path p = get<std::string>(cfg, "field");
  if (p.extension() == ".csv") return load_field(p, fs::path(p).replace_extension(".json"));
  return load_field(p);
}

void cmd_asymptotics(Run& run) {
  const json& cfg = run.cfg();
  ScalarField u = open_field(cfg);
  double c = cfg.at("c").is_null() ? (u.meta().c ? *u.meta().c : NAN) : get<double>(cfg, "c");
  if (!std::isfinite(c)) throw InputError("field metadata has no c; pass --c");
  AngleConstants k = make_angle_constants(c);
  const Grid2D& g = u.grid();

  Window near = default_near_window(g);
  if (near.hi <= near.lo) near = Window{8.0 * g.h(), 16.0 * g.h()};
  Window far = default_far_window(g);
  if (!cfg.at("near-lo").is_null()) near.lo = get<double>(cfg, "near-lo");
  if (!cfg.at("near-hi").is_null()) near.hi = get<double>(cfg, "near-hi");
  if (!cfg.at("far-lo").is_null()) far.lo = get<double>(cfg, "far-lo");
  if (!cfg.at("far-hi").is_null()) far.hi = get<double>(cfg, "far-hi");
  if (!(near.hi > near.lo) || !(far.hi > far.lo)) throw InputError("windows need lo < hi");

  std::vector<std::string> wanted;
  {
    std::stringstream ss(get<std::string>(cfg, "analyses"));
    std::string item;
    while (std::getline(ss, item, ',')) wanted.push_back(item);
  }
  static const std::vector<std::string> all = {"hessian-audit", "u12-limits", "alpha", "beta", "coeff-a", "conical"};
  if (wanted.size() == 1 && wanted[0] == "all") wanted = all;
  for (const auto& w : wanted)
    if (std::find(all.begin(), all.end(), w) == all.end()) throw InputError("unknown analysis " + w);
  auto want = [&](const char* name) { return std::find(wanted.begin(), wanted.end(), name) != wanted.end(); };

  json rep = {{"c", c},
              {"h", g.h()},
              {"R", g.R()},
              {"near_window", {near.lo, near.hi}},
              {"far_window", {far.lo, far.hi}}};
  HessianField H(u);
  if (want("hessian-audit")) rep["hessian_audit"] = to_json(hessian_audit(H, k));
  if (want("u12-limits")) rep["u12_limits"] = to_json(u12_limits(H, near, far));
  if (want("alpha")) {
    DeviationExponent d = deviation_exponent(u, make_pc(k, Sign::Plus), near);
    json j = to_json(d);
    j["alpha"] = d.fit && !d.degenerate ? json(d.fit->slope - 2.0) : json(nullptr);
    rep["alpha"] = j;
  }
  if (want("beta")) rep["beta"] = to_json(deviation_exponent(u, make_pc(k, Sign::Minus), far));
  if (want("coeff-a")) rep["coeff_a"] = to_json(harnack_coefficient(u, k, far));
  if (want("conical")) rep["conical"] = to_json(conical_indicator(H, k, conical_ladder(g.h(), 5)));
  run.write_json("asymptotics.json", rep, "asymptotics-report");
}

ClassifyConfig classify_config(const json& cfg) {
  ClassifyConfig c;
  c.R = get<double>(cfg, "R");
  c.h = get<double>(cfg, "h");
  c.shape = grid_shape_from_string(get<std::string>(cfg, "shape"));
  c.branch = outer_branch_from_string(get<std::string>(cfg, "branch"));
  c.outer_t = get<double>(cfg, "outer-t");
  c.solver = solver_config(cfg);
  c.shooting = shooting_options(cfg);
  return c;
}

void cmd_classify(Run& run) {
  const json& cfg = run.cfg();
  ClassifyConfig base = classify_config(cfg);
  std::vector<std::pair<VertexData, std::optional<ClassifyConfig>>> batch;
  if (!cfg.at("vertices").is_null()) {
    std::string path = get<std::string>(cfg, "vertices");
    std::ifstream is(path);
    if (!is) throw InputError("cannot open vertex file " + path);
    json j;
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw InputError("vertex file " + path + ": " + e.what());
    }
    batch = vertex_batch_from_json(j, base);
  } else {
    VertexData d;
    d.id = "vertex";
    d.f0 = require_number(cfg, "f0");
    d.p1 = get<double>(cfg, "p1");
    d.p2 = get<double>(cfg, "p2");
    d.validate();
    batch.emplace_back(d, std::nullopt);
  }
  json out = json::array();
  for (const auto& [data, own] : batch) {
    RegularityVerdict v = classify_vertex(data, own ? *own : base);
    out.push_back({{"id", data.id}, {"verdict", to_json(v)}});
  }
  run.write_json("verdicts.json", out, "regularity-verdicts");
}

void cmd_laplace_sector(Run& run) {
  const json& cfg = run.cfg();
  AngleConstants k = make_angle_constants(cfg.at("c").is_null() ? 0.75 : get<double>(cfg, "c"));
  auto rhos = get<std::vector<double>>(cfg, "rho");
  double beta = get<double>(cfg, "beta");
  double h = get<double>(cfg, "h");
  DecayReport rep = sector_decay_check(k, beta, rhos, h);
  run.write_json("decay.json", to_json(rep), "sector-decay");
  SectorData data = [beta](const Vec2& x, SectorBoundary part) {
    bool arc = part == SectorBoundary::InnerArc || part == SectorBoundary::OuterArc;
    return arc ? std::pow(x.norm(), beta) : 0.0;
  };
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    SectorField w = solve_laplace_sector(k, rhos[i], data, h);
    auto os = run.open("sector_" + std::to_string(i) + ".csv", "sector-field");
    w.write_csv(os);
  }
}

void cmd_sweep(Run& run) {
  const json& cfg = run.cfg();
  auto cs = get<std::vector<double>>(cfg, "cs");
  std::vector<std::string> branches;
  {
    std::stringstream ss(get<std::string>(cfg, "branches"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item != "pbar" && item != "punder") throw InputError("sweep branches are pbar and punder, got " + item);
      branches.push_back(item);
    }
  }
  for (double c : cs)
    if (!(c > 0.0) || !(c < 1.0)) throw DomainError("sweep needs every c in (0, 1)");

  struct Job {
    double c;
    std::string branch;
    json result;
    std::exception_ptr error;
  };
  std::vector<Job> jobs;
  for (double c : cs)
    for (const auto& b : branches) jobs.push_back({c, b, {}, nullptr});

  const double R = get<double>(cfg, "R"), h = get<double>(cfg, "h");
  const SolverConfig scfg = solver_config(cfg);
  const ShootingOptions sopt = shooting_options(cfg);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        AngleConstants k = make_angle_constants(job.c);
        ShootingResult r = job.branch == "pbar" ? shoot_pbar(k, R, h, scfg, sopt) : shoot_punder(k, R, h, scfg, sopt);
        std::ostringstream stem;
        stem << job.branch << "_c" << job.c;
        run.write_field(stem.str(), *r.field);
        job.result = to_json(r);
        job.result["branch"] = job.branch;
        job.result["field"] = stem.str() + ".csv";
      } catch (...) {
        job.error = std::current_exception();
      }
    }
  };
  int n = std::min<int>(thread_cap(cfg), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  json agg = json::array();
  for (auto& job : jobs) {
    if (job.error) std::rethrow_exception(job.error);
    agg.push_back(job.result);
  }
  run.write_json("sweep.json", agg, "sweep-results");
}

int run_command(const std::string& name, const json& cfg) {
  Run run(name, cfg);
  if (name == "solve") cmd_solve(run);
  else if (name == "pbar") cmd_shoot(run, false);
  else if (name == "punder") cmd_shoot(run, true);
  else if (name == "asymptotics") cmd_asymptotics(run);
  else if (name == "classify") cmd_classify(run);
  else if (name == "laplace-sector") cmd_laplace_sector(run);
  else if (name == "sweep") cmd_sweep(run);
  run.finish();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere quadrant corner lab"};
  app.require_subcommand(1);
  const json defaults = default_config();

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, bool> coarse;
  std::map<std::string, std::string> config_path;
  const char* commands[] = {"solve", "pbar", "punder", "asymptotics", "classify", "laplace-sector", "sweep"};
  const char* about[] = {"solve one shooting-family Dirichlet problem",
                         "shoot for the solution with u(1,1) = 1",
                         "shoot for the solution with u(1,1) = 0",
                         "asymptotic analyses of a saved field",
                         "classify vertices (single or --vertices batch)",
                         "sector Laplace decay check over a rho ladder",
                         "pbar / punder over a list of c values"};
  for (int i = 0; i < 7; ++i) {
    std::string cmd = commands[i];
    CLI::App* sub = app.add_subcommand(cmd, about[i]);
    sub->set_help_flag("--help", "print this help");  // -h would shadow --h
    for (const auto& f : kFlags) opts[cmd][f.key] = sub->add_option(std::string("--") + f.key, raw[cmd][f.key], f.help);
    opts[cmd]["coarse-presolve"] = sub->add_flag("--coarse-presolve", coarse[cmd], "seed the fine search from a 2h solve");
    sub->add_option("--config", config_path[cmd], "JSON config file (flags take precedence)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    std::string cmd;
    for (const char* c : commands)
      if (app.got_subcommand(c)) cmd = c;
    json cfg = defaults;
    if (!config_path[cmd].empty()) cfg.update(load_config_file(config_path[cmd], defaults));
    for (const auto& f : kFlags)
      if (opts[cmd][f.key]->count() > 0) cfg[f.key] = coerce(f.key, raw[cmd][f.key], defaults.at(f.key));
    if (opts[cmd]["coarse-presolve"]->count() > 0) cfg["coarse-presolve"] = coarse[cmd];
    return run_command(cmd, cfg);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ExtentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
