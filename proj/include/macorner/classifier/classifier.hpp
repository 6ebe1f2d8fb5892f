#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "macorner/asymptotics/analyses.hpp"
#include "macorner/global/shooting.hpp"
#include "macorner/ma_solver/solver.hpp"
#include "macorner/model/affine.hpp"
#include "macorner/model/dirichlet_problem.hpp"
#include "macorner/model/quadratic.hpp"
#include "macorner/model/scalar_field.hpp"

namespace macorner {

/// Local data at a quadrant vertex: f(0), phi_11(0) and phi_22(0), with
/// optional samplers in the original (unnormalized) coordinates.
struct VertexData {
  std::string id;
  double f0 = 1.0;
  double p1 = 1.0;
  double p2 = 1.0;
  PointFunction rhs;
  PointFunction boundary;
  std::optional<QuadraticPolynomial> subsolution;

  /// Throws DomainError unless f0, p1, p2 > 0.
  void validate() const;
};

struct Normalization {
  double c_eff = 1.0;
  /// Normalized coordinates y to original coordinates x = map(y),
  /// x1 = y1 / sqrt(p1), x2 = y2 / sqrt(p2).
  AffineMap map;
};

Normalization normalize_vertex(const VertexData& data);

/// Samplers and second derivatives seen in normalized coordinates:
/// u~(y) = u(map y), f~(y) = f(map y) det(map)^2.
VertexData normalized_data(const VertexData& data, const Normalization& n);
/// Inverse of normalized_data.
VertexData denormalized_data(const VertexData& normalized, const Normalization& n);

struct SubsolutionMargin {
  double margin = 0.0;
  bool strict = false;
  /// margin within tolerance of 0: a subsolution, not a strict one.
  bool weak = false;
  double min_eigenvalue = 0.0;
  double tol = 0.0;
  int nodes = 0;
};

nlohmann::json to_json(const SubsolutionMargin& m);

/// min over the nodes of grid of det D^2 sub - f. Throws ConvexityError when
/// the Hessian has an eigenvalue below -tol.
SubsolutionMargin check_strict_subsolution(const QuadraticPolynomial& sub, const PointFunction& f,
                                           const Grid2D& grid, double tol = 1e-10);
/// Field version, audited on the valid nodes of its central-difference Hessian.
SubsolutionMargin check_strict_subsolution(const ScalarField& sub, const PointFunction& f, double tol = 1e-6);

enum class RegularityKind { C2alpha, C2, Conical };
std::string to_string(RegularityKind k);
RegularityKind regularity_kind_from_string(const std::string& s);

struct RegularityVerdict {
  RegularityKind kind = RegularityKind::C2;
  std::optional<double> alpha;
  double c_eff = 1.0;
  std::string note;
  nlohmann::json evidence;
};

nlohmann::json to_json(const RegularityVerdict& v);

/// Which outer data closes the local problem when no boundary sampler is given.
/// Given: P_c~^- + t x1 x2 (q + t x1 x2 when c_eff >= 1). PBar / PUnder: the
/// shooting values for targets 1 and 0 (c_eff < 1 only).
enum class OuterBranch { Given, PBar, PUnder };
std::string to_string(OuterBranch b);
OuterBranch outer_branch_from_string(const std::string& s);

struct ClassifyConfig {
  double R = 8.0;
  double h = 1.0 / 32.0;
  GridShape shape = GridShape::Square;
  OuterBranch branch = OuterBranch::Given;
  double outer_t = 0.0;
  double c_one_band = 1e-3;
  /// Ladder: this many radii with ratio sqrt 2, the smallest at 8h.
  int ladder_size = 5;
  SolverConfig solver;
  ShootingOptions shooting;
  ConicalThresholds thresholds;
};

nlohmann::json to_json(const ClassifyConfig& c);
/// Missing keys keep the values of base; malformed values throw InputError.
ClassifyConfig classify_config_from_json(const nlohmann::json& j, ClassifyConfig base = {});

std::vector<double> conical_ladder(double h, int size);

/// Normalize, solve the local problem on the normalized quadrant, measure, decide.
/// Throws ConsistencyError when c_eff > 1 and the indicator reports a regular
/// vertex, or when a regular indicator comes with no measurable Holder gain.
RegularityVerdict classify_vertex(const VertexData& data, const ClassifyConfig& config);

/// A JSON list of {id, f0, p1, p2[, branch, outer_t]} records.
std::vector<std::pair<VertexData, std::optional<ClassifyConfig>>> vertex_batch_from_json(
    const nlohmann::json& j, const ClassifyConfig& base);

struct LogModulusConfig {
  /// Lattice spacing of every level; each level is the quarter unit disc.
  double h = 1.0 / 128.0;
  /// Zoom factor between consecutive levels (level k covers radius zoom^k).
  double zoom = 0.25;
  int levels = 3;
  double r_min = 1e-2;
  double r_max = 1e-1;
  int samples_per_level = 6;
  SolverConfig solver;
};

struct LogModulusResult {
  double epsilon = 0.0;
  /// (r, arc mean of u12, that times |log r|), over all levels, by decreasing r.
  std::vector<std::array<double, 3>> profile;
  FitResult fit;
  double variation = 0.0;
  /// min over nodes and levels of u - q.
  double min_excess = 0.0;
  std::vector<SolveReport> reports;
};

nlohmann::json to_json(const LogModulusResult& r);

/// c = 1 on the quarter unit disc with q on the axes and q + eps x1 x2 on the
/// arc; deeper levels solve lambda^-2 u(lambda y) with data interpolated from
/// the previous level. Throws InsufficientDataError when the levels do not
/// resolve [r_min, r_max] at radii >= 8h.
LogModulusResult log_modulus_experiment(double epsilon, const LogModulusConfig& config);

}  // namespace macorner
