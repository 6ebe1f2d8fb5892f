#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "macorner/model/angle_constants.hpp"
#include "macorner/model/types.hpp"

namespace macorner {

enum class SectorBoundary { FirstEdge, SecondEdge, InnerArc, OuterArc };

/// Dirichlet data for the sector annulus, told which boundary piece the
/// point lies on.
using SectorData = std::function<double(const Vec2&, SectorBoundary)>;

/// Nodal values on the Cartesian lattice h Z x h N restricted to the closed
/// domain (B_{1/rho} \ B_rho) intersected with the sector 0 <= theta <= alpha_minus.
class SectorField {
public:
  enum class Node : std::uint8_t { Interior, Boundary, Exterior };

  SectorField(const AngleConstants& k, double rho, double h);

  const AngleConstants& constants() const { return k_; }
  double rho() const { return rho_; }
  double h() const { return h_; }
  int columns() const { return ni_; }
  int rows() const { return nj_; }
  std::size_t size() const { return kind_.size(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * ni_ + i; }
  Vec2 point(int i, int j) const { return Vec2((i + i0_) * h_, j * h_); }
  Node kind(int i, int j) const { return kind_[index(i, j)]; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < ni_ && j < nj_; }

  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  const std::vector<double>& values() const { return values_; }

  /// Open-domain membership (strict inequalities).
  bool inside(const Vec2& x) const;
  /// Bilinear value; nullopt when a corner of the enclosing cell is exterior.
  std::optional<double> interpolate(const Vec2& x) const;

  /// Header x1,x2,u and one row per non-exterior node.
  void write_csv(std::ostream& os) const;

  /// Interior-equation residual left by the linear solve.
  double residual = 0.0;
  int unknowns = 0;

private:
  friend SectorField solve_laplace_sector(const AngleConstants&, double, const SectorData&, double);
  AngleConstants k_;
  double rho_;
  double h_;
  int i0_ = 0;
  int ni_ = 0;
  int nj_ = 0;
  std::vector<Node> kind_;
  std::vector<double> values_;
};

/// Five-point Laplace solve with Shortley-Weller arms cut at the curved and
/// slanted boundary. Throws DomainError unless 0 < rho < 1 and h > 0, and
/// propagates linear-solver failures.
SectorField solve_laplace_sector(const AngleConstants& k, double rho, const SectorData& data, double h);

/// Max of |w| over sampled points of the unit arc strictly inside the sector.
double max_on_unit_arc(const SectorField& w, int samples = 721);

struct DecaySample {
  double rho = 0.0;
  /// max |w| on the unit arc of the solve with |x|^beta arc data.
  double raw_max = 0.0;
  /// max over nodes of (B_{1/(2 rho)} \ B_{2 rho}) of |w| / |x|^beta.
  double growth_ratio = 0.0;
  /// raw_max / growth_ratio: the unit-arc max of the rescaled w that meets
  /// |w| <= |x|^beta on the whole inner annulus.
  double normalized_max = 0.0;
  double residual = 0.0;
  int unknowns = 0;
};

struct DecayReport {
  double beta = 0.0;
  double h = 0.0;
  std::vector<DecaySample> samples;
  bool raw_decreasing = false;
  bool normalized_decreasing = false;
};

DecayReport sector_decay_check(const AngleConstants& k, double beta, const std::vector<double>& rhos, double h);

nlohmann::json to_json(const DecayReport& r);

}  // namespace macorner
