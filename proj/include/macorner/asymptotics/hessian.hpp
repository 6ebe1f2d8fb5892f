#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "macorner/model/angle_constants.hpp"
#include "macorner/model/scalar_field.hpp"

namespace macorner {

/// Central-difference Hessian on the nodes at least 2h from every boundary.
class HessianField {
public:
  explicit HessianField(const ScalarField& u);

  const Grid2D& grid() const { return *grid_; }
  const std::shared_ptr<const Grid2D>& grid_ptr() const { return grid_; }
  bool valid(std::size_t idx) const { return valid_[idx] != 0; }
  double u11(std::size_t idx) const { return u11_[idx]; }
  double u12(std::size_t idx) const { return u12_[idx]; }
  double u22(std::size_t idx) const { return u22_[idx]; }
  Mat2 at(std::size_t idx) const;

  /// Overwrites the entries at one node (for audits of corrupted data).
  void set(std::size_t idx, double a11, double a12, double a22);

  /// Bilinear interpolation on cells whose four corners are valid;
  /// std::nullopt when the surrounding cell is not.
  std::optional<Mat2> interpolate(const Vec2& x) const;

  /// True when x is within the validity region except for the strips along
  /// the axes (points there are skipped by arc averages rather than errors).
  bool outer_ok(const Vec2& x) const;

private:
  std::shared_ptr<const Grid2D> grid_;
  std::vector<double> u11_, u12_, u22_;
  std::vector<std::uint8_t> valid_;
};

HessianField hessian_field(const ScalarField& u);

double min_eigenvalue(const Mat2& m);

struct AuditEntry {
  double value = 0.0;
  Vec2 where = Vec2::Zero();
};

struct HessianAudit {
  AuditEntry max_u11;
  AuditEntry max_u22;
  AuditEntry max_abs_u12;
  AuditEntry min_eigen;
  AuditEntry min_det;
  AuditEntry max_det;
  double tol = 0.0;
  bool pass = false;
  std::vector<std::string> violations;
};

nlohmann::json to_json(const HessianAudit& a);

/// Checks u11 <= 1 + tol, u22 <= 1 + tol, |u12| <= s + tol on valid nodes.
HessianAudit hessian_audit(const HessianField& H, const AngleConstants& k, double tol = 0.02);

/// Arc samples of at least max(64, ceil(pi r / 2h)) points on the quarter
/// arc of radius r; points inside the axis strips are dropped. Throws
/// ExtentError when the arc leaves the valid region elsewhere or fewer than 8 points remain.
std::vector<Mat2> hessian_on_arc(const HessianField& H, double r);

}  // namespace macorner
