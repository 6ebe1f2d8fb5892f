#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macorner/model/grid.hpp"
#include "macorner/model/quadratic.hpp"

namespace macorner {

struct FieldMeta {
  std::optional<double> c;
  std::optional<double> t;
  std::optional<double> lambda;
  std::string provenance;
  std::string report_id;
};

/// Nodal values on a Grid2D. Values at exterior nodes are stored but never read.
class ScalarField {
public:
  ScalarField(std::shared_ptr<const Grid2D> grid, std::vector<double> values, FieldMeta meta = {});

  /// Samples fn on every non-exterior node.
  static ScalarField sample(std::shared_ptr<const Grid2D> grid, const std::function<double(const Vec2&)>& fn,
                            FieldMeta meta = {});
  static ScalarField sample(std::shared_ptr<const Grid2D> grid, const QuadraticPolynomial& p, FieldMeta meta = {});

  const Grid2D& grid() const { return *grid_; }
  const std::shared_ptr<const Grid2D>& grid_ptr() const { return grid_; }

  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double at(int i, int j) const { return values_[grid_->index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  const FieldMeta& meta() const { return meta_; }
  FieldMeta& meta() { return meta_; }

  /// Value at an arbitrary point: tensor cubic Lagrange interpolation on the
  /// 4x4 block around x (shifted inwards at the lattice edges) when it is
  /// active, bilinear on the enclosing cell otherwise.
  /// Throws ExtentError when the enclosing cell has an exterior corner or x is
  /// outside [0, R]^2.
  double interpolate(const Vec2& x) const;

  /// Value at (1, 1), which is a node by the grid invariants.
  double value_at_unit_point() const;

  /// Nodewise this - other on identical grids (GridError otherwise).
  ScalarField minus(const ScalarField& other) const;
  ScalarField minus(const QuadraticPolynomial& p) const;

private:
  std::shared_ptr<const Grid2D> grid_;
  std::vector<double> values_;
  FieldMeta meta_;
};

/// Builds a shared grid; the usual way to hand grids to fields and problems.
std::shared_ptr<const Grid2D> make_grid(double h, double R, GridShape shape = GridShape::Square);

}  // namespace macorner
