#include "macorner/model/scalar_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "macorner/errors.hpp"

namespace macorner {

namespace {

// Lagrange weights of the nodes first, ..., first + 3 at offset t.
std::array<double, 4> cubic_weights(double t, int first) {
  std::array<double, 4> w{};
  for (int a = 0; a < 4; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= t - (first + b);
      den *= static_cast<double>(a - b);
    }
    w[a] = num / den;
  }
  return w;
}

}  // namespace

std::shared_ptr<const Grid2D> make_grid(double h, double R, GridShape shape) {
  return std::make_shared<const Grid2D>(h, R, shape);
}

ScalarField::ScalarField(std::shared_ptr<const Grid2D> grid, std::vector<double> values, FieldMeta meta)
    : grid_(std::move(grid)), values_(std::move(values)), meta_(std::move(meta)) {
  if (!grid_) throw GridError("field without grid");
  if (values_.size() != grid_->size()) throw GridError("field value count does not match its grid");
}

ScalarField ScalarField::sample(std::shared_ptr<const Grid2D> grid, const std::function<double(const Vec2&)>& fn,
                                FieldMeta meta) {
  std::vector<double> v(grid->size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (grid->kind(k) != NodeKind::Exterior) v[k] = fn(grid->point(k));
  }
  return ScalarField(std::move(grid), std::move(v), std::move(meta));
}

ScalarField ScalarField::sample(std::shared_ptr<const Grid2D> grid, const QuadraticPolynomial& p, FieldMeta meta) {
  return sample(std::move(grid), [&p](const Vec2& x) { return p(x); }, std::move(meta));
}

double ScalarField::interpolate(const Vec2& x) const {
  const Grid2D& g = *grid_;
  const double h = g.h();
  const int n = g.n();
  const double tol = 1e-10 * h;
  if (x[0] < -tol || x[1] < -tol || x[0] > g.R() + tol || x[1] > g.R() + tol) {
    throw ExtentError("interpolation point outside the grid");
  }
  const double fx = std::clamp(x[0] / h, 0.0, static_cast<double>(n));
  const double fy = std::clamp(x[1] / h, 0.0, static_cast<double>(n));
  const int i0 = std::min(static_cast<int>(std::floor(fx)), n - 1);
  const int j0 = std::min(static_cast<int>(std::floor(fy)), n - 1);
  const double tx = fx - i0, ty = fy - j0;

  // Centred stencil, shifted inwards at the edges of the lattice.
  const int sx = std::clamp(i0 - 1, 0, n - 3), sy = std::clamp(j0 - 1, 0, n - 3);
  bool cubic = n >= 3;
  if (cubic && g.shape() == GridShape::QuarterDisc) {
    for (int b = 0; b < 4 && cubic; ++b) {
      for (int a = 0; a < 4 && cubic; ++a) cubic = g.kind(sx + a, sy + b) != NodeKind::Exterior;
    }
  }
  if (cubic) {
    const auto wx = cubic_weights(tx, sx - i0), wy = cubic_weights(ty, sy - j0);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
      double row = 0.0;
      for (int a = 0; a < 4; ++a) row += wx[a] * at(sx + a, sy + b);
      acc += wy[b] * row;
    }
    return acc;
  }
  for (int b = 0; b <= 1; ++b) {
    for (int a = 0; a <= 1; ++a) {
      if (g.kind(i0 + a, j0 + b) == NodeKind::Exterior) {
        throw ExtentError("interpolation cell touches exterior nodes");
      }
    }
  }
  return (1 - tx) * (1 - ty) * at(i0, j0) + tx * (1 - ty) * at(i0 + 1, j0) + (1 - tx) * ty * at(i0, j0 + 1) +
         tx * ty * at(i0 + 1, j0 + 1);
}

double ScalarField::value_at_unit_point() const { return values_[grid_->node_at(Vec2(1.0, 1.0))]; }

ScalarField ScalarField::minus(const ScalarField& other) const {
  if (!(*grid_ == other.grid())) throw GridError("fields live on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] - other.values_[k];
  return ScalarField(grid_, std::move(v), meta_);
}

ScalarField ScalarField::minus(const QuadraticPolynomial& p) const {
  std::vector<double> v(values_.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (grid_->kind(k) != NodeKind::Exterior) v[k] = values_[k] - p(grid_->point(k));
  }
  return ScalarField(grid_, std::move(v), meta_);
}

}  // namespace macorner
