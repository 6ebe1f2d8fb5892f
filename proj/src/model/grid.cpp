#include "macorner/model/grid.hpp"

#include <algorithm>
#include <cmath>

#include "macorner/errors.hpp"

namespace macorner {

namespace {

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

std::string to_string(GridShape shape) { return shape == GridShape::Square ? "square" : "quarter-disc"; }

GridShape grid_shape_from_string(const std::string& name) {
  if (name == "square") return GridShape::Square;
  if (name == "quarter-disc" || name == "quarter_disc") return GridShape::QuarterDisc;
  throw InputError("unknown grid shape '" + name + "'");
}

Grid2D::Grid2D(double h, double R, GridShape shape) : h_(h), R_(R), shape_(shape) {
  if (!(h > 0.0) || !(R > 0.0)) {
    throw DomainError("grid needs h > 0 and R > 0");
  }
  if (!near_integer(1.0 / h) || !near_integer(R / h)) {
    throw DomainError("grid needs 1/h and R/h to be integers");
  }
  n_ = static_cast<int>(std::lround(R / h));
  if (n_ < 2) {
    throw DomainError("grid needs at least two cells per side");
  }
  const int m = n_ + 1;
  kinds_.assign(static_cast<std::size_t>(m) * m, NodeKind::Interior);
  const double r2 = (R_ * (1.0 + 1e-12)) * (R_ * (1.0 + 1e-12));

  auto inside = [&](int i, int j) {
    if (!in_range(i, j)) return false;
    if (shape_ == GridShape::Square) return true;
    const double x = i * h_, y = j * h_;
    return x * x + y * y <= r2;
  };

  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      NodeKind& k = kinds_[index(i, j)];
      if (!inside(i, j)) {
        k = NodeKind::Exterior;
      } else if (i == 0 || j == 0) {
        k = NodeKind::AxisBoundary;
      } else if (i == n_ || j == n_ || !inside(i + 1, j) || !inside(i, j + 1) || !inside(i - 1, j) ||
                 !inside(i, j - 1)) {
        k = NodeKind::OuterBoundary;
      }
    }
  }
}

std::size_t Grid2D::node_at(const Vec2& x) const {
  const double fi = x[0] / h_, fj = x[1] / h_;
  const long i = std::lround(fi), j = std::lround(fj);
  if (std::abs(fi - i) > 1e-9 || std::abs(fj - j) > 1e-9 || !in_range(static_cast<int>(i), static_cast<int>(j))) {
    throw ExtentError("point is not a lattice node");
  }
  return index(static_cast<int>(i), static_cast<int>(j));
}

bool Grid2D::contains(const Vec2& x) const {
  const double tol = 1e-12 * R_;
  if (x[0] < -tol || x[1] < -tol || x[0] > R_ + tol || x[1] > R_ + tol) return false;
  if (shape_ == GridShape::QuarterDisc) return x.norm() <= R_ + tol;
  return true;
}

std::size_t Grid2D::count(NodeKind k) const { return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), k)); }

}  // namespace macorner
