#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macorner/model/types.hpp"

namespace macorner {

enum class GridShape { Square, QuarterDisc };

enum class NodeKind : std::uint8_t { Interior, AxisBoundary, OuterBoundary, Exterior };

std::string to_string(GridShape shape);
GridShape grid_shape_from_string(const std::string& name);

/// Uniform lattice over [0, R]^2 with spacing h. The quarter-disc truncation
/// marks nodes with |x| > R exterior; non-exterior nodes with an exterior
/// axis neighbour form its outer boundary.
///
/// Both 1/h and R/h must be integers so that (1, 1) is a node.
class Grid2D {
public:
  Grid2D(double h, double R, GridShape shape = GridShape::Square);

  double h() const { return h_; }
  double R() const { return R_; }
  GridShape shape() const { return shape_; }
  /// Number of cells per side; nodes are indexed 0..n in each direction.
  int n() const { return n_; }
  int nodes_per_side() const { return n_ + 1; }
  std::size_t size() const { return kinds_.size(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * (n_ + 1) + i; }
  int i_of(std::size_t idx) const { return static_cast<int>(idx % (n_ + 1)); }
  int j_of(std::size_t idx) const { return static_cast<int>(idx / (n_ + 1)); }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i <= n_ && j <= n_; }

  Vec2 point(int i, int j) const { return Vec2(i * h_, j * h_); }
  Vec2 point(std::size_t idx) const { return point(i_of(idx), j_of(idx)); }

  NodeKind kind(int i, int j) const { return kinds_[index(i, j)]; }
  NodeKind kind(std::size_t idx) const { return kinds_[idx]; }
  bool is_active(int i, int j) const { return in_range(i, j) && kind(i, j) != NodeKind::Exterior; }
  bool is_boundary(std::size_t idx) const {
    return kinds_[idx] == NodeKind::AxisBoundary || kinds_[idx] == NodeKind::OuterBoundary;
  }

  /// Lattice index of the node at x when x is (within 1e-9 h) a lattice point.
  std::size_t node_at(const Vec2& x) const;

  /// Closed-domain membership test (square or quarter disc).
  bool contains(const Vec2& x) const;

  std::size_t count(NodeKind k) const;

  bool operator==(const Grid2D& other) const {
    return n_ == other.n_ && h_ == other.h_ && shape_ == other.shape_;
  }

private:
  double h_;
  double R_;
  GridShape shape_;
  int n_;
  std::vector<NodeKind> kinds_;
};

}  // namespace macorner
