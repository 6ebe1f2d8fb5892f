#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "macorner/ma_solver/stencil.hpp"
#include "macorner/model/dirichlet_problem.hpp"
#include "macorner/numerics/linear_solver.hpp"

namespace macorner {

/// The monotone discretization of det D^2 u on one grid.
///
/// At an interior node x and direction e the second difference uses the
/// lattice neighbours x +- h e when they lie in the closed domain. An arm that
/// would leave the domain is cut at the boundary crossing x + tau h e and uses
/// the boundary data there, with the three-point formula for unequal arms
///   D = 2/(a+b) [ (u+ - u0)/a + (u- - u0)/b ],
/// which stays monotone and exact on quadratics. Nodal vectors are full
/// lattice vectors; boundary entries hold the data and are never changed.
class DiscreteOperator {
public:
  /// boundary may be empty: pairs whose arms leave the lattice are then
  /// skipped, and a node left with no complete pair raises StencilSupportError.
  DiscreteOperator(std::shared_ptr<const Grid2D> grid, Stencil stencil, const PointFunction& boundary,
                   double penalty = 1.0);

  const Grid2D& grid() const { return *grid_; }
  const Stencil& stencil() const { return stencil_; }
  double penalty() const { return penalty_; }

  /// Interior nodes in lattice order; unknown k sits at node interior()[k].
  const std::vector<std::int32_t>& interior() const { return interior_; }
  /// Lattice index -> unknown number, -1 on boundary and exterior nodes.
  const std::vector<int>& node_to_unknown() const { return node_to_unknown_; }
  std::size_t unknowns() const { return interior_.size(); }

  /// MA_h[u] at unknown k, plus the argmin pair.
  double apply_at(const std::vector<double>& u, std::size_t k, int* active_pair = nullptr) const;
  /// MA_h[u] at every unknown.
  Vector apply(const std::vector<double>& u) const;

  /// Jacobian of u -> MA_h[u] restricted to the unknowns, linearizing the
  /// active pair. Returned negated so that it is an M-matrix.
  SparseMatrix negative_jacobian(const std::vector<double>& u) const;

  /// One Gauss-Seidel sweep: each node value is replaced by the unique
  /// solution of MA_h = f(node) with its neighbours frozen.
  void gauss_seidel_sweep(std::vector<double>& u, const Vector& f) const;

  /// Smallest directional second difference over all unknowns and all pairs
  /// (0 when none is negative).
  double convexity_violation(const std::vector<double>& u) const;

  /// Second differences of unknown k along both directions of pair p.
  std::array<double, 2> pair_differences(const std::vector<double>& u, std::size_t k, int p) const;

private:
  struct Arm {
    std::int32_t node;  // -1 when the arm ends between lattice nodes
    double weight;
    double value;       // boundary value at the cut point when node == -1
  };
  struct Direction {
    Arm plus;
    Arm minus;
  };

  std::shared_ptr<const Grid2D> grid_;
  Stencil stencil_;
  double penalty_;
  std::vector<std::int32_t> interior_;
  std::vector<int> node_to_unknown_;
  // Per unknown: -1 for nodes whose stencil is the plain lattice one,
  // otherwise an offset into special_ (2 directions per pair).
  std::vector<std::int32_t> special_slot_;
  std::vector<Direction> special_;
  // Per unknown and pair: whether the pair is usable (always true with boundary data).
  std::vector<std::uint8_t> pair_ok_;
  std::vector<std::array<std::int64_t, 2>> offsets_;
  std::vector<std::array<double, 2>> regular_weight_;

  Direction direction(std::size_t k, int p, int d) const;
  static double difference(const Direction& dir, const std::vector<double>& u, double u0);
};

}  // namespace macorner
