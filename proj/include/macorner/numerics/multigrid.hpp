#pragma once

#include <memory>
#include <vector>

#include "macorner/numerics/linear_solver.hpp"

namespace macorner {

struct MultigridOptions {
  int pre_smooth = 2;
  int post_smooth = 2;
  /// Stop coarsening once a level has at most this many unknowns.
  int coarse_size = 4000;
  int max_levels = 12;
  /// Add a (-1)^(i+j) modulated copy of the bilinear coarse space on the
  /// first coarsening. Diagonal-only stencils decouple the two checkerboard
  /// colours, and their difference is invisible to plain bilinear coarsening.
  bool checkerboard = true;
};

/// Galerkin multigrid for systems whose unknowns sit on a square lattice of
/// (n + 1)^2 nodes. node_to_unknown maps lattice index j * (n + 1) + i to
/// the unknown number, or -1 for eliminated (Dirichlet) nodes. Prolongation
/// is bilinear from the even sub-lattice; smoothing is Gauss-Seidel (forward
/// before, backward after), the coarsest level is solved by sparse LU.
/// Intended as a preconditioner: apply() runs one V-cycle from zero.
class LatticeMultigrid {
public:
  LatticeMultigrid(const SparseMatrix& a, int n_cells, const std::vector<int>& node_to_unknown,
                   MultigridOptions options = {});
  ~LatticeMultigrid();

  Vector apply(const Vector& b) const;
  int levels() const;
  int dimension() const;

private:
  struct Level;
  std::vector<std::unique_ptr<Level>> levels_;
  SparseLu coarse_;
  MultigridOptions options_;

  void cycle(std::size_t level, const Vector& b, Vector& x) const;
};

}  // namespace macorner
