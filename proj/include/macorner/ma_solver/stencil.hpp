#pragma once

#include <array>
#include <vector>

namespace macorner {

struct IntDir {
  int x = 0;
  int y = 0;
  int norm2() const { return x * x + y * y; }
};

struct DirectionPair {
  IntDir e;
  IntDir e_perp;
};

/// Orthogonal direction pairs for the min-over-pairs discretization. The
/// order matters: argmin ties go to the earlier pair.
struct Stencil {
  std::vector<DirectionPair> pairs;

  /// Throws DomainError for non-orthogonal or zero directions, or when the
  /// diagonal pair ((1,1),(1,-1)) is missing.
  void validate() const;
  /// Largest |component| over all directions, i.e. the lattice reach.
  int reach() const;
};

/// {((1,0),(0,1)), ((1,1),(1,-1)), ((2,1),(-1,2)), ((1,2),(-2,1))}
Stencil default_stencil();

}  // namespace macorner
