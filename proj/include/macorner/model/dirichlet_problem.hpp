#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "macorner/model/grid.hpp"
#include "macorner/model/quadratic.hpp"

namespace macorner {

using PointFunction = std::function<double(const Vec2&)>;

/// Marks a problem as the shooting-family member with outer data P_c^- + t x1 x2.
/// The solver uses it to pick a classical convex starting point.
struct FamilyTag {
  double c = 1.0;
  double t = 0.0;
};

/// det D^2 u = f in the truncated quadrant, u = phi on its boundary.
/// The boundary function may be evaluated at any boundary point, including
/// points between lattice nodes where wide stencil arms leave the domain.
struct DirichletProblem {
  std::shared_ptr<const Grid2D> grid;
  PointFunction rhs;
  PointFunction boundary;
  std::optional<FamilyTag> family;

  /// Throws DomainError when f <= 0 somewhere or data is not finite.
  void validate() const;
};

DirichletProblem make_constant_rhs_problem(std::shared_ptr<const Grid2D> grid, double f, PointFunction boundary);

/// det D^2 u = c with boundary P_c^- + t x1 x2 (valid for any 0 < c <= 1; at c = 1, q + t x1 x2).
DirichletProblem make_family_problem(std::shared_ptr<const Grid2D> grid, double c, double t);

}  // namespace macorner
