#include "macorner/model/dirichlet_problem.hpp"

#include <cmath>
#include <sstream>

#include "macorner/errors.hpp"

namespace macorner {

void DirichletProblem::validate() const {
  if (!grid || !rhs || !boundary) throw DomainError("incomplete Dirichlet problem");
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const NodeKind kind = grid->kind(k);
    if (kind == NodeKind::Exterior) continue;
    const Vec2 x = grid->point(k);
    const double f = rhs(x);
    if (!(f > 0.0) || !std::isfinite(f)) {
      std::ostringstream os;
      os << "right-hand side must be positive, f(" << x[0] << ", " << x[1] << ") = " << f;
      throw DomainError(os.str());
    }
    if (kind != NodeKind::Interior && !std::isfinite(boundary(x))) {
      throw DomainError("boundary data is not finite");
    }
  }
}

DirichletProblem make_constant_rhs_problem(std::shared_ptr<const Grid2D> grid, double f, PointFunction boundary) {
  return DirichletProblem{std::move(grid), [f](const Vec2&) { return f; }, std::move(boundary), std::nullopt};
}

DirichletProblem make_family_problem(std::shared_ptr<const Grid2D> grid, double c, double t) {
  if (!(c > 0.0) || c > 1.0) throw DomainError("family problems need 0 < c <= 1");
  const QuadraticPolynomial outer = family_quadratic(std::sqrt(1.0 - c), t);
  DirichletProblem p = make_constant_rhs_problem(std::move(grid), c, [outer](const Vec2& x) { return outer(x); });
  p.family = FamilyTag{c, t};
  return p;
}

}  // namespace macorner
