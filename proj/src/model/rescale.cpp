#include "macorner/model/rescale.hpp"

#include <cmath>

#include "macorner/errors.hpp"

namespace macorner {

ScalarField quadratic_rescale(const ScalarField& u, double lambda, std::shared_ptr<const Grid2D> target) {
  if (!(lambda > 0.0)) throw DomainError("rescaling factor must be positive");
  const double inv2 = 1.0 / (lambda * lambda);
  FieldMeta meta = u.meta();
  meta.lambda = lambda * meta.lambda.value_or(1.0);
  meta.provenance = "rescale(" + (u.meta().provenance.empty() ? std::string("field") : u.meta().provenance) + ")";
  return ScalarField::sample(
      std::move(target), [&](const Vec2& x) { return inv2 * u.interpolate(lambda * x); }, std::move(meta));
}

ScalarField quadratic_rescale(const ScalarField& u, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("rescaling factor must be positive");
  const Grid2D& g = u.grid();
  const double h = g.h();
  double extent = std::min(g.R(), g.R() / lambda);
  // The quarter-disc arc is not a lattice line; keep two cells of margin.
  if (g.shape() == GridShape::QuarterDisc && lambda > 1.0 - 1e-12) extent -= 2.0 * h * std::max(1.0, 1.0 / lambda);
  const double cells = std::floor(extent / h + 1e-9);
  if (cells < 2) throw ExtentError("rescaled extent is below two cells");
  return quadratic_rescale(u, lambda, make_grid(h, cells * h, g.shape()));
}

}  // namespace macorner
