#pragma once

#include <memory>

#include "macorner/model/scalar_field.hpp"

namespace macorner {

/// result(x) = lambda^-2 u(lambda x) sampled on target. Quadratics without
/// linear and constant parts are fixed points. Throws ExtentError when some
/// lambda x leaves the source field.
ScalarField quadratic_rescale(const ScalarField& u, double lambda, std::shared_ptr<const Grid2D> target);

/// Target grid with the same spacing and shape and the largest admissible
/// extent not exceeding the source extent.
ScalarField quadratic_rescale(const ScalarField& u, double lambda);

}  // namespace macorner
