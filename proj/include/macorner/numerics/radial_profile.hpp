#pragma once

#include <vector>

#include "macorner/model/quadratic.hpp"
#include "macorner/model/scalar_field.hpp"
#include "macorner/numerics/loglog_fit.hpp"

namespace macorner {

enum class ArcStatistic { SupAbs, Mean };

/// Number of samples used on an arc of radius r: max(64, ceil(pi r / (2h))).
int arc_sample_count(double r, double h);

/// n radii spaced geometrically over [r_min, r_max], increasing.
std::vector<double> geometric_radii(double r_min, double r_max, int n);

/// For every r, the statistic of |field - reference| over the quarter arc
/// {|x| = r} in the first quadrant. The difference is formed at the nodes and
/// then interpolated. Throws ExtentError for radii below 4h or arcs leaving
/// the field.
std::vector<ProfilePoint> radial_profile(const ScalarField& field, const QuadraticPolynomial& reference,
                                         const std::vector<double>& radii, ArcStatistic statistic);

}  // namespace macorner
