#pragma once

namespace macorner {

/// Sector geometry attached to the right-hand side constant c of det D^2 u = c
/// with quadratic data |x|^2/2 on the quadrant edges.
///
/// s = sqrt(1 - c) is the mixed derivative of the two quadratic solutions,
/// alpha_minus / alpha_plus are the openings of the transformed sectors
/// (cos alpha = -s, +s) and beta = pi / alpha the homogeneity of the first
/// Dirichlet harmonic in each sector.
struct AngleConstants {
  double c = 1.0;
  double s = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double beta_minus = 2.0;
  double beta_plus = 2.0;
};

/// Requires 0 < c <= 1; throws DomainError otherwise.
AngleConstants make_angle_constants(double c);

}  // namespace macorner
