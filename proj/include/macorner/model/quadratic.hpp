#pragma once

#include "macorner/model/angle_constants.hpp"
#include "macorner/model/types.hpp"

namespace macorner {

/// value(x) = 1/2 x^T H x + b.x + d with H stored as its three distinct entries.
struct QuadraticPolynomial {
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
  Vec2 b = Vec2::Zero();
  double d = 0.0;

  double operator()(const Vec2& x) const {
    return 0.5 * (h11 * x[0] * x[0] + 2.0 * h12 * x[0] * x[1] + h22 * x[1] * x[1]) + b.dot(x) + d;
  }
  Mat2 hessian() const {
    Mat2 m;
    m << h11, h12, h12, h22;
    return m;
  }
  double hessian_det() const { return h11 * h22 - h12 * h12; }
  bool is_homogeneous() const { return b.isZero(0.0) && d == 0.0; }
};

double eval_quadratic(const QuadraticPolynomial& p, const Vec2& x);

/// q(x) = |x|^2 / 2.
QuadraticPolynomial quadratic_q();

/// P_c^{+/-}(x) = x1^2/2 + x2^2/2 +/- s x1 x2.
QuadraticPolynomial make_pc(const AngleConstants& k, Sign sign);

/// Outer data of the shooting family, P_c^- + t x1 x2. With s = 0 this is q + t x1 x2.
QuadraticPolynomial family_quadratic(double s, double t);

}  // namespace macorner
