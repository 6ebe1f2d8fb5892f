#include "macorner/model/quadratic.hpp"

namespace macorner {

double eval_quadratic(const QuadraticPolynomial& p, const Vec2& x) { return p(x); }

QuadraticPolynomial quadratic_q() { return QuadraticPolynomial{1.0, 0.0, 1.0}; }

QuadraticPolynomial make_pc(const AngleConstants& k, Sign sign) {
  return QuadraticPolynomial{1.0, sign_value(sign) * k.s, 1.0};
}

QuadraticPolynomial family_quadratic(double s, double t) { return QuadraticPolynomial{1.0, t - s, 1.0}; }

}  // namespace macorner
