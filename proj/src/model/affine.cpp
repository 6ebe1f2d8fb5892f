#include "macorner/model/affine.hpp"

#include <cmath>

#include "macorner/errors.hpp"

namespace macorner {

AffineMap::AffineMap(const Mat2& m, const Vec2& shift) : m_(m), shift_(shift) {
  if (m_.determinant() == 0.0) {
    throw DomainError("affine map with singular matrix");
  }
}

AffineMap AffineMap::inverse() const {
  const Mat2 inv = m_.inverse();
  return AffineMap(inv, -inv * shift_);
}

AffineMap AffineMap::compose(const AffineMap& other) const {
  return AffineMap(m_ * other.m_, m_ * other.shift_ + shift_);
}

AffineMap make_affine(const AngleConstants& k, Sign sign) {
  if (!(k.c > 0.0) || k.c >= 1.0) {
    throw DomainError("A_c is defined for 0 < c < 1 only");
  }
  const double rc = std::sqrt(k.c);
  Mat2 m;
  m << 1.0, -sign_value(sign) * k.s / rc, 0.0, 1.0 / rc;
  return AffineMap(m);
}

}  // namespace macorner
