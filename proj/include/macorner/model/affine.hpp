#pragma once

#include "macorner/model/angle_constants.hpp"
#include "macorner/model/types.hpp"

namespace macorner {

/// x -> M x + shift.
class AffineMap {
public:
  AffineMap() = default;
  explicit AffineMap(const Mat2& m, const Vec2& shift = Vec2::Zero());

  static AffineMap identity() { return AffineMap(Mat2::Identity()); }

  Vec2 operator()(const Vec2& x) const { return m_ * x + shift_; }

  const Mat2& matrix() const { return m_; }
  const Vec2& shift() const { return shift_; }
  double det() const { return m_.determinant(); }

  AffineMap inverse() const;
  /// (this o other)(x) = this(other(x)).
  AffineMap compose(const AffineMap& other) const;

private:
  Mat2 m_ = Mat2::Identity();
  Vec2 shift_ = Vec2::Zero();
};

/// A_c^{+/-} = [[1, -/+ s/sqrt(c)], [0, 1/sqrt(c)]], which carries the sector
/// Q_c^{+/-} onto the quadrant and satisfies P_c^{+/-} o A_c^{+/-} = q.
/// Requires 0 < c < 1.
AffineMap make_affine(const AngleConstants& k, Sign sign);

}  // namespace macorner
