#include "macorner/model/angle_constants.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "macorner/errors.hpp"

namespace macorner {

AngleConstants make_angle_constants(double c) {
  if (!(c > 0.0) || c > 1.0) {
    throw DomainError("sector constants need 0 < c <= 1, got c = " + std::to_string(c));
  }
  AngleConstants k;
  k.c = c;
  k.s = std::sqrt(1.0 - c);
  k.alpha_minus = std::acos(-k.s);
  k.alpha_plus = std::acos(k.s);
  k.beta_minus = std::numbers::pi / k.alpha_minus;
  k.beta_plus = std::numbers::pi / k.alpha_plus;
  return k;
}

}  // namespace macorner
