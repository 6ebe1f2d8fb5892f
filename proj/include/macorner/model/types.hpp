#pragma once

#include <Eigen/Dense>

namespace macorner {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

}  // namespace macorner
