#include "basinlab/field.hpp"

#include <cmath>

namespace basinlab {

double builtin_factor_x(double x) {
  return std::sin(kPi * x) * std::sin(kTwoPi * x);
}

double builtin_factor_y(double y) {
  return std::cos(kPi * y) * std::cos(kTwoPi * y);
}

double builtin_deep_depth() {
  static const double d = 4.0 / (3.0 * std::sqrt(3.0));
  return d;
}

double builtin_shallow_depth() {
  static const double d = builtin_deep_depth() * 2.0 / (3.0 * std::sqrt(6.0));
  return d;
}

double BuiltinField::value(Point2 p) const {
  return builtin_factor_x(p.x) * builtin_factor_y(p.y);
}

Point2 BuiltinField::gradient(Point2 p) const {
  const double sx = std::sin(kPi * p.x);
  const double cx = std::cos(kPi * p.x);
  const double s2x = std::sin(kTwoPi * p.x);
  const double c2x = std::cos(kTwoPi * p.x);
  const double sy = std::sin(kPi * p.y);
  const double cy = std::cos(kPi * p.y);
  const double s2y = std::sin(kTwoPi * p.y);
  const double c2y = std::cos(kTwoPi * p.y);

  const double gx = kPi * cx * s2x + kTwoPi * sx * c2x;    // d/dx sin(pi x) sin(2 pi x)
  const double dhy = -kPi * sy * c2y - kTwoPi * cy * s2y;  // d/dy cos(pi y) cos(2 pi y)
  return {gx * (cy * c2y), (sx * s2x) * dhy};
}

FieldSample BuiltinField::sample(Point2 p) const {
  const double sx = std::sin(kPi * p.x);
  const double cx = std::cos(kPi * p.x);
  const double s2x = std::sin(kTwoPi * p.x);
  const double c2x = std::cos(kTwoPi * p.x);
  const double sy = std::sin(kPi * p.y);
  const double cy = std::cos(kPi * p.y);
  const double s2y = std::sin(kTwoPi * p.y);
  const double c2y = std::cos(kTwoPi * p.y);

  const double g = sx * s2x;
  const double h = cy * c2y;
  const double gx = kPi * cx * s2x + kTwoPi * sx * c2x;
  const double dhy = -kPi * sy * c2y - kTwoPi * cy * s2y;
  return {g * h, {gx * h, g * dhy}};
}

}  // namespace basinlab
