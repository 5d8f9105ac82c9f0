#pragma once

#include <stdexcept>

#include "basinlab/geometry.hpp"

namespace basinlab {

struct FieldSample {
  double value = 0.0;
  Point2 grad;
};

// Thrown by fields whose value or gradient is undefined at the queried point
// (log of a non-positive value, division by zero, ...).
class FieldDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A 2D scalar landscape with an exact gradient. Implementations are immutable
// after construction and safe to evaluate from any number of threads.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(Point2 p) const = 0;
  virtual Point2 gradient(Point2 p) const = 0;
  virtual FieldSample sample(Point2 p) const { return {value(p), gradient(p)}; }
};

// f(x, y) = sin(pi x) sin(2 pi x) cos(pi y) cos(2 pi y)
//
// Doubly periodic with period 2 in each coordinate, even in each coordinate,
// and antisymmetric under a half-period shift: f(x+1, y) = -f(x, y).
// The function is a product of one-variable factors, which the cell grid
// exploits for closed-form extrema.
class BuiltinField final : public ScalarField {
 public:
  double value(Point2 p) const override;
  Point2 gradient(Point2 p) const override;
  FieldSample sample(Point2 p) const override;
};

// The separable factors of the builtin landscape, f = gx(x) * hy(y).
double builtin_factor_x(double x);  // sin(pi x) sin(2 pi x)
double builtin_factor_y(double y);  // cos(pi y) cos(2 pi y)

// Well depths of the builtin landscape, from one-variable calculus:
// the x factor has extreme value 4/(3 sqrt 3) and the y factor 2/(3 sqrt 6)
// away from its +-1 extremes.
double builtin_deep_depth();     // 4/(3 sqrt 3)            ~ 0.7698
double builtin_shallow_depth();  // deep * 2/(3 sqrt 6)     ~ 0.2095

}  // namespace basinlab
