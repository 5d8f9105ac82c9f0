#pragma once

#include <cmath>

namespace basinlab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// A position in the plane; also used for gradients and displacements.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

inline double norm(Point2 p) { return std::sqrt(p.x * p.x + p.y * p.y); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Axis-aligned study region. Membership is half-open on both axes, matching
// the cell convention: points on the upper edges count as outside.
struct Region {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.25;
  double y_max = 1.25;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const { return x_min < x_max && y_min < y_max; }
  bool contains(Point2 p) const {
    return p.x >= x_min && p.x < x_max && p.y >= y_min && p.y < y_max;
  }
  friend bool operator==(const Region&, const Region&) = default;
};

}  // namespace basinlab
