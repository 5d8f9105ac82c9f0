#include "basinlab/descent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace basinlab {

namespace {

inline Point2 descend(Point2 p, Point2 g, double tau) {
  return {p.x - tau * g.x, p.y - tau * g.y};
}

inline Point2 descend_noisy(Point2 p, Point2 g, double tau, double eps,
                            std::pair<double, double> n) {
  return {p.x - tau * g.x - eps * n.first, p.y - tau * g.y - eps * n.second};
}

inline bool escaped(Point2 p, double bound) {
  return std::abs(p.x) > bound || std::abs(p.y) > bound;
}

}  // namespace

void DescentParams::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("step size tau must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("noise scale eps must be nonnegative");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be nonnegative");
  if (!(escape_bound > 0.0)) throw std::invalid_argument("escape_bound must be positive");
}

Point2 step(const ScalarField& field, Point2 p, const DescentParams& params, RngStream& rng) {
  const Point2 g = field.gradient(p);
  if (params.eps == 0.0) return descend(p, g, params.tau);
  return descend_noisy(p, g, params.tau, params.eps, rng.next_gaussian_pair());
}

Trajectory run_trajectory(const ScalarField& field, Point2 start, const DescentParams& params,
                          RngStream& rng) {
  params.validate();
  const bool noiseless = params.eps == 0.0;

  Point2 p = start;
  std::uint64_t t = 0;
  try {
    for (; t < params.max_steps; ++t) {
      const Point2 g = field.gradient(p);
      if (noiseless) {
        const double gn = norm(g);
        if (gn <= params.grad_tol) {
          return {start, p, t, gn, field.value(p), StopReason::GradTol};
        }
      }
      const Point2 q = noiseless
                           ? descend(p, g, params.tau)
                           : descend_noisy(p, g, params.tau, params.eps,
                                           rng.next_gaussian_pair());
      if (!is_finite(q)) {
        return {start, p, t + 1, norm(g), field.value(p), StopReason::Escaped};
      }
      p = q;
      if (escaped(p, params.escape_bound)) {
        return {start, p, t + 1, norm(field.gradient(p)), field.value(p), StopReason::Escaped};
      }
    }
    return {start, p, params.max_steps, norm(field.gradient(p)), field.value(p),
            StopReason::MaxSteps};
  } catch (const FieldDomainError&) {
    // A field undefined at the start point is a configuration problem; a
    // trajectory that wanders out of the field's domain is an escape.
    if (t == 0 && p == start) throw;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {start, p, t, nan, nan, StopReason::Escaped};
  }
}

}  // namespace basinlab
