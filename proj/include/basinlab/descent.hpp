#pragma once

#include <cstdint>

#include "basinlab/field.hpp"
#include "basinlab/rng.hpp"

namespace basinlab {

struct DescentParams {
  double tau = 0.01;   // step size
  double eps = 0.0;    // per-coordinate std of the additive Gaussian jitter
  std::uint64_t max_steps = 500;
  double grad_tol = 0.0;        // early-stop gradient norm; consulted only when eps == 0
  double escape_bound = 100.0;  // abort once |x| or |y| exceeds this

  void validate() const;  // throws std::invalid_argument
};

enum class StopReason { MaxSteps, GradTol, Escaped };

struct Trajectory {
  Point2 start;
  Point2 end;
  std::uint64_t steps_taken = 0;
  double final_grad_norm = 0.0;
  double final_value = 0.0;
  StopReason stop_reason = StopReason::MaxSteps;
};

// One update p - tau * grad f(p) - n, where n has independent N(0, eps^2)
// coordinates. With eps == 0 the step is exactly the deterministic descent
// update and consumes nothing from the stream.
Point2 step(const ScalarField& field, Point2 p, const DescentParams& params, RngStream& rng);

// Iterates the update from `start` for at most max_steps. Noiseless runs stop
// early once the gradient norm falls to grad_tol; any run aborts with
// StopReason::Escaped when a coordinate leaves [-escape_bound, escape_bound]
// or stops being finite. Domain errors thrown by a custom field at the start
// point propagate; later ones end the trajectory as Escaped.
Trajectory run_trajectory(const ScalarField& field, Point2 start, const DescentParams& params,
                          RngStream& rng);

}  // namespace basinlab
