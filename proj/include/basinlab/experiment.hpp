#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "basinlab/cellgrid.hpp"
#include "basinlab/descent.hpp"

namespace basinlab {

enum class Bin { DeepWell, ShallowWell, Hill, NearCritical, OutOfRegion };

struct TrialOutcome {
  std::uint64_t trial_index = 0;
  Point2 start;
  Point2 end;
  std::optional<CellIndex> cell;  // absent exactly when bin == OutOfRegion
  Bin bin = Bin::OutOfRegion;
  std::uint64_t steps_taken = 0;
  double final_grad_norm = 0.0;
  double final_value = 0.0;
};

struct EnsembleStats {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> cell_counts;  // endpoints per cell, grid flat order
  std::uint64_t n_deep = 0;
  std::uint64_t n_shallow = 0;
  std::uint64_t n_hill = 0;
  std::uint64_t n_near_critical = 0;
  std::uint64_t n_out = 0;
  bool r_defined = false;  // false when no trial ended in a deep well
  double r = 0.0;          // n_shallow / n_deep; NaN when undefined
  double r_ci_lo = 0.0;    // 95% interval for r; NaN when undefined
  double r_ci_hi = 0.0;
  double phi = 0.0;  // fraction of endpoints inside the region
};

struct EnsembleConfig {
  Region region;
  DescentParams params;
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;  // <= 0 picks the hardware concurrency
};

struct EnsembleResult {
  std::vector<TrialOutcome> outcomes;  // in trial-index order
  EnsembleStats stats;
};

// Bins a finished trajectory: OutOfRegion when the endpoint escaped or lies
// outside the region; NearCritical when it sits in a well cell with |f| below
// the grid's near-critical threshold (parked near a zero line or saddle
// rather than inside the well); otherwise the containing cell's class.
Bin classify_endpoint(const CellGrid& grid, const Trajectory& trajectory);

// Runs `trials` independent trajectories. Trial k draws its start uniformly
// over the region from stream (base_seed, k) and keeps consuming the same
// stream for the noise, so results are identical for any worker count.
EnsembleResult run_ensemble(const ScalarField& field, const CellGrid& grid,
                            const EnsembleConfig& config);

struct RatioInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// 95% interval for the ratio n_shallow/n_deep, treating the two counts as
// independent with variance equal to the count; n_shallow == 0 yields the
// one-sided interval [0, -ln(0.05)/n_deep]. Throws when n_deep == 0.
RatioInterval confidence_interval(std::uint64_t n_shallow, std::uint64_t n_deep);

struct SweepConfig {
  std::vector<double> tau_list = {0.001, 0.01, 0.02, 0.04, 0.06};
  double eps_min = 0.0;
  double eps_max = 0.3;
  int eps_count = 31;
  std::uint64_t trials_per_point = 500;
  std::uint64_t steps_per_trial = 500;
  std::uint64_t base_seed = 0;
  int workers = 1;
  double escape_bound = 100.0;
};

struct RunSummary {
  double tau = 0.0;
  double eps = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t steps = 0;
  EnsembleStats stats;
};

// Seed for the ensemble at one sweep grid point; pure function of its inputs.
std::uint64_t derive_point_seed(std::uint64_t base_seed, std::size_t tau_index,
                                std::size_t eps_index);

// Runs one ensemble per (tau, eps) grid point, tau outer, eps inner. Sweep
// trials always execute the full step budget (no gradient early stop).
std::vector<RunSummary> run_sweep(const ScalarField& field, const CellGrid& grid,
                                  const Region& region, const SweepConfig& config);

}  // namespace basinlab
