#include "basinlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace basinlab {

namespace {

int resolve_workers(int workers, std::uint64_t trials) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  const auto cap = static_cast<std::uint64_t>(workers);
  return static_cast<int>(std::min<std::uint64_t>(cap, std::max<std::uint64_t>(trials, 1)));
}

EnsembleStats aggregate(const CellGrid& grid, const std::vector<TrialOutcome>& outcomes) {
  EnsembleStats st;
  st.trials = outcomes.size();
  st.cell_counts.assign(grid.n_cells(), 0);
  for (const TrialOutcome& o : outcomes) {
    switch (o.bin) {
      case Bin::DeepWell: ++st.n_deep; break;
      case Bin::ShallowWell: ++st.n_shallow; break;
      case Bin::Hill: ++st.n_hill; break;
      case Bin::NearCritical: ++st.n_near_critical; break;
      case Bin::OutOfRegion: ++st.n_out; break;
    }
    if (o.cell) ++st.cell_counts[grid.flat_index(*o.cell)];
  }
  st.phi = static_cast<double>(st.trials - st.n_out) / static_cast<double>(st.trials);
  if (st.n_deep > 0) {
    st.r_defined = true;
    st.r = static_cast<double>(st.n_shallow) / static_cast<double>(st.n_deep);
    const RatioInterval ci = confidence_interval(st.n_shallow, st.n_deep);
    st.r_ci_lo = ci.lo;
    st.r_ci_hi = ci.hi;
  } else {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    st.r_defined = false;
    st.r = nan;
    st.r_ci_lo = nan;
    st.r_ci_hi = nan;
  }
  return st;
}

}  // namespace

Bin classify_endpoint(const CellGrid& grid, const Trajectory& trajectory) {
  if (trajectory.stop_reason == StopReason::Escaped) return Bin::OutOfRegion;
  const auto cell = grid.cell_of(trajectory.end);
  if (!cell) return Bin::OutOfRegion;
  const CellInfo& info = grid.cell(*cell);
  if (info.kind != CellKind::Hill &&
      std::abs(trajectory.final_value) < grid.near_critical_threshold()) {
    return Bin::NearCritical;
  }
  switch (info.kind) {
    case CellKind::DeepWell: return Bin::DeepWell;
    case CellKind::ShallowWell: return Bin::ShallowWell;
    case CellKind::Hill: return Bin::Hill;
  }
  return Bin::Hill;
}

EnsembleResult run_ensemble(const ScalarField& field, const CellGrid& grid,
                            const EnsembleConfig& config) {
  if (!config.region.valid()) {
    throw std::invalid_argument("invalid region: need min < max on both axes");
  }
  if (!(config.region == grid.region())) {
    throw std::invalid_argument("cell grid was built for a different region");
  }
  config.params.validate();
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");

  std::vector<TrialOutcome> outcomes(config.trials);
  const Region& region = config.region;

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      RngStream rng(config.base_seed, k);
      const double ux = rng.next_uniform();
      const double uy = rng.next_uniform();
      const Point2 start{region.x_min + ux * region.width(),
                         region.y_min + uy * region.height()};
      const Trajectory traj = run_trajectory(field, start, config.params, rng);
      const Bin bin = classify_endpoint(grid, traj);
      std::optional<CellIndex> cell;
      if (bin != Bin::OutOfRegion) cell = grid.cell_of(traj.end);
      outcomes[k] = TrialOutcome{k,   traj.start,       traj.end,
                                 cell, bin,             traj.steps_taken,
                                 traj.final_grad_norm, traj.final_value};
    }
  };

  const int workers = resolve_workers(config.workers, config.trials);
  if (workers <= 1) {
    run_range(0, config.trials);
  } else {
    const std::uint64_t chunk = (config.trials + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = chunk * static_cast<std::uint64_t>(w);
      const std::uint64_t hi = std::min(config.trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          const std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  EnsembleStats stats = aggregate(grid, outcomes);
  return {std::move(outcomes), std::move(stats)};
}

RatioInterval confidence_interval(std::uint64_t n_shallow, std::uint64_t n_deep) {
  if (n_deep == 0) {
    throw std::invalid_argument("ratio undefined: no deep-well endpoints");
  }
  const double d = static_cast<double>(n_deep);
  if (n_shallow == 0) {
    return {0.0, -std::log(0.05) / d};
  }
  const double s = static_cast<double>(n_shallow);
  const double r = s / d;
  const double se = r * std::sqrt(1.0 / s + 1.0 / d);
  return {std::max(0.0, r - 1.96 * se), r + 1.96 * se};
}

std::uint64_t derive_point_seed(std::uint64_t base_seed, std::size_t tau_index,
                                std::size_t eps_index) {
  const std::uint64_t a = 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(tau_index) + 1);
  const std::uint64_t b = 0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(eps_index) + 1);
  return mix64(mix64(base_seed + a) + b);
}

std::vector<RunSummary> run_sweep(const ScalarField& field, const CellGrid& grid,
                                  const Region& region, const SweepConfig& config) {
  if (config.tau_list.empty()) throw std::invalid_argument("tau_list must not be empty");
  for (double tau : config.tau_list) {
    if (!(tau > 0.0)) throw std::invalid_argument("every tau must be positive");
  }
  if (config.eps_count < 1) throw std::invalid_argument("eps_count must be at least 1");
  if (!(config.eps_min >= 0.0) || !(config.eps_max >= config.eps_min)) {
    throw std::invalid_argument("need 0 <= eps_min <= eps_max");
  }
  if (config.trials_per_point < 1 || config.steps_per_trial < 1) {
    throw std::invalid_argument("trials_per_point and steps_per_trial must be at least 1");
  }

  std::vector<RunSummary> rows;
  rows.reserve(config.tau_list.size() * static_cast<std::size_t>(config.eps_count));
  for (std::size_t ti = 0; ti < config.tau_list.size(); ++ti) {
    for (int ei = 0; ei < config.eps_count; ++ei) {
      const double eps =
          config.eps_count == 1
              ? config.eps_min
              : config.eps_min + (config.eps_max - config.eps_min) *
                                     static_cast<double>(ei) / (config.eps_count - 1);
      DescentParams params;
      params.tau = config.tau_list[ti];
      params.eps = eps;
      params.max_steps = config.steps_per_trial;
      params.grad_tol = 0.0;  // sweep trials run their full step budget
      params.escape_bound = config.escape_bound;

      EnsembleConfig ec;
      ec.region = region;
      ec.params = params;
      ec.trials = config.trials_per_point;
      ec.base_seed = derive_point_seed(config.base_seed, ti, static_cast<std::size_t>(ei));
      ec.workers = config.workers;

      EnsembleResult result = run_ensemble(field, grid, ec);
      rows.push_back(RunSummary{params.tau, eps, config.trials_per_point,
                                config.steps_per_trial, std::move(result.stats)});
    }
  }
  return rows;
}

}  // namespace basinlab
