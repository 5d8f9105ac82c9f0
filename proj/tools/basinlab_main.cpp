// basinlab command line: flow (small-step noiseless descent), jitter (one
// noisy-descent ensemble), and sweep (tau x eps grid of ensembles).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "basinlab/cellgrid.hpp"
#include "basinlab/experiment.hpp"
#include "basinlab/expr.hpp"
#include "basinlab/report.hpp"

namespace fs = std::filesystem;
using namespace basinlab;

namespace {

// Flag or config-file problems; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + text +
                     "' as a nonnegative integer");
  }
}

int parse_int_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + text + "' as an integer");
  }
}

std::vector<double> parse_double_list_value(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  const auto flush = [&] {
    if (!item.empty()) {
      out.push_back(parse_double_value(key, item));
      item.clear();
    }
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat `key = value` file; keys mirror the long flag names without dashes.
std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    out[key] = value;
  }
  return out;
}

// Ties a CLI option to a config key; explicit flags beat config values.
struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const std::string&)> apply;
};

class Bindings {
 public:
  void add(const std::string& key, CLI::Option* option,
           std::function<void(const std::string&)> apply) {
    items_.push_back({key, option, std::move(apply)});
  }

  void merge(const std::map<std::string, std::string>& config) const {
    for (const auto& [key, value] : config) {
      const Binding* found = nullptr;
      for (const Binding& b : items_) {
        if (b.key == key) {
          found = &b;
          break;
        }
      }
      if (!found) throw UsageError("unknown config key '" + key + "'");
      if (found->option->count() == 0) found->apply(value);
    }
  }

 private:
  std::vector<Binding> items_;
};

struct CommonOpts {
  std::string function;  // empty means the builtin landscape
  double xmin = -1.0, xmax = 1.0, ymin = -1.25, ymax = 1.25;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  std::string out = "out";
  int workers = 0;  // 0 = all hardware threads
  std::string config;

  Region region() const { return Region{xmin, xmax, ymin, ymax}; }
};

void add_common_flags(CLI::App* sub, CommonOpts& o, Bindings& b, std::uint64_t default_trials,
                      const char* trials_help) {
  o.trials = default_trials;
  b.add("function",
        sub->add_option("--function", o.function,
                        "scalar field expression in x and y (default: builtin landscape)"),
        [&o](const std::string& v) { o.function = v; });
  b.add("xmin", sub->add_option("--xmin", o.xmin, "region lower x bound")->capture_default_str(),
        [&o](const std::string& v) { o.xmin = parse_double_value("xmin", v); });
  b.add("xmax", sub->add_option("--xmax", o.xmax, "region upper x bound")->capture_default_str(),
        [&o](const std::string& v) { o.xmax = parse_double_value("xmax", v); });
  b.add("ymin", sub->add_option("--ymin", o.ymin, "region lower y bound")->capture_default_str(),
        [&o](const std::string& v) { o.ymin = parse_double_value("ymin", v); });
  b.add("ymax", sub->add_option("--ymax", o.ymax, "region upper y bound")->capture_default_str(),
        [&o](const std::string& v) { o.ymax = parse_double_value("ymax", v); });
  b.add("trials", sub->add_option("--trials", o.trials, trials_help)->capture_default_str(),
        [&o](const std::string& v) { o.trials = parse_u64_value("trials", v); });
  b.add("seed", sub->add_option("--seed", o.seed, "base seed")->capture_default_str(),
        [&o](const std::string& v) { o.seed = parse_u64_value("seed", v); });
  b.add("out", sub->add_option("--out", o.out, "output directory")->capture_default_str(),
        [&o](const std::string& v) { o.out = v; });
  b.add("workers",
        sub->add_option("--workers", o.workers,
                        "worker threads (0 = all cores); results do not depend on it")
            ->capture_default_str(),
        [&o](const std::string& v) { o.workers = parse_int_value("workers", v); });
  sub->add_option("--config", o.config,
                  "key = value file; explicit flags override config entries");
}

void validate_common(const CommonOpts& o) {
  if (!o.region().valid()) {
    throw UsageError("invalid region: need xmin < xmax and ymin < ymax");
  }
  if (o.trials < 1) throw UsageError("trials must be at least 1");
  if (o.workers < 0) throw UsageError("workers must be nonnegative");
  if (o.out.empty()) throw UsageError("output directory must not be empty");
}

struct FieldBundle {
  std::unique_ptr<ScalarField> field;
  std::unique_ptr<CellGrid> grid;
};

FieldBundle make_field_and_grid(const std::string& function, const Region& region) {
  FieldBundle fb;
  if (function.empty()) {
    auto field = std::make_unique<BuiltinField>();
    fb.grid = std::make_unique<CellGrid>(build_cell_grid(*field, region));
    fb.field = std::move(field);
  } else {
    auto field = std::make_unique<ExprField>(function);
    fb.grid = std::make_unique<CellGrid>(scan_cell_grid(*field, region));
    fb.field = std::move(field);
  }
  return fb;
}

void print_summary_line(const RunSummary& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "tau=%g eps=%g trials=%llu r=%g phi=%g deep=%llu shallow=%llu hill=%llu "
                "near_critical=%llu out=%llu",
                row.tau, row.eps, static_cast<unsigned long long>(row.trials), row.stats.r,
                row.stats.phi, static_cast<unsigned long long>(row.stats.n_deep),
                static_cast<unsigned long long>(row.stats.n_shallow),
                static_cast<unsigned long long>(row.stats.n_hill),
                static_cast<unsigned long long>(row.stats.n_near_critical),
                static_cast<unsigned long long>(row.stats.n_out));
  std::cout << buf << "\n";
}

void write_ensemble_outputs(const fs::path& out_dir, const CellGrid& grid,
                            const EnsembleResult& result, const RunSummary& row) {
  fs::create_directories(out_dir);
  write_trials_csv(out_dir / "trials.csv", result.outcomes);
  write_summary_csv(out_dir / "summary.csv", {row});
  write_histogram_csv(out_dir / "histogram.csv", grid, result.stats.cell_counts);
  write_text_file(out_dir / "histogram.svg",
                  render_histogram_svg(grid, result.stats.cell_counts));
}

int run_single_ensemble(const CommonOpts& common, const DescentParams& params,
                        std::uint64_t steps_reported) {
  const Region region = common.region();
  const FieldBundle fb = make_field_and_grid(common.function, region);

  EnsembleConfig config;
  config.region = region;
  config.params = params;
  config.trials = common.trials;
  config.base_seed = common.seed;
  config.workers = common.workers;

  const EnsembleResult result = run_ensemble(*fb.field, *fb.grid, config);
  RunSummary row{params.tau, params.eps, common.trials, steps_reported, result.stats};
  write_ensemble_outputs(common.out, *fb.grid, result, row);
  print_summary_line(row);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient descent laboratory on 2D landscapes"};
  app.require_subcommand(1);

  CommonOpts flow_common, jitter_common, sweep_common;
  Bindings flow_bind, jitter_bind, sweep_bind;

  // flow: approximate gradient flow with a small noiseless step
  CLI::App* flow = app.add_subcommand("flow", "noiseless small-step descent baseline");
  double flow_tau = 0.001;
  double flow_grad_tol = 1e-6;
  std::uint64_t flow_max_steps = 20000;
  add_common_flags(flow, flow_common, flow_bind, 10000, "number of trials");
  flow_bind.add("tau", flow->add_option("--tau", flow_tau, "step size")->capture_default_str(),
                [&](const std::string& v) { flow_tau = parse_double_value("tau", v); });
  flow_bind.add("grad-tol",
                flow->add_option("--grad-tol", flow_grad_tol,
                                 "stop once the gradient norm falls below this")
                    ->capture_default_str(),
                [&](const std::string& v) { flow_grad_tol = parse_double_value("grad-tol", v); });
  flow_bind.add("max-steps",
                flow->add_option("--max-steps", flow_max_steps, "step budget per trial")
                    ->capture_default_str(),
                [&](const std::string& v) { flow_max_steps = parse_u64_value("max-steps", v); });

  // jitter: noisy descent at fixed tau and eps
  CLI::App* jitter = app.add_subcommand("jitter", "descent with Gaussian jitter");
  double jitter_tau = 0.01;
  double jitter_eps = 0.01;
  std::uint64_t jitter_steps = 500;
  add_common_flags(jitter, jitter_common, jitter_bind, 10000, "number of trials");
  jitter_bind.add("tau",
                  jitter->add_option("--tau", jitter_tau, "step size")->capture_default_str(),
                  [&](const std::string& v) { jitter_tau = parse_double_value("tau", v); });
  jitter_bind.add("eps",
                  jitter->add_option("--eps", jitter_eps,
                                     "per-coordinate std of the Gaussian jitter")
                      ->capture_default_str(),
                  [&](const std::string& v) { jitter_eps = parse_double_value("eps", v); });
  jitter_bind.add("steps",
                  jitter->add_option("--steps", jitter_steps, "steps per trial")
                      ->capture_default_str(),
                  [&](const std::string& v) { jitter_steps = parse_u64_value("steps", v); });

  // sweep: grid of ensembles over tau and eps
  CLI::App* sweep = app.add_subcommand("sweep", "tau x eps grid of jitter ensembles");
  SweepConfig sweep_cfg;
  add_common_flags(sweep, sweep_common, sweep_bind, 500, "trials per grid point");
  sweep_bind.add("tau-list",
                 sweep->add_option("--tau-list", sweep_cfg.tau_list, "step sizes to sweep")
                     ->delimiter(',')
                     ->capture_default_str(),
                 [&](const std::string& v) { sweep_cfg.tau_list = parse_double_list_value("tau-list", v); });
  sweep_bind.add("eps-min",
                 sweep->add_option("--eps-min", sweep_cfg.eps_min, "smallest noise scale")
                     ->capture_default_str(),
                 [&](const std::string& v) { sweep_cfg.eps_min = parse_double_value("eps-min", v); });
  sweep_bind.add("eps-max",
                 sweep->add_option("--eps-max", sweep_cfg.eps_max, "largest noise scale")
                     ->capture_default_str(),
                 [&](const std::string& v) { sweep_cfg.eps_max = parse_double_value("eps-max", v); });
  sweep_bind.add("eps-count",
                 sweep->add_option("--eps-count", sweep_cfg.eps_count,
                                   "number of evenly spaced noise scales")
                     ->capture_default_str(),
                 [&](const std::string& v) { sweep_cfg.eps_count = parse_int_value("eps-count", v); });
  std::uint64_t sweep_steps = 500;
  sweep_bind.add("steps",
                 sweep->add_option("--steps", sweep_steps, "steps per trial")
                     ->capture_default_str(),
                 [&](const std::string& v) { sweep_steps = parse_u64_value("steps", v); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << e.what() << "\n";
    std::cerr << "run 'basinlab --help' for usage\n";
    return 2;
  }

  try {
    CommonOpts* common = nullptr;
    Bindings* bindings = nullptr;
    if (flow->parsed()) {
      common = &flow_common;
      bindings = &flow_bind;
    } else if (jitter->parsed()) {
      common = &jitter_common;
      bindings = &jitter_bind;
    } else {
      common = &sweep_common;
      bindings = &sweep_bind;
    }
    if (!common->config.empty()) {
      bindings->merge(load_config_file(common->config));
    }
    validate_common(*common);

    if (flow->parsed()) {
      if (!(flow_tau > 0.0)) throw UsageError("tau must be positive");
      if (!(flow_grad_tol >= 0.0)) throw UsageError("grad-tol must be nonnegative");
      if (flow_max_steps < 1) throw UsageError("max-steps must be at least 1");
      DescentParams params;
      params.tau = flow_tau;
      params.eps = 0.0;
      params.max_steps = flow_max_steps;
      params.grad_tol = flow_grad_tol;
      return run_single_ensemble(flow_common, params, flow_max_steps);
    }

    if (jitter->parsed()) {
      if (!(jitter_tau > 0.0)) throw UsageError("tau must be positive");
      if (!(jitter_eps >= 0.0)) throw UsageError("eps must be nonnegative");
      if (jitter_steps < 1) throw UsageError("steps must be at least 1");
      DescentParams params;
      params.tau = jitter_tau;
      params.eps = jitter_eps;
      params.max_steps = jitter_steps;
      params.grad_tol = 0.0;  // noisy runs use the full step budget
      return run_single_ensemble(jitter_common, params, jitter_steps);
    }

    // sweep
    if (sweep_cfg.tau_list.empty()) throw UsageError("tau-list must not be empty");
    for (double tau : sweep_cfg.tau_list) {
      if (!(tau > 0.0)) throw UsageError("every tau must be positive");
    }
    if (!(sweep_cfg.eps_min >= 0.0) || !(sweep_cfg.eps_max >= sweep_cfg.eps_min)) {
      throw UsageError("need 0 <= eps-min <= eps-max");
    }
    if (sweep_cfg.eps_count < 1) throw UsageError("eps-count must be at least 1");
    if (sweep_steps < 1) throw UsageError("steps must be at least 1");

    sweep_cfg.trials_per_point = sweep_common.trials;
    sweep_cfg.steps_per_trial = sweep_steps;
    sweep_cfg.base_seed = sweep_common.seed;
    sweep_cfg.workers = sweep_common.workers;

    const Region region = sweep_common.region();
    const FieldBundle fb = make_field_and_grid(sweep_common.function, region);
    const std::vector<RunSummary> rows = run_sweep(*fb.field, *fb.grid, region, sweep_cfg);

    fs::create_directories(sweep_common.out);
    write_summary_csv(fs::path(sweep_common.out) / "summary.csv", rows);
    write_text_file(fs::path(sweep_common.out) / "sweep.svg", render_sweep_svg(rows));
    std::cout << "sweep taus=" << sweep_cfg.tau_list.size()
              << " eps_points=" << sweep_cfg.eps_count << " rows=" << rows.size()
              << " out=" << sweep_common.out << "\n";
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run 'basinlab --help' for usage\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
