#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "basinlab/experiment.hpp"
#include "basinlab/field.hpp"
#include "basinlab/report.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item)) out.push_back(item);
  return out;
}

bool bit_equal(double a, double b) {
  std::uint64_t ua = 0, ub = 0;
  std::memcpy(&ua, &a, sizeof a);
  std::memcpy(&ub, &b, sizeof b);
  return ua == ub;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

EnsembleResult small_run(double eps, std::uint64_t trials, std::uint64_t seed) {
  BuiltinField f;
  static const CellGrid grid = build_cell_grid(f, Region{});
  EnsembleConfig cfg;
  cfg.region = Region{};
  cfg.params.tau = 0.01;
  cfg.params.eps = eps;
  cfg.params.max_steps = 500;
  cfg.trials = trials;
  cfg.base_seed = seed;
  cfg.workers = 0;
  return run_ensemble(f, grid, cfg);
}

}  // namespace

TEST_CASE("trials csv has the fixed header and one row per trial") {
  const EnsembleResult result = small_run(0.05, 1, 3);
  const std::string csv = trials_csv(result.outcomes);
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] ==
        "trial_index,x0,y0,x_end,y_end,cell_i,cell_j,bin,steps_taken,final_grad_norm,"
        "final_value");
  CHECK(split(rows[1], ',').size() == 11);
}

TEST_CASE("csv doubles round-trip bit for bit") {
  const EnsembleResult result = small_run(0.09, 200, 11);
  const std::string csv = trials_csv(result.outcomes);
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() == result.outcomes.size() + 1);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto fields = split(rows[k], ',');
    REQUIRE(fields.size() == 11);
    const TrialOutcome& o = result.outcomes[k - 1];
    CHECK(std::stoull(fields[0]) == o.trial_index);
    CHECK(bit_equal(std::strtod(fields[1].c_str(), nullptr), o.start.x));
    CHECK(bit_equal(std::strtod(fields[2].c_str(), nullptr), o.start.y));
    CHECK(bit_equal(std::strtod(fields[3].c_str(), nullptr), o.end.x));
    CHECK(bit_equal(std::strtod(fields[4].c_str(), nullptr), o.end.y));
    if (o.cell) {
      CHECK(std::stoi(fields[5]) == o.cell->i);
      CHECK(std::stoi(fields[6]) == o.cell->j);
    } else {
      CHECK(fields[5].empty());
      CHECK(fields[6].empty());
    }
    CHECK(fields[7] == bin_name(o.bin));
    CHECK(std::stoull(fields[8]) == o.steps_taken);
    CHECK(bit_equal(std::strtod(fields[9].c_str(), nullptr), o.final_grad_norm));
    CHECK(bit_equal(std::strtod(fields[10].c_str(), nullptr), o.final_value));
  }
}

TEST_CASE("summary csv round-trips r and phi exactly") {
  const EnsembleResult result = small_run(0.05, 500, 17);
  std::vector<RunSummary> rows{{0.01, 0.05, 500, 500, result.stats}};
  const std::string csv = summary_csv(rows);
  const auto text_rows = lines_of(csv);
  REQUIRE(text_rows.size() == 2);
  CHECK(text_rows[0] ==
        "tau,eps,trials,steps,n_deep,n_shallow,n_hill,n_near_critical,n_out,r,r_ci_lo,"
        "r_ci_hi,phi");
  const auto fields = split(text_rows[1], ',');
  REQUIRE(fields.size() == 13);
  CHECK(bit_equal(std::strtod(fields[9].c_str(), nullptr), result.stats.r));
  CHECK(bit_equal(std::strtod(fields[10].c_str(), nullptr), result.stats.r_ci_lo));
  CHECK(bit_equal(std::strtod(fields[11].c_str(), nullptr), result.stats.r_ci_hi));
  CHECK(bit_equal(std::strtod(fields[12].c_str(), nullptr), result.stats.phi));
}

TEST_CASE("histogram csv lists every cell with bounds and class") {
  BuiltinField f;
  const CellGrid grid = build_cell_grid(f, Region{});
  const EnsembleResult result = small_run(0.05, 300, 23);
  const std::string csv = histogram_csv(grid, result.stats.cell_counts);
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() == grid.n_cells() + 1);
  CHECK(rows[0] == "cell_i,cell_j,x_lo,x_hi,y_lo,y_hi,cell_class,count");

  std::uint64_t total = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto fields = split(rows[k], ',');
    REQUIRE(fields.size() == 8);
    total += std::stoull(fields[7]);
  }
  CHECK(total == result.stats.trials - result.stats.n_out);

  CHECK_THROWS_AS(histogram_csv(grid, std::vector<std::uint64_t>(3, 0)),
                  std::invalid_argument);
}

TEST_CASE("file writing reports the failing path") {
  try {
    write_text_file("/nonexistent-dir/file.csv", "x");
    FAIL("expected a write error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/file.csv") != std::string::npos);
  }
}

TEST_CASE("histogram svg is well formed and draws one rectangle per cell") {
  BuiltinField f;
  const CellGrid grid = build_cell_grid(f, Region{});

  SUBCASE("all-zero counts") {
    const std::vector<std::uint64_t> counts(grid.n_cells(), 0);
    const std::string svg = render_histogram_svg(grid, counts);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
    CHECK(count_occurrences(svg, "class=\"cell\"") == grid.n_cells());
    CHECK(svg.find("max cell count = 0") != std::string::npos);
  }

  SUBCASE("single nonzero cell gets the saturated fill") {
    std::vector<std::uint64_t> counts(grid.n_cells(), 0);
    counts[5] = 12;
    const std::string svg = render_histogram_svg(grid, counts);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
    CHECK(count_occurrences(svg, "fill=\"rgb(38,90,150)\"") == 1);
    CHECK(svg.find(">12<") != std::string::npos);
  }

  SUBCASE("real ensemble counts") {
    const EnsembleResult result = small_run(0.05, 2000, 29);
    const std::string svg = render_histogram_svg(grid, result.stats.cell_counts);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
  }
}

TEST_CASE("endpoint histogram is dominated by a deep-well cell under moderate noise") {
  BuiltinField f;
  const CellGrid grid = build_cell_grid(f, Region{});
  const EnsembleResult result = small_run(0.05, 10000, 42);
  std::size_t best = 0;
  for (std::size_t k = 1; k < result.stats.cell_counts.size(); ++k) {
    if (result.stats.cell_counts[k] > result.stats.cell_counts[best]) best = k;
  }
  const int i = static_cast<int>(best) / grid.ny();
  const int j = static_cast<int>(best) % grid.ny();
  CHECK(grid.cell({i, j}).kind == CellKind::DeepWell);
}

TEST_CASE("sweep svg renders one panel per tau and omits undefined points") {
  BuiltinField f;
  const CellGrid grid = build_cell_grid(f, Region{});
  const EnsembleResult base = small_run(0.05, 100, 31);

  SUBCASE("single row, single panel") {
    const std::vector<RunSummary> rows{{0.01, 0.05, 100, 500, base.stats}};
    const std::string svg = render_sweep_svg(rows);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
    CHECK(count_occurrences(svg, "class=\"panel\"") == 1);
    CHECK(count_occurrences(svg, "class=\"pt\"") == 1);
  }

  SUBCASE("five panels in tau order") {
    std::vector<RunSummary> rows;
    for (double tau : {0.001, 0.01, 0.02, 0.04, 0.06}) {
      for (double eps : {0.0, 0.15, 0.3}) {
        rows.push_back({tau, eps, 100, 500, base.stats});
      }
    }
    const std::string svg = render_sweep_svg(rows);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
    CHECK(count_occurrences(svg, "class=\"panel\"") == 5);
    CHECK(svg.find("tau = 0.001") < svg.find("tau = 0.01"));
    CHECK(svg.find("tau = 0.01") < svg.find("tau = 0.02"));
    CHECK(svg.find("tau = 0.04") < svg.find("tau = 0.06"));
  }

  SUBCASE("undefined ratios are dropped and counted") {
    EnsembleStats undefined_stats = base.stats;
    undefined_stats.r_defined = false;
    undefined_stats.r = std::numeric_limits<double>::quiet_NaN();
    const std::vector<RunSummary> rows{{0.01, 0.0, 100, 500, base.stats},
                                       {0.01, 0.1, 100, 500, undefined_stats}};
    const std::string svg = render_sweep_svg(rows);
    std::string err;
    CHECK_MESSAGE(testutil::well_formed_xml(svg, &err), err);
    CHECK(count_occurrences(svg, "class=\"pt\"") == 1);
    CHECK(svg.find("omitted 1 point(s) with undefined r") != std::string::npos);
  }

  CHECK_THROWS_AS(render_sweep_svg({}), std::invalid_argument);
}

TEST_CASE("written files carry LF endings and exact bytes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "basinlab_report_test";
  fs::create_directories(dir);
  const EnsembleResult result = small_run(0.05, 50, 37);
  const std::string csv = trials_csv(result.outcomes);
  write_trials_csv(dir / "trials.csv", result.outcomes);

  std::ifstream in(dir / "trials.csv", std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == csv);
  CHECK(buffer.str().find('\r') == std::string::npos);
  fs::remove_all(dir);
}
