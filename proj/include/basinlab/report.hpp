#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "basinlab/experiment.hpp"

namespace basinlab {

const char* bin_name(Bin bin);                 // deep_well, shallow_well, ...
const char* cell_kind_name(CellKind kind);     // deep_well, shallow_well, hill

// Writes the exact bytes; LF line endings on every platform. I/O failures
// raise std::runtime_error carrying the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// CSV files carry a header row; reals are printed with 17 significant digits
// so a re-parse recovers each double bit for bit. Row order is trial index
// for trials.csv, input order for summary.csv, and x-major cell order for
// histogram.csv.
//
// trials.csv:    trial_index,x0,y0,x_end,y_end,cell_i,cell_j,bin,
//                steps_taken,final_grad_norm,final_value
// summary.csv:   tau,eps,trials,steps,n_deep,n_shallow,n_hill,
//                n_near_critical,n_out,r,r_ci_lo,r_ci_hi,phi
// histogram.csv: cell_i,cell_j,x_lo,x_hi,y_lo,y_hi,cell_class,count
std::string trials_csv(const std::vector<TrialOutcome>& outcomes);
std::string summary_csv(const std::vector<RunSummary>& rows);
std::string histogram_csv(const CellGrid& grid, const std::vector<std::uint64_t>& counts);

void write_trials_csv(const std::filesystem::path& path,
                      const std::vector<TrialOutcome>& outcomes);
void write_summary_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows);
void write_histogram_csv(const std::filesystem::path& path, const CellGrid& grid,
                         const std::vector<std::uint64_t>& counts);

// Standalone SVG heatmap: one rectangle per cell at its true coordinates,
// fill intensity linear in count (normalized by the maximum), outline style
// by cell class, count printed in each cell.
std::string render_histogram_svg(const CellGrid& grid,
                                 const std::vector<std::uint64_t>& counts);

// Standalone SVG with one panel per tau: eps on the horizontal axis, the
// shallow/deep ratio r on the vertical axis. Points with undefined r are
// omitted and counted in a note.
std::string render_sweep_svg(const std::vector<RunSummary>& rows);

}  // namespace basinlab
