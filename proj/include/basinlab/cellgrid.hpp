#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "basinlab/field.hpp"

namespace basinlab {

enum class CellKind { DeepWell, ShallowWell, Hill };

struct CellInfo {
  CellKind kind = CellKind::Hill;
  // Minimum of f over the closed cell. Wells store the (negative) depth;
  // hill cells bounded by zero lines store 0.
  double min_value = 0.0;
};

struct CellIndex {
  int i = 0;  // x interval index
  int j = 0;  // y interval index
  friend bool operator==(CellIndex, CellIndex) = default;
};

struct CellRect {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

// Raised when the zero lines of the field cannot produce a usable partition:
// a zero line lies within 1e-12 of another boundary (sliver cell; nudge the
// region), or the zero set is not grid-shaped at all.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Partition of a rectangular region by the zero lines of a scalar field.
// The field keeps one sign on the interior of every cell. Immutable after
// construction; safe for concurrent reads.
class CellGrid {
 public:
  CellGrid(Region region, std::vector<double> x_lines, std::vector<double> y_lines,
           std::vector<CellInfo> cells, double deep_depth, double shallow_depth);

  const Region& region() const { return region_; }
  const std::vector<double>& x_lines() const { return x_lines_; }
  const std::vector<double>& y_lines() const { return y_lines_; }
  int nx() const { return static_cast<int>(x_lines_.size()) - 1; }
  int ny() const { return static_cast<int>(y_lines_.size()) - 1; }
  std::size_t n_cells() const { return cells_.size(); }

  std::size_t flat_index(CellIndex c) const {
    return static_cast<std::size_t>(c.i) * static_cast<std::size_t>(ny()) + c.j;
  }
  const CellInfo& cell(CellIndex c) const { return cells_[flat_index(c)]; }
  CellRect cell_rect(CellIndex c) const;

  // Cell containing p under the half-open convention [line_k, line_{k+1});
  // absent when p lies outside the region (upper edges included).
  std::optional<CellIndex> cell_of(Point2 p) const;

  // Positive magnitudes of the deepest and shallowest well species.
  double deep_depth() const { return deep_depth_; }
  double shallow_depth() const { return shallow_depth_; }

  // Endpoints in a well cell with |f| below this are parked near a zero line
  // or saddle plateau rather than inside the well proper.
  double near_critical_threshold() const { return 0.05 * shallow_depth_; }

 private:
  Region region_;
  std::vector<double> x_lines_;
  std::vector<double> y_lines_;
  std::vector<CellInfo> cells_;  // indexed i * ny + j
  double deep_depth_ = 0.0;
  double shallow_depth_ = 0.0;
};

// Analytic grid for the builtin landscape: zero lines are the half-integer
// multiples (x) and the quarter/half-odd-integer families (y); per-cell
// extrema come from closed-form calculus on the separable factors. Wells are
// labeled deep or shallow by whichever of the two known depths is nearer.
CellGrid build_cell_grid(const BuiltinField& field, const Region& region);

struct ScanOptions {
  int probe_lines = 9;       // probe rows for x lines, columns for y lines
  int line_samples = 4096;   // samples per probe line
  int scale_samples = 64;    // lattice for the global magnitude estimate
  double cluster_tol = 1e-5;        // fraction of the axis span
  double min_probe_fraction = 0.5;  // probes that must agree on a line
  int validation_samples = 9;       // per axis, per cell, for sign checks
  int min_scan_samples = 48;        // coarse per-cell minimization lattice
};

// Sampling-based grid for arbitrary fields: locates axis-aligned zero lines
// (sign changes and tangential touch zeros) along probe rows and columns,
// keeps lines confirmed by a majority of probes, then classifies cells from
// sampled minima. Wells at least half as deep as the deepest count as deep.
// Fails with GridError when the zero set is not grid-shaped.
CellGrid scan_cell_grid(const ScalarField& field, const Region& region,
                        const ScanOptions& options = {});

}  // namespace basinlab
