#include "basinlab/cellgrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace basinlab {

namespace {

constexpr double kDegenerateGap = 1e-12;

// Interior critical points of sin(pi t) sin(2 pi t) sit at integers and at
// k +- acos(1/sqrt 3)/pi; of cos(pi t) cos(2 pi t) at integers and at
// k +- acos(1/sqrt 6)/pi.
double crit_offset_x() {
  static const double c = std::acos(1.0 / std::sqrt(3.0)) / kPi;
  return c;
}

double crit_offset_y() {
  static const double c = std::acos(1.0 / std::sqrt(6.0)) / kPi;
  return c;
}

struct Extrema {
  double lo = 0.0;
  double hi = 0.0;
};

template <typename F>
Extrema factor_extrema(F&& factor, double crit, double a, double b) {
  const double fa = factor(a);
  const double fb = factor(b);
  Extrema e{std::min(fa, fb), std::max(fa, fb)};
  const long long k_lo = static_cast<long long>(std::floor(a)) - 1;
  const long long k_hi = static_cast<long long>(std::ceil(b)) + 1;
  for (long long k = k_lo; k <= k_hi; ++k) {
    for (double off : {0.0, crit, 1.0 - crit}) {
      const double t = static_cast<double>(k) + off;
      if (t > a && t < b) {
        const double v = factor(t);
        e.lo = std::min(e.lo, v);
        e.hi = std::max(e.hi, v);
      }
    }
  }
  return e;
}

// All values phase + k*step inside [lo, hi].
std::vector<double> arithmetic_zeros(double phase, double step, double lo, double hi) {
  std::vector<double> out;
  const long long k_lo = static_cast<long long>(std::floor((lo - phase) / step)) - 1;
  const long long k_hi = static_cast<long long>(std::ceil((hi - phase) / step)) + 1;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double t = phase + static_cast<double>(k) * step;
    if (t >= lo && t <= hi) out.push_back(t);
  }
  return out;
}

std::vector<double> assemble_lines(double lo, double hi, const std::vector<double>& zeros,
                                   const char* axis) {
  std::vector<double> lines{lo, hi};
  for (double z : zeros) {
    if (z >= lo && z <= hi) lines.push_back(z);
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
    if (lines[k + 1] - lines[k] < kDegenerateGap) {
      throw GridError(std::string("degenerate cell on the ") + axis +
                      " axis: a zero line lies within 1e-12 of another boundary; "
                      "nudge the region");
    }
  }
  return lines;
}

int bin_of(const std::vector<double>& lines, double v) {
  if (v < lines.front() || v >= lines.back()) return -1;
  const auto it = std::upper_bound(lines.begin(), lines.end(), v);
  return static_cast<int>(it - lines.begin()) - 1;
}

}  // namespace

CellGrid::CellGrid(Region region, std::vector<double> x_lines, std::vector<double> y_lines,
                   std::vector<CellInfo> cells, double deep_depth, double shallow_depth)
    : region_(region),
      x_lines_(std::move(x_lines)),
      y_lines_(std::move(y_lines)),
      cells_(std::move(cells)),
      deep_depth_(deep_depth),
      shallow_depth_(shallow_depth) {}

CellRect CellGrid::cell_rect(CellIndex c) const {
  return {x_lines_[c.i], x_lines_[c.i + 1], y_lines_[c.j], y_lines_[c.j + 1]};
}

std::optional<CellIndex> CellGrid::cell_of(Point2 p) const {
  const int i = bin_of(x_lines_, p.x);
  if (i < 0) return std::nullopt;
  const int j = bin_of(y_lines_, p.y);
  if (j < 0) return std::nullopt;
  return CellIndex{i, j};
}

CellGrid build_cell_grid(const BuiltinField&, const Region& region) {
  if (!region.valid()) throw std::invalid_argument("invalid region: need min < max on both axes");

  // Zeros of sin(pi x) sin(2 pi x) are the half-integers; zeros of
  // cos(pi y) cos(2 pi y) are the half-odd-integers and 1/4 + k/2.
  const std::vector<double> x_zeros = arithmetic_zeros(0.0, 0.5, region.x_min, region.x_max);
  std::vector<double> y_zeros = arithmetic_zeros(0.5, 1.0, region.y_min, region.y_max);
  {
    const std::vector<double> quarter = arithmetic_zeros(0.25, 0.5, region.y_min, region.y_max);
    y_zeros.insert(y_zeros.end(), quarter.begin(), quarter.end());
  }

  const std::vector<double> xl = assemble_lines(region.x_min, region.x_max, x_zeros, "x");
  const std::vector<double> yl = assemble_lines(region.y_min, region.y_max, y_zeros, "y");

  const int nx = static_cast<int>(xl.size()) - 1;
  const int ny = static_cast<int>(yl.size()) - 1;
  std::vector<CellInfo> cells(static_cast<std::size_t>(nx) * ny);

  const double deep = builtin_deep_depth();
  const double shallow = builtin_shallow_depth();

  for (int i = 0; i < nx; ++i) {
    const Extrema ge = factor_extrema(builtin_factor_x, crit_offset_x(), xl[i], xl[i + 1]);
    const double cx = 0.5 * (xl[i] + xl[i + 1]);
    const double gc = builtin_factor_x(cx);
    for (int j = 0; j < ny; ++j) {
      const Extrema he = factor_extrema(builtin_factor_y, crit_offset_y(), yl[j], yl[j + 1]);
      const double cy = 0.5 * (yl[j] + yl[j + 1]);
      const double center = gc * builtin_factor_y(cy);

      const double products[4] = {ge.lo * he.lo, ge.lo * he.hi, ge.hi * he.lo, ge.hi * he.hi};
      const double m = *std::min_element(std::begin(products), std::end(products));

      CellInfo info;
      if (center > 0.0) {
        info.kind = CellKind::Hill;
        info.min_value = std::max(0.0, m);
      } else {
        const double depth = -m;
        info.kind = std::abs(depth - deep) <= std::abs(depth - shallow) ? CellKind::DeepWell
                                                                        : CellKind::ShallowWell;
        info.min_value = m;
      }
      cells[static_cast<std::size_t>(i) * ny + j] = info;
    }
  }

  return CellGrid(region, xl, yl, std::move(cells), deep, shallow);
}

namespace {

// ---- sampling-based grid construction ----

struct LineHit {
  double pos;
  int probe;
};

template <typename F1D>
void scan_probe_zeros(F1D&& f, double lo, double hi, int n, double global_scale, int probe,
                      std::vector<LineHit>& hits, int& usable_probes) {
  std::vector<double> xs(n), vs(n);
  double row_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    vs[i] = f(xs[i]);
    row_scale = std::max(row_scale, std::abs(vs[i]));
  }
  // A probe along which the field vanishes identically carries no information.
  if (row_scale < 1e-10 * global_scale) return;
  ++usable_probes;

  for (int i = 0; i + 1 < n; ++i) {
    const double a = vs[i];
    const double b = vs[i + 1];
    if (a == 0.0) {
      hits.push_back({xs[i], probe});
      continue;
    }
    if (a * b < 0.0) {
      double x0 = xs[i], x1 = xs[i + 1], f0 = a;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if (fm == 0.0) {
          x0 = x1 = m;
          break;
        }
        if ((fm > 0.0) == (f0 > 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      hits.push_back({0.5 * (x0 + x1), probe});
    }
  }
  if (vs[n - 1] == 0.0) hits.push_back({xs[n - 1], probe});

  // Tangential zeros do not change sign; look for near-zero local minima of
  // |f| and tighten them with a ternary search.
  for (int i = 1; i + 1 < n; ++i) {
    const double m0 = std::abs(vs[i - 1]);
    const double m1 = std::abs(vs[i]);
    const double m2 = std::abs(vs[i + 1]);
    if (m1 == 0.0 || m1 > m0 || m1 > m2) continue;
    if (vs[i - 1] * vs[i] < 0.0 || vs[i] * vs[i + 1] < 0.0) continue;  // already a crossing
    if (m1 >= 1e-4 * row_scale) continue;
    double a = xs[i - 1], b = xs[i + 1];
    for (int it = 0; it < 80; ++it) {
      const double p = a + (b - a) / 3.0;
      const double q = b - (b - a) / 3.0;
      if (std::abs(f(p)) < std::abs(f(q))) {
        b = q;
      } else {
        a = p;
      }
    }
    const double xm = 0.5 * (a + b);
    if (std::abs(f(xm)) < 1e-9 * row_scale) hits.push_back({xm, probe});
  }
}

std::vector<double> cluster_hits(std::vector<LineHit> hits, int usable_probes, double lo,
                                 double hi, const ScanOptions& opt) {
  std::vector<double> lines;
  if (hits.empty() || usable_probes == 0) return lines;
  std::sort(hits.begin(), hits.end(), [](const LineHit& a, const LineHit& b) {
    return a.pos < b.pos;
  });

  const double span = hi - lo;
  const double tol = opt.cluster_tol * span;
  const int needed =
      std::max(1, static_cast<int>(std::ceil(opt.min_probe_fraction * usable_probes)));

  std::size_t begin = 0;
  auto flush = [&](std::size_t end) {
    std::vector<int> probes;
    std::vector<double> pos;
    for (std::size_t k = begin; k < end; ++k) {
      probes.push_back(hits[k].probe);
      pos.push_back(hits[k].pos);
    }
    std::sort(probes.begin(), probes.end());
    const int distinct =
        static_cast<int>(std::unique(probes.begin(), probes.end()) - probes.begin());
    if (distinct >= needed) {
      std::sort(pos.begin(), pos.end());
      const double line = pos[pos.size() / 2];
      // the region edges are boundaries already
      if (line - lo > 1e-7 * span && hi - line > 1e-7 * span) lines.push_back(line);
    }
  };
  for (std::size_t k = 1; k <= hits.size(); ++k) {
    if (k == hits.size() || hits[k].pos - hits[k - 1].pos > tol) {
      flush(k);
      begin = k;
    }
  }
  return lines;
}

double cell_min_scan(const ScalarField& field, const CellRect& r, const ScanOptions& opt) {
  const int n = std::max(8, opt.min_scan_samples);
  double bx = r.x_lo, by = r.y_lo;
  double bv = field.value({bx, by});
  for (int i = 0; i < n; ++i) {
    const double x = r.x_lo + (r.x_hi - r.x_lo) * static_cast<double>(i) / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double y = r.y_lo + (r.y_hi - r.y_lo) * static_cast<double>(j) / (n - 1);
      const double v = field.value({x, y});
      if (v < bv) {
        bv = v;
        bx = x;
        by = y;
      }
    }
  }
  double wx = (r.x_hi - r.x_lo) / (n - 1);
  double wy = (r.y_hi - r.y_lo) / (n - 1);
  for (int round = 0; round < 3; ++round) {
    const double x_lo = std::max(r.x_lo, bx - wx);
    const double x_hi = std::min(r.x_hi, bx + wx);
    const double y_lo = std::max(r.y_lo, by - wy);
    const double y_hi = std::min(r.y_hi, by + wy);
    constexpr int m = 13;
    for (int i = 0; i < m; ++i) {
      const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / (m - 1);
      for (int j = 0; j < m; ++j) {
        const double y = y_lo + (y_hi - y_lo) * static_cast<double>(j) / (m - 1);
        const double v = field.value({x, y});
        if (v < bv) {
          bv = v;
          bx = x;
          by = y;
        }
      }
    }
    wx /= 6.0;
    wy /= 6.0;
  }
  return bv;
}

}  // namespace

CellGrid scan_cell_grid(const ScalarField& field, const Region& region,
                        const ScanOptions& opt) {
  if (!region.valid()) throw std::invalid_argument("invalid region: need min < max on both axes");

  double global_scale = 0.0;
  {
    const int n = std::max(8, opt.scale_samples);
    for (int i = 0; i < n; ++i) {
      const double x = region.x_min + region.width() * (i + 0.5) / n;
      for (int j = 0; j < n; ++j) {
        const double y = region.y_min + region.height() * (j + 0.5) / n;
        global_scale = std::max(global_scale, std::abs(field.value({x, y})));
      }
    }
  }
  if (global_scale == 0.0) {
    throw GridError("field is identically zero over the region; no cell structure");
  }

  // Golden-fraction probe offsets avoid symmetric coincidences with zeros.
  const auto probe_at = [](double lo, double span, int k, int count) {
    return lo + span * (k + 0.381966) / count;
  };

  std::vector<LineHit> x_hits;
  int x_probes = 0;
  for (int k = 0; k < opt.probe_lines; ++k) {
    const double yr = probe_at(region.y_min, region.height(), k, opt.probe_lines);
    scan_probe_zeros([&](double x) { return field.value({x, yr}); }, region.x_min, region.x_max,
                     opt.line_samples, global_scale, k, x_hits, x_probes);
  }
  std::vector<LineHit> y_hits;
  int y_probes = 0;
  for (int k = 0; k < opt.probe_lines; ++k) {
    const double xc = probe_at(region.x_min, region.width(), k, opt.probe_lines);
    scan_probe_zeros([&](double y) { return field.value({xc, y}); }, region.y_min, region.y_max,
                     opt.line_samples, global_scale, k, y_hits, y_probes);
  }

  const std::vector<double> x_zeros =
      cluster_hits(std::move(x_hits), x_probes, region.x_min, region.x_max, opt);
  const std::vector<double> y_zeros =
      cluster_hits(std::move(y_hits), y_probes, region.y_min, region.y_max, opt);

  const std::vector<double> xl = assemble_lines(region.x_min, region.x_max, x_zeros, "x");
  const std::vector<double> yl = assemble_lines(region.y_min, region.y_max, y_zeros, "y");

  const int nx = static_cast<int>(xl.size()) - 1;
  const int ny = static_cast<int>(yl.size()) - 1;
  std::vector<CellInfo> cells(static_cast<std::size_t>(nx) * ny);
  std::vector<bool> is_well(cells.size(), false);

  const double tiny = 1e-12 * global_scale;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const CellRect r{xl[i], xl[i + 1], yl[j], yl[j + 1]};
      int pos = 0, neg = 0;
      const int s = std::max(3, opt.validation_samples);
      for (int a = 0; a < s; ++a) {
        const double x = r.x_lo + (r.x_hi - r.x_lo) * (a + 0.5) / s;
        for (int b = 0; b < s; ++b) {
          const double y = r.y_lo + (r.y_hi - r.y_lo) * (b + 0.5) / s;
          const double v = field.value({x, y});
          if (v > tiny) {
            ++pos;
          } else if (v < -tiny) {
            ++neg;
          }
        }
      }
      if (pos > 0 && neg > 0) {
        throw GridError(
            "field changes sign inside a cell; its zero set is not an "
            "axis-aligned grid over this region, so endpoints cannot be "
            "classified by cell");
      }
      const std::size_t idx = static_cast<std::size_t>(i) * ny + j;
      is_well[idx] = neg > 0;
      const double m = cell_min_scan(field, r, opt);
      cells[idx].min_value = is_well[idx] ? m : std::max(0.0, m);
      cells[idx].kind = CellKind::Hill;
    }
  }

  double deepest = 0.0;
  double shallowest = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!is_well[k]) continue;
    const double depth = -cells[k].min_value;
    deepest = std::max(deepest, depth);
    shallowest = shallowest == 0.0 ? depth : std::min(shallowest, depth);
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!is_well[k]) continue;
    const double depth = -cells[k].min_value;
    cells[k].kind = depth >= 0.5 * deepest ? CellKind::DeepWell : CellKind::ShallowWell;
  }

  return CellGrid(region, xl, yl, std::move(cells), deepest, shallowest);
}

}  // namespace basinlab
