#include "basinlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace basinlab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void append_u64(std::string& out, std::uint64_t v) { out += std::to_string(v); }

}  // namespace

const char* bin_name(Bin bin) {
  switch (bin) {
    case Bin::DeepWell: return "deep_well";
    case Bin::ShallowWell: return "shallow_well";
    case Bin::Hill: return "hill";
    case Bin::NearCritical: return "near_critical";
    case Bin::OutOfRegion: return "out_of_region";
  }
  return "?";
}

const char* cell_kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::DeepWell: return "deep_well";
    case CellKind::ShallowWell: return "shallow_well";
    case CellKind::Hill: return "hill";
  }
  return "?";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string trials_csv(const std::vector<TrialOutcome>& outcomes) {
  std::string out =
      "trial_index,x0,y0,x_end,y_end,cell_i,cell_j,bin,steps_taken,final_grad_norm,"
      "final_value\n";
  for (const TrialOutcome& o : outcomes) {
    append_u64(out, o.trial_index);
    out += ',';
    out += fmt17(o.start.x);
    out += ',';
    out += fmt17(o.start.y);
    out += ',';
    out += fmt17(o.end.x);
    out += ',';
    out += fmt17(o.end.y);
    out += ',';
    if (o.cell) {
      out += std::to_string(o.cell->i);
      out += ',';
      out += std::to_string(o.cell->j);
    } else {
      out += ',';
    }
    out += ',';
    out += bin_name(o.bin);
    out += ',';
    append_u64(out, o.steps_taken);
    out += ',';
    out += fmt17(o.final_grad_norm);
    out += ',';
    out += fmt17(o.final_value);
    out += '\n';
  }
  return out;
}

std::string summary_csv(const std::vector<RunSummary>& rows) {
  std::string out =
      "tau,eps,trials,steps,n_deep,n_shallow,n_hill,n_near_critical,n_out,r,r_ci_lo,"
      "r_ci_hi,phi\n";
  for (const RunSummary& row : rows) {
    out += fmt17(row.tau);
    out += ',';
    out += fmt17(row.eps);
    out += ',';
    append_u64(out, row.trials);
    out += ',';
    append_u64(out, row.steps);
    out += ',';
    append_u64(out, row.stats.n_deep);
    out += ',';
    append_u64(out, row.stats.n_shallow);
    out += ',';
    append_u64(out, row.stats.n_hill);
    out += ',';
    append_u64(out, row.stats.n_near_critical);
    out += ',';
    append_u64(out, row.stats.n_out);
    out += ',';
    out += fmt17(row.stats.r);
    out += ',';
    out += fmt17(row.stats.r_ci_lo);
    out += ',';
    out += fmt17(row.stats.r_ci_hi);
    out += ',';
    out += fmt17(row.stats.phi);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const CellGrid& grid, const std::vector<std::uint64_t>& counts) {
  if (counts.size() != grid.n_cells()) {
    throw std::invalid_argument("histogram counts do not match the grid size");
  }
  std::string out = "cell_i,cell_j,x_lo,x_hi,y_lo,y_hi,cell_class,count\n";
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const CellIndex c{i, j};
      const CellRect r = grid.cell_rect(c);
      out += std::to_string(i);
      out += ',';
      out += std::to_string(j);
      out += ',';
      out += fmt17(r.x_lo);
      out += ',';
      out += fmt17(r.x_hi);
      out += ',';
      out += fmt17(r.y_lo);
      out += ',';
      out += fmt17(r.y_hi);
      out += ',';
      out += cell_kind_name(grid.cell(c).kind);
      out += ',';
      append_u64(out, counts[grid.flat_index(c)]);
      out += '\n';
    }
  }
  return out;
}

void write_trials_csv(const std::filesystem::path& path,
                      const std::vector<TrialOutcome>& outcomes) {
  write_text_file(path, trials_csv(outcomes));
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows) {
  write_text_file(path, summary_csv(rows));
}

void write_histogram_csv(const std::filesystem::path& path, const CellGrid& grid,
                         const std::vector<std::uint64_t>& counts) {
  write_text_file(path, histogram_csv(grid, counts));
}

namespace {

struct Rgb {
  int r, g, b;
};

Rgb heat_color(double t) {
  // white for empty cells toward a saturated blue at the maximum count
  const auto lerp = [t](int a, int b) {
    return static_cast<int>(std::lround(a + t * (b - a)));
  };
  return {lerp(255, 38), lerp(255, 90), lerp(255, 150)};
}

void append_cell_rect(std::string& svg, const char* css_class, double x, double y, double w,
                      double h, Rgb fill, CellKind kind) {
  svg += "  <rect class=\"" + std::string(css_class) + "\" x=\"" + fmt2(x) + "\" y=\"" +
         fmt2(y) + "\" width=\"" + fmt2(w) + "\" height=\"" + fmt2(h) + "\" fill=\"rgb(" +
         std::to_string(fill.r) + "," + std::to_string(fill.g) + "," +
         std::to_string(fill.b) + ")\"";
  switch (kind) {
    case CellKind::DeepWell:
      svg += " stroke=\"#000000\" stroke-width=\"2\"";
      break;
    case CellKind::ShallowWell:
      svg += " stroke=\"#000000\" stroke-width=\"1\" stroke-dasharray=\"6,3\"";
      break;
    case CellKind::Hill:
      svg += " stroke=\"#9a9a9a\" stroke-width=\"0.75\"";
      break;
  }
  svg += "/>\n";
}

}  // namespace

std::string render_histogram_svg(const CellGrid& grid,
                                 const std::vector<std::uint64_t>& counts) {
  if (counts.size() != grid.n_cells()) {
    throw std::invalid_argument("histogram counts do not match the grid size");
  }
  const Region& region = grid.region();
  const double plot_w = 640.0;
  const double scale = plot_w / region.width();
  const double plot_h = region.height() * scale;
  const double ml = 56.0, mt = 44.0, mr = 24.0, mb = 96.0;
  const double total_w = ml + plot_w + mr;
  const double total_h = mt + plot_h + mb;

  const auto px = [&](double x) { return ml + (x - region.x_min) * scale; };
  const auto py = [&](double y) { return mt + (region.y_max - y) * scale; };

  std::uint64_t max_count = 0;
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) {
    max_count = std::max(max_count, c);
    total += c;
  }

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(total_w) +
         "\" height=\"" + fmt2(total_h) + "\" viewBox=\"0 0 " + fmt2(total_w) + " " +
         fmt2(total_h) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + fmt2(total_w) + "\" height=\"" + fmt2(total_h) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "  <text x=\"" + fmt2(ml) + "\" y=\"26\" font-family=\"sans-serif\" font-size=\"15\""
         " fill=\"#111111\">endpoints per cell (" + std::to_string(total) +
         " in-region endpoints)</text>\n";

  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const CellIndex c{i, j};
      const CellRect r = grid.cell_rect(c);
      const std::uint64_t count = counts[grid.flat_index(c)];
      const double t = max_count == 0
                           ? 0.0
                           : static_cast<double>(count) / static_cast<double>(max_count);
      append_cell_rect(svg, "cell", px(r.x_lo), py(r.y_hi), (r.x_hi - r.x_lo) * scale,
                       (r.y_hi - r.y_lo) * scale, heat_color(t), grid.cell(c).kind);
      const double cx = px(0.5 * (r.x_lo + r.x_hi));
      const double cy = py(0.5 * (r.y_lo + r.y_hi));
      svg += "  <text x=\"" + fmt2(cx) + "\" y=\"" + fmt2(cy + 4.0) +
             "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" fill=\"" +
             (t > 0.55 ? "#ffffff" : "#222222") + "\">" + std::to_string(count) + "</text>\n";
    }
  }

  for (double x : grid.x_lines()) {
    svg += "  <text x=\"" + fmt2(px(x)) + "\" y=\"" + fmt2(mt + plot_h + 16.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\""
           " fill=\"#333333\">" + fmtg(x) + "</text>\n";
  }
  for (double y : grid.y_lines()) {
    svg += "  <text x=\"" + fmt2(ml - 6.0) + "\" y=\"" + fmt2(py(y) + 3.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\""
           " fill=\"#333333\">" + fmtg(y) + "</text>\n";
  }

  // legend
  const double ly = mt + plot_h + 40.0;
  struct LegendEntry {
    CellKind kind;
    const char* label;
  };
  const LegendEntry entries[3] = {{CellKind::DeepWell, "deep well"},
                                  {CellKind::ShallowWell, "shallow well"},
                                  {CellKind::Hill, "hill"}};
  double lx = ml;
  for (const LegendEntry& entry : entries) {
    append_cell_rect(svg, "legend-key", lx, ly, 18.0, 12.0, heat_color(0.0), entry.kind);
    svg += "  <text x=\"" + fmt2(lx + 24.0) + "\" y=\"" + fmt2(ly + 10.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" + entry.label +
           "</text>\n";
    lx += 150.0;
  }
  svg += "  <text x=\"" + fmt2(ml) + "\" y=\"" + fmt2(ly + 32.0) +
         "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">fill scales"
         " linearly with count; max cell count = " + std::to_string(max_count) +
         "</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string render_sweep_svg(const std::vector<RunSummary>& rows) {
  if (rows.empty()) throw std::invalid_argument("sweep table is empty");

  std::vector<double> taus;
  for (const RunSummary& row : rows) {
    if (std::find(taus.begin(), taus.end(), row.tau) == taus.end()) taus.push_back(row.tau);
  }

  double eps_lo = rows.front().eps, eps_hi = rows.front().eps;
  double r_max = 0.0;
  std::size_t omitted = 0;
  for (const RunSummary& row : rows) {
    eps_lo = std::min(eps_lo, row.eps);
    eps_hi = std::max(eps_hi, row.eps);
    if (row.stats.r_defined) {
      r_max = std::max(r_max, row.stats.r);
    } else {
      ++omitted;
    }
  }
  const double y_max = r_max > 0.0 ? 1.1 * r_max : 1.0;
  const double x_span = eps_hi > eps_lo ? eps_hi - eps_lo : 1.0;

  const double panel_w = 230.0, panel_h = 190.0, gap = 34.0;
  const double ml = 58.0, mt = 46.0, mb = 64.0;
  const double total_w = ml + taus.size() * panel_w + (taus.size() - 1) * gap + 24.0;
  const double total_h = mt + panel_h + mb;

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(total_w) +
         "\" height=\"" + fmt2(total_h) + "\" viewBox=\"0 0 " + fmt2(total_w) + " " +
         fmt2(total_h) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + fmt2(total_w) + "\" height=\"" + fmt2(total_h) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "  <text x=\"" + fmt2(ml) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\""
         " fill=\"#111111\">shallow/deep ratio r against noise scale eps</text>\n";

  for (std::size_t p = 0; p < taus.size(); ++p) {
    const double x0 = ml + p * (panel_w + gap);
    const double y0 = mt;
    const auto px = [&](double eps) { return x0 + (eps - eps_lo) / x_span * panel_w; };
    const auto py = [&](double r) { return y0 + panel_h - r / y_max * panel_h; };

    svg += "  <g class=\"panel\">\n";
    svg += "    <rect x=\"" + fmt2(x0) + "\" y=\"" + fmt2(y0) + "\" width=\"" + fmt2(panel_w) +
           "\" height=\"" + fmt2(panel_h) + "\" fill=\"none\" stroke=\"#444444\""
           " stroke-width=\"1\"/>\n";
    svg += "    <text x=\"" + fmt2(x0 + 0.5 * panel_w) + "\" y=\"" + fmt2(y0 - 8.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
           " fill=\"#111111\">tau = " + fmtg(taus[p]) + "</text>\n";

    for (int k = 0; k <= 3; ++k) {
      const double eps = eps_lo + x_span * k / 3.0;
      svg += "    <line x1=\"" + fmt2(px(eps)) + "\" y1=\"" + fmt2(y0 + panel_h) + "\" x2=\"" +
             fmt2(px(eps)) + "\" y2=\"" + fmt2(y0 + panel_h + 5.0) +
             "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
      svg += "    <text x=\"" + fmt2(px(eps)) + "\" y=\"" + fmt2(y0 + panel_h + 18.0) +
             "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\""
             " fill=\"#333333\">" + fmt2(eps) + "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
      const double r = y_max * k / 4.0;
      svg += "    <line x1=\"" + fmt2(x0 - 5.0) + "\" y1=\"" + fmt2(py(r)) + "\" x2=\"" +
             fmt2(x0) + "\" y2=\"" + fmt2(py(r)) +
             "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
      if (p == 0) {
        svg += "    <text x=\"" + fmt2(x0 - 9.0) + "\" y=\"" + fmt2(py(r) + 3.0) +
               "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\""
               " fill=\"#333333\">" + fmt2(r) + "</text>\n";
      }
    }
    svg += "    <text x=\"" + fmt2(x0 + 0.5 * panel_w) + "\" y=\"" +
           fmt2(y0 + panel_h + 34.0) + "\" font-family=\"sans-serif\" font-size=\"11\""
           " text-anchor=\"middle\" fill=\"#333333\">eps</text>\n";

    std::string points;
    std::string markers;
    for (const RunSummary& row : rows) {
      if (row.tau != taus[p] || !row.stats.r_defined) continue;
      const double cx = px(row.eps);
      const double cy = py(row.stats.r);
      points += fmt2(cx) + "," + fmt2(cy) + " ";
      markers += "    <circle class=\"pt\" cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) +
                 "\" r=\"2.5\" fill=\"#205080\"/>\n";
    }
    if (!points.empty()) {
      points.pop_back();
      svg += "    <polyline class=\"series\" points=\"" + points +
             "\" fill=\"none\" stroke=\"#205080\" stroke-width=\"1.5\"/>\n";
    }
    svg += markers;
    svg += "  </g>\n";
  }

  svg += "  <text x=\"18\" y=\"" + fmt2(mt + 0.5 * panel_h) +
         "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\""
         " transform=\"rotate(-90 18 " + fmt2(mt + 0.5 * panel_h) + ")\""
         " text-anchor=\"middle\">r</text>\n";
  if (omitted > 0) {
    svg += "  <text x=\"" + fmt2(ml) + "\" y=\"" + fmt2(total_h - 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">omitted " +
           std::to_string(omitted) + " point(s) with undefined r (no deep-well endpoints)" +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace basinlab
