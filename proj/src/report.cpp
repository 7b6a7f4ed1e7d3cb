#include "stes/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "stes/error.hpp"

namespace stes {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// 1, 2 or 5 times a power of ten, giving about `target` intervals.
double nice_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string gap_cell(const std::optional<double>& gap) {
  return gap ? fmt::format("{:.2f}", *gap * 100.0) : std::string();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError(fmt::format("cannot write {}", p.string()));
  return out;
}

}  // namespace

std::vector<ReportRow> report_rows(const std::vector<SimulationTrace>& traces,
                                   const SimulationTrace* benchmark) {
  std::vector<ReportRow> rows;
  for (const SimulationTrace& tr : traces) {
    ReportRow r;
    r.method = tr.method;
    r.horizon_days = tr.horizon_days;
    r.cost = tr.total_cost;
    r.runtime_s = tr.runtime_s;
    if (benchmark != nullptr) r.gap = suboptimality_gap(tr, *benchmark);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "method,horizon_days,cost_eur,gap_pct,runtime_s\n";
  for (const ReportRow& r : rows) {
    out << fmt::format("{},{},{:.6f},{},{:.3f}\n", r.method, r.horizon_days,
                       r.cost, gap_cell(r.gap), r.runtime_s);
  }
}

std::string format_table_text(const std::vector<ReportRow>& rows) {
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"Method", "Horizon [days]", "Cost [EUR]", "Subopt. gap",
                   "Runtime [s]"});
  for (const ReportRow& r : rows) {
    cells.push_back({r.method, fmt::format("{}", r.horizon_days),
                     fmt::format("{:.2f}", r.cost),
                     r.gap ? fmt::format("{:.2f}%", *r.gap * 100.0) : "-",
                     fmt::format("{:.1f}", r.runtime_s)});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& row = cells[i];
    out += fmt::format("{:<{}}", row[0], width[0]);
    for (std::size_t c = 1; c < 5; ++c) {
      out += fmt::format("  {:>{}}", row[c], width[c]);
    }
    out += '\n';
    if (i == 0) {
      std::size_t total = width[0];
      for (std::size_t c = 1; c < 5; ++c) total += 2 + width[c];
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

std::string trace_label(const SimulationTrace& tr) {
  if (tr.benchmark) return tr.method;
  return fmt::format("{} {} d", tr.method, tr.horizon_days);
}

void write_level_plot_svg(std::ostream& out,
                          const std::vector<SimulationTrace>& traces) {
  constexpr double kW = 960.0;
  constexpr double kH = 440.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 20.0;
  constexpr double kBottom = 50.0;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  std::size_t hours = 1;
  double y_max = 0.0;
  for (const auto& tr : traces) {
    hours = std::max(hours, tr.steps());
    for (double v : tr.state[1]) y_max = std::max(y_max, v);
  }
  const double y_step = nice_step(y_max > 0.0 ? y_max : 1.0, 5);
  const double y_top = std::max(y_step, std::ceil(y_max / y_step) * y_step);
  const double x_step = nice_step(static_cast<double>(hours), 8);
  auto sx = [&](double h) { return kLeft + pw * h / static_cast<double>(hours); };
  auto sy = [&](double v) { return kTop + ph * (1.0 - v / y_top); };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kW, kH, kW, kH);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double v = 0.0; v <= y_top + 1e-9; v += y_step) {
    out << fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
        "stroke=\"#dddddd\"/>\n",
        kLeft, sy(v), kLeft + pw, sy(v));
    out << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
        kLeft - 6, sy(v) + 4, v);
  }
  for (double h = 0.0; h <= static_cast<double>(hours) + 1e-9; h += x_step) {
    out << fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
        "stroke=\"#000000\"/>\n",
        sx(h), kTop + ph, sx(h), kTop + ph + 5);
    out << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
        sx(h), kTop + ph + 18, h);
  }
  out << fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
      "fill=\"none\" stroke=\"#000000\"/>\n",
      kLeft, kTop, pw, ph);
  out << fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">Hour</text>\n",
      kLeft + pw / 2, kH - 10);
  out << fmt::format(
      "<text transform=\"translate(16 {:.1f}) rotate(-90)\" "
      "text-anchor=\"middle\">Heat storage level [kWh]</text>\n",
      kTop + ph / 2);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
        color);
    out << fmt::format("{:.2f},{:.2f}", sx(0.0), sy(tr.e_init[1]));
    for (std::size_t t = 0; t < tr.steps(); ++t) {
      out << fmt::format(" {:.2f},{:.2f}", sx(static_cast<double>(t + 1)),
                         sy(tr.state[1][t]));
    }
    out << "\"/>\n";
    const double ly = kTop + 16.0 + 16.0 * static_cast<double>(i);
    out << fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
        "stroke=\"{}\" stroke-width=\"2\"/>\n",
        kLeft + pw - 150, ly - 4, kLeft + pw - 130, ly - 4, color);
    out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
                       kLeft + pw - 125, ly, xml_escape(trace_label(tr)));
  }
  out << "</svg>\n";
}

void write_level_points_csv(std::ostream& out,
                            const std::vector<SimulationTrace>& traces) {
  out << "series,hour,e_SH\n";
  for (const auto& tr : traces) {
    const std::string label = trace_label(tr);
    out << fmt::format("{},0,{}\n", label, tr.e_init[1]);
    for (std::size_t t = 0; t < tr.steps(); ++t) {
      out << fmt::format("{},{},{}\n", label, t + 1, tr.state[1][t]);
    }
  }
}

ReportFiles emit_report(const std::vector<SimulationTrace>& traces,
                        const SimulationTrace* benchmark,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ReportFiles files{dir / "results.csv", dir / "results.txt",
                    dir / "sh_levels.svg", dir / "sh_levels.csv"};
  const auto rows = report_rows(traces, benchmark);
  {
    auto out = open_out(files.table_csv);
    write_table_csv(out, rows);
  }
  {
    auto out = open_out(files.table_text);
    out << format_table_text(rows);
  }
  {
    auto out = open_out(files.plot_svg);
    write_level_plot_svg(out, traces);
  }
  {
    auto out = open_out(files.plot_points);
    write_level_points_csv(out, traces);
  }
  return files;
}

}  // namespace stes
