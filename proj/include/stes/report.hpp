#pragma once

// Results table (CSV and aligned text) and heat storage level plots (SVG and
// the plotted points as CSV).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stes/horizon.hpp"

namespace stes {

struct ReportRow {
  std::string method;
  std::size_t horizon_days = 0;
  double cost = 0.0;           // EUR
  std::optional<double> gap;   // fraction; absent without a benchmark
  double runtime_s = 0.0;
};

// One row per trace, in order. Gaps are relative to `benchmark` when given.
std::vector<ReportRow> report_rows(const std::vector<SimulationTrace>& traces,
                                   const SimulationTrace* benchmark);

// Columns method, horizon_days, cost_eur, gap_pct, runtime_s. Gaps are in
// percent with two decimals; costs carry six decimals so that gaps can be
// recomputed from the table.
void write_table_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string format_table_text(const std::vector<ReportRow>& rows);

// Legend label of a trace, e.g. "hybrid 6 d".
std::string trace_label(const SimulationTrace& trace);

void write_level_plot_svg(std::ostream& out,
                          const std::vector<SimulationTrace>& traces);
// Columns series, hour, e_SH.
void write_level_points_csv(std::ostream& out,
                            const std::vector<SimulationTrace>& traces);

struct ReportFiles {
  std::filesystem::path table_csv;
  std::filesystem::path table_text;
  std::filesystem::path plot_svg;
  std::filesystem::path plot_points;
};

// Writes results.csv, results.txt, sh_levels.svg and sh_levels.csv into
// `dir`, creating it if needed.
ReportFiles emit_report(const std::vector<SimulationTrace>& traces,
                        const SimulationTrace* benchmark,
                        const std::filesystem::path& dir);

}  // namespace stes
