#pragma once

// CSV form of simulation traces and target series.
//
// A trace file starts with "# key: value" lines (method, horizon_days,
// benchmark, dt_hours, total_cost, runtime_s, e_init_SE, e_init_SH, windows)
// followed by a header row and one row per step: 1-based hour, window id,
// one column per arc flow and the two storage levels. Numbers are written in
// shortest round-trip form, so reading a file back reproduces the trace.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "stes/horizon.hpp"

namespace stes {

void write_trace(std::ostream& out, const SimulationTrace& trace);
void write_trace(const std::filesystem::path& path, const SimulationTrace& trace);

// Throws InputError naming the source and line on malformed content.
SimulationTrace read_trace(std::istream& in, const std::string& name);
SimulationTrace read_trace(const std::filesystem::path& path);

// "hour,level" rows, hour 1-based.
void write_targets(std::ostream& out, const TargetSeries& targets);
void write_targets(const std::filesystem::path& path,
                   const TargetSeries& targets);
TargetSeries read_targets(std::istream& in, const std::string& name);
TargetSeries read_targets(const std::filesystem::path& path);

}  // namespace stes
