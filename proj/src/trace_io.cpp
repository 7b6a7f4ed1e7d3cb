#include "stes/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "stes/error.hpp"

namespace stes {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  if (s == "inf" || s == "-inf" || s == "nan") {
    throw InputError(where + ": non-finite value");
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(fmt::format("{}: not a number: '{}'", where, s));
  }
  return v;
}

std::size_t to_size(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(fmt::format("{}: not a count: '{}'", where, s));
  }
  return v;
}

std::string arc_column(const Arc& a) {
  return fmt::format("p_{}_{}", to_string(a.from), to_string(a.to));
}

}  // namespace

void write_trace(std::ostream& out, const SimulationTrace& tr) {
  out << "# method: " << tr.method << '\n';
  out << "# horizon_days: " << tr.horizon_days << '\n';
  out << "# benchmark: " << (tr.benchmark ? 1 : 0) << '\n';
  out << fmt::format("# dt_hours: {}\n", tr.dt_hours);
  out << fmt::format("# total_cost: {}\n", tr.total_cost);
  out << fmt::format("# runtime_s: {}\n", tr.runtime_s);
  out << fmt::format("# e_init_SE: {}\n", tr.e_init[0]);
  out << fmt::format("# e_init_SH: {}\n", tr.e_init[1]);
  out << "# windows: " << tr.windows.size() << '\n';
  out << "hour,window";
  for (const Arc& a : tr.arcs) out << ',' << arc_column(a);
  out << ",e_SE,e_SH\n";
  std::string line;
  for (std::size_t t = 0; t < tr.steps(); ++t) {
    line = fmt::format("{},{}", t + 1, tr.window_of_step[t]);
    for (std::size_t a = 0; a < tr.arcs.size(); ++a) {
      line += fmt::format(",{}", tr.flows[a][t]);
    }
    line += fmt::format(",{},{}\n", tr.state[0][t], tr.state[1][t]);
    out << line;
  }
}

void write_trace(const std::filesystem::path& path, const SimulationTrace& tr) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  write_trace(out, tr);
}

SimulationTrace read_trace(std::istream& in, const std::string& name) {
  SimulationTrace tr;
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) {
        throw InputError(fmt::format("{} line {}: malformed metadata", name, lineno));
      }
      meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    header = split_commas(line);
    break;
  }
  if (header.size() < 4 || header[0] != "hour" || header[1] != "window" ||
      header[header.size() - 2] != "e_SE" || header.back() != "e_SH") {
    throw InputError(fmt::format("{} line {}: not a trace header", name, lineno));
  }
  for (std::size_t c = 2; c + 2 < header.size(); ++c) {
    const std::string& h = header[c];
    const auto sep = h.find('_', 2);
    std::optional<NodeId> from;
    std::optional<NodeId> to;
    if (h.rfind("p_", 0) == 0 && sep != std::string::npos) {
      from = parse_node(std::string_view(h).substr(2, sep - 2));
      to = parse_node(std::string_view(h).substr(sep + 1));
    }
    if (!from || !to) {
      throw InputError(fmt::format("{} line {}: bad flow column '{}'", name,
                                   lineno, h));
    }
    tr.arcs.push_back({*from, *to});
  }
  tr.flows.assign(tr.arcs.size(), {});

  auto meta_at = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) {
      throw InputError(fmt::format("{}: missing '# {}:' line", name, key));
    }
    return it->second;
  };
  const std::string where = name + " header";
  tr.method = meta_at("method");
  tr.horizon_days = to_size(meta_at("horizon_days"), where);
  tr.benchmark = meta_at("benchmark") == "1";
  tr.dt_hours = to_double(meta_at("dt_hours"), where);
  tr.total_cost = to_double(meta_at("total_cost"), where);
  tr.runtime_s = to_double(meta_at("runtime_s"), where);
  tr.e_init = {to_double(meta_at("e_init_SE"), where),
               to_double(meta_at("e_init_SH"), where)};
  const std::size_t n_windows = to_size(meta_at("windows"), where);

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    const std::string at = fmt::format("{} line {}", name, lineno);
    if (cells.size() != header.size()) {
      throw InputError(fmt::format("{}: expected {} cells, got {}", at,
                                   header.size(), cells.size()));
    }
    if (to_size(cells[0], at) != tr.steps() + 1) {
      throw InputError(at + ": hours must count up from 1");
    }
    tr.window_of_step.push_back(to_size(cells[1], at));
    for (std::size_t a = 0; a < tr.arcs.size(); ++a) {
      tr.flows[a].push_back(to_double(cells[2 + a], at));
    }
    tr.state[0].push_back(to_double(cells[cells.size() - 2], at));
    tr.state[1].push_back(to_double(cells.back(), at));
  }
  tr.windows.resize(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) tr.windows[w].index = w;
  return tr;
}

SimulationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return read_trace(in, path.string());
}

void write_targets(std::ostream& out, const TargetSeries& targets) {
  out << "hour,level\n";
  for (std::size_t h = 0; h < targets.level.size(); ++h) {
    out << fmt::format("{},{}\n", h + 1, targets.level[h]);
  }
}

void write_targets(const std::filesystem::path& path,
                   const TargetSeries& targets) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  write_targets(out, targets);
}

TargetSeries read_targets(std::istream& in, const std::string& name) {
  TargetSeries t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || split_commas(line) !=
                                     std::vector<std::string>{"hour", "level"}) {
    throw InputError(name + " line 1: expected header 'hour,level'");
  }
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    const std::string at = fmt::format("{} line {}", name, lineno);
    if (cells.size() != 2) throw InputError(at + ": expected 2 cells");
    if (to_size(cells[0], at) != t.level.size() + 1) {
      throw InputError(at + ": hours must count up from 1");
    }
    t.level.push_back(to_double(cells[1], at));
  }
  if (t.level.empty()) throw InputError(name + ": no target rows");
  return t;
}

TargetSeries read_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return read_targets(in, path.string());
}

}  // namespace stes
