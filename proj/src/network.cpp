#include "stes/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include <fmt/format.h>

#include "stes/error.hpp"

namespace stes {
namespace {

constexpr std::array<Arc, 16> kCanonicalArcs = {{
    {NodeId::PV, NodeId::DE},
    {NodeId::PV, NodeId::SE},
    {NodeId::PV, NodeId::HP},
    {NodeId::PV, NodeId::PG},
    {NodeId::PG, NodeId::DE},
    {NodeId::PG, NodeId::SE},
    {NodeId::PG, NodeId::HP},
    {NodeId::SE, NodeId::DE},
    {NodeId::SE, NodeId::HP},
    {NodeId::SE, NodeId::PG},
    {NodeId::ST, NodeId::DH},
    {NodeId::ST, NodeId::SH},
    {NodeId::AC, NodeId::SH},
    {NodeId::HP, NodeId::DH},
    {NodeId::HP, NodeId::SH},
    {NodeId::SH, NodeId::DH},
}};

bool is_demand(NodeId n) { return n == NodeId::DE || n == NodeId::DH; }

bool is_source(NodeId n) {
  return n == NodeId::PV || n == NodeId::ST || n == NodeId::AC;
}

bool is_canonical(const Arc& arc) {
  return std::find(kCanonicalArcs.begin(), kCanonicalArcs.end(), arc) !=
         kCanonicalArcs.end();
}

std::string fmt_num(double v) { return fmt::format("{:g}", v); }

}  // namespace

std::string_view to_string(NodeId node) {
  switch (node) {
    case NodeId::DE: return "DE";
    case NodeId::PV: return "PV";
    case NodeId::PG: return "PG";
    case NodeId::SE: return "SE";
    case NodeId::HP: return "HP";
    case NodeId::SH: return "SH";
    case NodeId::AC: return "AC";
    case NodeId::ST: return "ST";
    case NodeId::DH: return "DH";
  }
  return "?";
}

std::optional<NodeId> parse_node(std::string_view name) {
  for (NodeId n : kAllNodes) {
    if (to_string(n) == name) return n;
  }
  return std::nullopt;
}

std::string to_string(const Arc& arc) {
  return fmt::format("{}->{}", to_string(arc.from), to_string(arc.to));
}

std::span<const Arc> canonical_arcs() { return kCanonicalArcs; }

EnergyNetwork::EnergyNetwork(std::vector<Arc> arcs,
                             std::map<NodeId, StorageParams> storage,
                             HeatPumpParams heat_pump)
    : arcs_(std::move(arcs)),
      storage_(std::move(storage)),
      heat_pump_(heat_pump) {}

EnergyNetwork EnergyNetwork::canonical(const StorageParams& battery,
                                       const StorageParams& heat_storage,
                                       const HeatPumpParams& heat_pump) {
  return EnergyNetwork(
      std::vector<Arc>(kCanonicalArcs.begin(), kCanonicalArcs.end()),
      {{NodeId::SE, battery}, {NodeId::SH, heat_storage}}, heat_pump);
}

const StorageParams& EnergyNetwork::storage(NodeId node) const {
  auto it = storage_.find(node);
  if (it == storage_.end()) {
    throw InputError(
        fmt::format("node {} has no storage parameters", to_string(node)));
  }
  return it->second;
}

std::vector<NodeId> EnergyNetwork::inflow_nodes(NodeId node) const {
  std::vector<NodeId> out;
  for (NodeId n : kAllNodes) {
    if (arc_index({n, node})) out.push_back(n);
  }
  return out;
}

std::vector<NodeId> EnergyNetwork::outflow_nodes(NodeId node) const {
  std::vector<NodeId> out;
  for (NodeId n : kAllNodes) {
    if (arc_index({node, n})) out.push_back(n);
  }
  return out;
}

std::optional<std::size_t> EnergyNetwork::arc_index(Arc arc) const {
  auto it = std::find(arcs_.begin(), arcs_.end(), arc);
  if (it == arcs_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - arcs_.begin());
}

EnergyNetwork EnergyNetwork::with_storage(NodeId node,
                                          const StorageParams& params) const {
  auto storage = storage_;
  storage[node] = params;
  return EnergyNetwork(arcs_, std::move(storage), heat_pump_);
}

std::vector<Violation> validate_storage(NodeId node, const StorageParams& sp) {
  std::vector<Violation> v;
  const std::string who(to_string(node));
  auto fraction = [&](double x, const char* name) {
    if (!(x > 0.0 && x <= 1.0)) {
      v.push_back({fmt::format("{}.{}", who, name),
                   fmt::format("must lie in (0, 1], got {}", fmt_num(x))});
    }
  };
  fraction(sp.eta_ch, "eta_ch");
  fraction(sp.eta_dis, "eta_dis");
  fraction(sp.rho, "rho");
  if (!(sp.e_min >= 0.0)) {
    v.push_back({who + ".e_min", "must be >= 0"});
  }
  if (!(sp.e_min <= sp.e_max)) {
    v.push_back({who + ".e_max", "must be >= e_min"});
  }
  if (!(sp.e_init >= sp.e_min && sp.e_init <= sp.e_max)) {
    v.push_back({who + ".e_init",
                 fmt::format("must lie in [e_min, e_max] = [{}, {}], got {}",
                             fmt_num(sp.e_min), fmt_num(sp.e_max),
                             fmt_num(sp.e_init))});
  }
  if (sp.e_end && !(*sp.e_end >= sp.e_min && *sp.e_end <= sp.e_max)) {
    v.push_back({who + ".e_end",
                 fmt::format("must lie in [e_min, e_max] = [{}, {}], got {}",
                             fmt_num(sp.e_min), fmt_num(sp.e_max),
                             fmt_num(*sp.e_end))});
  }
  if (!(sp.p_ch_max >= 0.0)) {
    v.push_back({who + ".p_ch_max", "must be >= 0"});
  }
  if (!(sp.p_dis_max >= 0.0)) {
    v.push_back({who + ".p_dis_max", "must be >= 0"});
  }
  return v;
}

std::vector<Violation> validate_network(const EnergyNetwork& net) {
  std::vector<Violation> v;
  std::set<Arc> seen;
  for (const Arc& arc : net.arcs()) {
    const std::string name = to_string(arc);
    if (!seen.insert(arc).second) {
      v.push_back({name, "duplicate arc"});
    } else if (is_demand(arc.from)) {
      v.push_back({name, fmt::format("demand node {} has no outgoing arcs",
                                     to_string(arc.from))});
    } else if (is_source(arc.to)) {
      v.push_back({name, fmt::format("source node {} has no incoming arcs",
                                     to_string(arc.to))});
    } else if (!is_canonical(arc)) {
      v.push_back({name, "arc is not part of the system topology"});
    }
  }
  for (const Arc& arc : kCanonicalArcs) {
    if (!seen.contains(arc)) {
      v.push_back({to_string(arc), "required arc is missing"});
    }
  }
  for (NodeId node : {NodeId::SE, NodeId::SH}) {
    auto it = net.storage_map().find(node);
    if (it == net.storage_map().end()) {
      v.push_back({std::string(to_string(node)), "missing storage parameters"});
      continue;
    }
    auto sv = validate_storage(node, it->second);
    v.insert(v.end(), sv.begin(), sv.end());
  }
  for (const auto& [node, _] : net.storage_map()) {
    if (node != NodeId::SE && node != NodeId::SH) {
      v.push_back({std::string(to_string(node)),
                   "storage parameters on a non-storage node"});
    }
  }
  const HeatPumpParams& hp = net.heat_pump();
  if (!(hp.cop > 0.0)) v.push_back({"HP.cop", "must be > 0"});
  if (!(hp.p_heat_max >= 0.0)) v.push_back({"HP.p_heat_max", "must be >= 0"});
  return v;
}

StorageDurations storage_durations(const StorageParams& sp) {
  if (!(sp.p_ch_max > 0.0) || !(sp.p_dis_max > 0.0)) {
    throw UndefinedDurationError(
        "charge and discharge power bounds must be positive");
  }
  const double capacity = sp.e_max - sp.e_min;
  return {capacity / (sp.eta_ch * sp.p_ch_max),
          capacity / (sp.p_dis_max / sp.eta_dis)};
}

double leaky_fill_horizon(const StorageParams& sp) {
  if (sp.rho >= 1.0) {
    auto d = storage_durations(sp);
    return d.charge_hours + d.discharge_hours;
  }
  if (!(sp.p_ch_max > 0.0) || !(sp.p_dis_max > 0.0)) {
    throw UndefinedDurationError(
        "charge and discharge power bounds must be positive");
  }
  const double capacity = sp.e_max - sp.e_min;
  const double leak = 1.0 - sp.rho;
  // Accumulated energy after t hours at a constant hourly rate r is
  // r (1 - rho^t) / (1 - rho); solve for the t that reaches the capacity.
  auto hours_to_fill = [&](double rate) {
    const double fraction = capacity * leak / rate;
    if (fraction >= 1.0) {
      throw UnreachableCapacityError(fmt::format(
          "leakage caps the accumulated energy at {} kWh, below the usable "
          "capacity of {} kWh",
          fmt_num(rate / leak), fmt_num(capacity)));
    }
    return std::log1p(-fraction) / std::log1p(-leak);
  };
  return hours_to_fill(sp.eta_ch * sp.p_ch_max) +
         hours_to_fill(sp.p_dis_max / sp.eta_dis);
}

std::size_t TimeGrid::steps_per_day() const {
  return static_cast<std::size_t>(std::lround(24.0 / dt_hours));
}

std::vector<Violation> TimeGrid::validate() const {
  std::vector<Violation> v;
  if (!(dt_hours > 0.0)) v.push_back({"dt_hours", "must be > 0"});
  if (control_steps < 1) v.push_back({"control_steps", "must be >= 1"});
  if (n_steps < control_steps) {
    v.push_back({"n_steps", "must be >= control_steps"});
  }
  return v;
}

SeriesBundle SeriesBundle::slice(std::size_t start, std::size_t length) const {
  if (start + length > size()) {
    throw InputError(fmt::format(
        "slice [{}, {}) runs past the series of length {}", start,
        start + length, size()));
  }
  auto cut = [&](const std::vector<double>& s) {
    return std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(start),
                               s.begin() +
                                   static_cast<std::ptrdiff_t>(start + length));
  };
  return {cut(d_de), cut(d_dh), cut(p_pv), cut(p_st),
          cut(p_ac), cut(c_buy), cut(c_sell)};
}

std::vector<Violation> SeriesBundle::validate() const {
  std::vector<Violation> v;
  const std::pair<const char*, const std::vector<double>*> all[] = {
      {"d_de", &d_de}, {"d_dh", &d_dh},   {"p_pv", &p_pv},    {"p_st", &p_st},
      {"p_ac", &p_ac}, {"c_buy", &c_buy}, {"c_sell", &c_sell}};
  for (const auto& [name, s] : all) {
    if (s->size() != size()) {
      v.push_back({name, fmt::format("length {} differs from d_de length {}",
                                     s->size(), size())});
    }
    for (double x : *s) {
      if (!std::isfinite(x)) {
        v.push_back({name, "contains a non-finite value"});
        break;
      }
    }
  }
  for (const auto& [name, s] : std::span(all).first(5)) {
    for (std::size_t t = 0; t < s->size(); ++t) {
      if ((*s)[t] < 0.0) {
        v.push_back({name, fmt::format("negative value at step {}", t)});
        break;
      }
    }
  }
  return v;
}

std::uint64_t SeriesBundle::checksum() const {
  // FNV-1a over the raw IEEE-754 bytes.
  std::uint64_t h = 14695981039346656037ull;
  for (const auto* s : {&d_de, &d_dh, &p_pv, &p_st, &p_ac, &c_buy, &c_sell}) {
    for (double x : *s) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

}  // namespace stes
