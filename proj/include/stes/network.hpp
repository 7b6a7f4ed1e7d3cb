#pragma once

// Domain types for the building energy system: the nine nodes, the admissible
// flow arcs between them, storage and heat-pump parameters, the time grid and
// the exogenous hourly series.
//
// Units are fixed throughout the library: power in kW, energy in kWh, time in
// hours, prices in EUR/kWh. The step length of the time grid converts power
// to energy.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stes {

enum class NodeId : std::uint8_t { DE, PV, PG, SE, HP, SH, AC, ST, DH };

inline constexpr std::array<NodeId, 9> kAllNodes = {
    NodeId::DE, NodeId::PV, NodeId::PG, NodeId::SE, NodeId::HP,
    NodeId::SH, NodeId::AC, NodeId::ST, NodeId::DH};

std::string_view to_string(NodeId node);
std::optional<NodeId> parse_node(std::string_view name);

struct Arc {
  NodeId from;
  NodeId to;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

std::string to_string(const Arc& arc);

// The arrows of the system diagram, in a fixed canonical order. The flow
// variables of every window are laid out in this order.
std::span<const Arc> canonical_arcs();

struct StorageParams {
  double eta_ch = 1.0;   // charge efficiency, (0, 1]
  double eta_dis = 1.0;  // discharge efficiency, (0, 1]
  double rho = 1.0;      // fraction of stored energy retained per hour, (0, 1]
  double e_min = 0.0;    // kWh
  double e_max = 0.0;    // kWh
  double p_ch_max = 0.0;   // kW
  double p_dis_max = 0.0;  // kW
  double e_init = 0.0;     // kWh
  std::optional<double> e_end;  // kWh

  // Self-discharge is usually quoted as a percentage lost per hour; the
  // retention factor is the canonical stored form.
  static double retention_from_loss_pct(double pct_per_hour) {
    return 1.0 - pct_per_hour / 100.0;
  }
};

struct HeatPumpParams {
  double cop = 1.0;         // heat out per electricity in
  double p_heat_max = 0.0;  // kW of heat
};

struct Violation {
  std::string subject;  // node, arc or parameter the rule applies to
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Node set, arcs and per-node parameters. Immutable after construction; the
// arc list may deviate from the canonical topology so that such networks can
// be reported by validate_network().
class EnergyNetwork {
 public:
  EnergyNetwork(std::vector<Arc> arcs, std::map<NodeId, StorageParams> storage,
                HeatPumpParams heat_pump);

  // The system diagram topology with the given parameters.
  static EnergyNetwork canonical(const StorageParams& battery,
                                 const StorageParams& heat_storage,
                                 const HeatPumpParams& heat_pump);

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::map<NodeId, StorageParams>& storage_map() const {
    return storage_;
  }
  const StorageParams& storage(NodeId node) const;
  const HeatPumpParams& heat_pump() const { return heat_pump_; }

  // Nodes with an arc into `node` (the "from" set) and nodes `node` has an
  // arc to (the "to" set), both in canonical node order.
  std::vector<NodeId> inflow_nodes(NodeId node) const;
  std::vector<NodeId> outflow_nodes(NodeId node) const;

  // Position of an arc in arcs(), if present.
  std::optional<std::size_t> arc_index(Arc arc) const;

  // Copy with one storage replaced.
  EnergyNetwork with_storage(NodeId node, const StorageParams& params) const;

 private:
  std::vector<Arc> arcs_;
  std::map<NodeId, StorageParams> storage_;
  HeatPumpParams heat_pump_;
};

std::vector<Violation> validate_network(const EnergyNetwork& net);
std::vector<Violation> validate_storage(NodeId node, const StorageParams& sp);

struct StorageDurations {
  double charge_hours;
  double discharge_hours;
};

// Time to traverse the usable capacity at full charge or discharge power,
// ignoring self-discharge. Throws UndefinedDurationError for zero power.
StorageDurations storage_durations(const StorageParams& sp);

// Full charge plus full discharge time when the charged and discharged
// energy accumulate as a geometric series in the retention factor.
// Falls back to storage_durations() when rho == 1. Throws
// UnreachableCapacityError when leakage caps the accumulated energy below
// the usable capacity.
double leaky_fill_horizon(const StorageParams& sp);

struct TimeGrid {
  std::size_t n_steps = 0;
  double dt_hours = 1.0;
  std::size_t control_steps = 24;

  // Steps per calendar day; the control horizon in the case study.
  std::size_t steps_per_day() const;
  std::vector<Violation> validate() const;
};

// Exogenous per-step series. Loads and productions in kW, prices in EUR/kWh.
struct SeriesBundle {
  std::vector<double> d_de;
  std::vector<double> d_dh;
  std::vector<double> p_pv;
  std::vector<double> p_st;
  std::vector<double> p_ac;
  std::vector<double> c_buy;
  std::vector<double> c_sell;

  std::size_t size() const { return d_de.size(); }

  // Contiguous sub-range. Throws InputError if it runs past the data.
  SeriesBundle slice(std::size_t start, std::size_t length) const;

  // Lengths agree and loads and productions are nonnegative. Prices may be
  // negative.
  std::vector<Violation> validate() const;

  // Stable 64-bit digest of all values, for reproducibility logs.
  std::uint64_t checksum() const;

  friend bool operator==(const SeriesBundle&, const SeriesBundle&) = default;
};

}  // namespace stes
