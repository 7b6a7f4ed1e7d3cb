#pragma once

// Builds the dispatch MILP of one window: demand balances, production
// balances, storage state recursions with charge/discharge exclusivity,
// heat-pump conversion and capacity, end-of-window storage levels, and the
// grid cost objective.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "stes/milp.hpp"
#include "stes/network.hpp"

namespace stes {

// Slot of a storage node in per-storage arrays: battery 0, heat storage 1.
inline constexpr std::array<NodeId, 2> kStorageNodes = {NodeId::SE,
                                                        NodeId::SH};
std::size_t storage_slot(NodeId node);

struct EndPolicy {
  enum class Kind { Free, FixedAt, ForceMin, ForceMax, SoftAt };

  Kind kind = Kind::Free;
  double value = 0.0;    // FixedAt / SoftAt level, kWh
  double penalty = 0.0;  // SoftAt, EUR per kWh of deviation

  static EndPolicy free() { return {}; }
  static EndPolicy fixed_at(double v) { return {Kind::FixedAt, v, 0.0}; }
  static EndPolicy force_min() { return {Kind::ForceMin, 0.0, 0.0}; }
  static EndPolicy force_max() { return {Kind::ForceMax, 0.0, 0.0}; }
  static EndPolicy soft_at(double v, double penalty) {
    return {Kind::SoftAt, v, penalty};
  }
};

struct BoundaryConditions {
  std::array<double, 2> e_init{};  // by storage slot
  std::array<EndPolicy, 2> end{};  // by storage slot
};

struct WindowSpec {
  std::size_t start_step = 0;  // absolute step index, used in names only
  double dt_hours = 1.0;
  SeriesBundle series;  // exactly the window's steps
  BoundaryConditions boundary;

  std::size_t length() const { return series.size(); }
};

// Steps whose buy or sell price is negative. Only these steps carry the
// charge/discharge binaries; elsewhere simultaneous charge and discharge is
// never profitable and the binaries are replaced by 1.
std::vector<std::size_t> flag_binary_steps(const WindowSpec& win);

// Throws InputError if the network does not validate, the window is empty or
// its series are inconsistent, or an end level lies outside the state
// bounds.
MilpInstance build_milp(const EnergyNetwork& net, const WindowSpec& win);

// Row count the builder must produce for this window.
std::size_t expected_row_count(const WindowSpec& win);

struct AuditReport {
  std::array<std::size_t, kRowKindCount> rows_by_kind{};
  std::size_t total_rows = 0;
  std::size_t binaries = 0;
  // State-of-energy limits are variable bounds, not rows.
  std::size_t state_bound_entries = 0;
  // Rows that can never be satisfied, e.g. no coefficients and a nonzero
  // right-hand side.
  std::vector<std::string> impossible_rows;

  std::size_t count(RowKind kind) const {
    return rows_by_kind[static_cast<std::size_t>(kind)];
  }
};

AuditReport constraint_audit(const MilpInstance& inst);

// Grid cost of a dispatch computed directly from per-step flows
// (flows[arc][t], arcs in the network's order), independent of the
// instance's objective vector.
double dispatch_cost(const EnergyNetwork& net, const SeriesBundle& series,
                     double dt_hours,
                     const std::vector<std::vector<double>>& flows);

// Appends cost^T x <= bound as a row and replaces the objective with
// "maximize the sum of the given storage's states".
void add_objective_cut(MilpInstance& inst, double bound);
void maximize_state_sum(MilpInstance& inst, NodeId storage);

}  // namespace stes
