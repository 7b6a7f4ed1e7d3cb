#include "stes/formulation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stes/error.hpp"

namespace stes {
namespace {

// Rows per step independent of binaries: two demands, PV, solar thermal,
// AC, two state recursions, heat-pump ratio and cap.
constexpr std::size_t kRowsPerStep = 9;
// Charge and discharge bound per storage.
constexpr std::size_t kBoundRowsPerStep = 4;

bool has_end_row(const EndPolicy& p) {
  return p.kind != EndPolicy::Kind::Free;
}

class RowBuilder {
 public:
  RowBuilder(std::string name, RowKind kind, Sense sense, double rhs) {
    row_.name = std::move(name);
    row_.kind = kind;
    row_.sense = sense;
    row_.rhs = rhs;
  }
  RowBuilder& add(int var, double coef) {
    if (coef != 0.0) {
      row_.index.push_back(var);
      row_.value.push_back(coef);
    }
    return *this;
  }
  Constraint take() { return std::move(row_); }

 private:
  Constraint row_;
};

}  // namespace

std::size_t storage_slot(NodeId node) {
  if (node == NodeId::SE) return 0;
  if (node == NodeId::SH) return 1;
  throw InputError(fmt::format("{} is not a storage node", to_string(node)));
}

std::vector<std::size_t> flag_binary_steps(const WindowSpec& win) {
  std::vector<std::size_t> steps;
  const auto& s = win.series;
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (s.c_buy[t] < 0.0 || s.c_sell[t] < 0.0) steps.push_back(t);
  }
  return steps;
}

std::size_t expected_row_count(const WindowSpec& win) {
  std::size_t rows = win.length() * (kRowsPerStep + kBoundRowsPerStep);
  for (const auto& p : win.boundary.end) rows += has_end_row(p) ? 1 : 0;
  return rows;
}

MilpInstance build_milp(const EnergyNetwork& net, const WindowSpec& win) {
  if (auto v = validate_network(net); !v.empty()) {
    throw InputError(fmt::format("invalid network: {}: {}", v.front().subject,
                                 v.front().rule));
  }
  const std::size_t steps = win.length();
  if (steps == 0) throw InputError("window has no steps");
  if (auto v = win.series.validate(); !v.empty()) {
    throw InputError(fmt::format("invalid window series: {}: {}",
                                 v.front().subject, v.front().rule));
  }
  if (!(win.dt_hours > 0.0)) throw InputError("dt_hours must be > 0");

  const double dt = win.dt_hours;
  const auto& s = win.series;
  const auto& arcs = net.arcs();

  std::array<const StorageParams*, 2> sp{};
  std::array<double, 2> end_level{};
  for (std::size_t k = 0; k < 2; ++k) {
    sp[k] = &net.storage(kStorageNodes[k]);
    const EndPolicy& p = win.boundary.end[k];
    const char* who = to_string(kStorageNodes[k]).data();
    switch (p.kind) {
      case EndPolicy::Kind::Free: break;
      case EndPolicy::Kind::ForceMin: end_level[k] = sp[k]->e_min; break;
      case EndPolicy::Kind::ForceMax: end_level[k] = sp[k]->e_max; break;
      case EndPolicy::Kind::FixedAt:
      case EndPolicy::Kind::SoftAt:
        if (!(p.value >= sp[k]->e_min && p.value <= sp[k]->e_max)) {
          throw InputError(fmt::format(
              "end level {} for {} lies outside [{}, {}]", p.value, who,
              sp[k]->e_min, sp[k]->e_max));
        }
        if (p.kind == EndPolicy::Kind::SoftAt && !(p.penalty >= 0.0)) {
          throw InputError("soft end level penalty must be >= 0");
        }
        end_level[k] = p.value;
        break;
    }
    const double init = win.boundary.e_init[k];
    if (!std::isfinite(init)) {
      throw InputError(fmt::format("initial level for {} is not finite", who));
    }
  }

  std::vector<bool> needs_binary(steps, false);
  for (std::size_t t : flag_binary_steps(win)) needs_binary[t] = true;

  MilpInstance inst;
  VariableLayout& layout = inst.layout;
  layout.steps = steps;
  layout.flow.assign(arcs.size(), std::vector<int>(steps, -1));
  for (std::size_t k = 0; k < 2; ++k) {
    layout.state[k].assign(steps, -1);
    layout.binary[k].assign(steps, -1);
  }

  // Variables, grouped by step.
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t abs_t = win.start_step + t;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      layout.flow[a][t] = inst.add_variable(
          {fmt::format("p_{}_{}_t{}", to_string(arcs[a].from),
                       to_string(arcs[a].to), abs_t),
           0.0, kInfinity, false, 0.0});
    }
    for (std::size_t k = 0; k < 2; ++k) {
      layout.state[k][t] = inst.add_variable(
          {fmt::format("e_{}_t{}", to_string(kStorageNodes[k]), abs_t),
           sp[k]->e_min, sp[k]->e_max, false, 0.0});
    }
    if (needs_binary[t]) {
      for (std::size_t k = 0; k < 2; ++k) {
        layout.binary[k][t] = inst.add_variable(
            {fmt::format("y_{}_t{}", to_string(kStorageNodes[k]), abs_t), 0.0,
             1.0, true, 0.0});
      }
    }
  }

  // Objective: buy cost on flows leaving the grid, sell revenue on flows
  // entering it.
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    for (std::size_t t = 0; t < steps; ++t) {
      auto& v = inst.variables[static_cast<std::size_t>(layout.flow[a][t])];
      if (arcs[a].from == NodeId::PG) v.cost += dt * s.c_buy[t];
      if (arcs[a].to == NodeId::PG) v.cost -= dt * s.c_sell[t];
    }
  }

  auto flow = [&](NodeId from, NodeId to, std::size_t t) {
    return layout.flow[*net.arc_index({from, to})][t];
  };
  auto add_inflows = [&](RowBuilder& row, NodeId node, std::size_t t,
                         double coef) {
    for (NodeId from : net.inflow_nodes(node)) row.add(flow(from, node, t), coef);
  };
  auto add_outflows = [&](RowBuilder& row, NodeId node, std::size_t t,
                          double coef) {
    for (NodeId to : net.outflow_nodes(node)) row.add(flow(node, to, t), coef);
  };

  const HeatPumpParams& hp = net.heat_pump();
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t abs_t = win.start_step + t;
    {
      RowBuilder r(fmt::format("dmd_DE_t{}", abs_t), RowKind::DemandElectric,
                   Sense::Equal, s.d_de[t]);
      add_inflows(r, NodeId::DE, t, 1.0);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("dmd_DH_t{}", abs_t), RowKind::DemandHeat,
                   Sense::Equal, s.d_dh[t]);
      add_inflows(r, NodeId::DH, t, 1.0);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("pv_t{}", abs_t), RowKind::PvBalance,
                   Sense::Equal, s.p_pv[t]);
      add_outflows(r, NodeId::PV, t, 1.0);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("st_t{}", abs_t), RowKind::SolarThermalCap,
                   Sense::LessEqual, s.p_st[t]);
      add_outflows(r, NodeId::ST, t, 1.0);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("ac_t{}", abs_t), RowKind::AcHeatCap,
                   Sense::LessEqual, s.p_ac[t]);
      add_outflows(r, NodeId::AC, t, 1.0);
      inst.add_constraint(r.take());
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const NodeId node = kStorageNodes[k];
      const StorageParams& p = *sp[k];
      const double rhs = t == 0 ? p.rho * win.boundary.e_init[k] : 0.0;
      RowBuilder r(fmt::format("soe_{}_t{}", to_string(node), abs_t),
                   k == 0 ? RowKind::StateBattery : RowKind::StateHeat,
                   Sense::Equal, rhs);
      r.add(layout.state[k][t], 1.0);
      if (t > 0) r.add(layout.state[k][t - 1], -p.rho);
      add_inflows(r, node, t, -dt * p.eta_ch);
      add_outflows(r, node, t, dt / p.eta_dis);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("hp_ratio_t{}", abs_t), RowKind::HeatPumpRatio,
                   Sense::Equal, 0.0);
      add_outflows(r, NodeId::HP, t, 1.0);
      add_inflows(r, NodeId::HP, t, -hp.cop);
      inst.add_constraint(r.take());
    }
    {
      RowBuilder r(fmt::format("hp_cap_t{}", abs_t), RowKind::HeatPumpCap,
                   Sense::LessEqual, hp.p_heat_max);
      add_outflows(r, NodeId::HP, t, 1.0);
      inst.add_constraint(r.take());
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const NodeId node = kStorageNodes[k];
      const StorageParams& p = *sp[k];
      const int y = layout.binary[k][t];
      // With a binary y the bounds read  in <= y Pch  and  out <= (1-y) Pdis;
      // without one y is the constant 1 and the discharge bound keeps its
      // plain form.
      RowBuilder ch(fmt::format("ch_{}_t{}", to_string(node), abs_t),
                    RowKind::ChargeBound, Sense::LessEqual,
                    y < 0 ? p.p_ch_max : 0.0);
      add_inflows(ch, node, t, 1.0);
      if (y >= 0) ch.add(y, -p.p_ch_max);
      inst.add_constraint(ch.take());

      RowBuilder dis(fmt::format("dis_{}_t{}", to_string(node), abs_t),
                     RowKind::DischargeBound, Sense::LessEqual, p.p_dis_max);
      add_outflows(dis, node, t, 1.0);
      if (y >= 0) dis.add(y, p.p_dis_max);
      inst.add_constraint(dis.take());
    }
  }

  for (std::size_t k = 0; k < 2; ++k) {
    const EndPolicy& p = win.boundary.end[k];
    if (!has_end_row(p)) continue;
    const NodeId node = kStorageNodes[k];
    RowBuilder r(fmt::format("end_{}", to_string(node)), RowKind::EndLevel,
                 Sense::Equal, end_level[k]);
    r.add(layout.state[k][steps - 1], 1.0);
    if (p.kind == EndPolicy::Kind::SoftAt) {
      const int up = inst.add_variable(
          {fmt::format("slack_up_{}", to_string(node)), 0.0, kInfinity, false,
           p.penalty});
      const int down = inst.add_variable(
          {fmt::format("slack_down_{}", to_string(node)), 0.0, kInfinity,
           false, p.penalty});
      r.add(up, -1.0).add(down, 1.0);
    }
    inst.add_constraint(r.take());
  }
  return inst;
}

AuditReport constraint_audit(const MilpInstance& inst) {
  AuditReport report;
  report.total_rows = inst.constraints.size();
  for (const auto& c : inst.constraints) {
    ++report.rows_by_kind[static_cast<std::size_t>(c.kind)];
    bool all_zero = std::all_of(c.value.begin(), c.value.end(),
                                [](double v) { return v == 0.0; });
    if (all_zero) {
      const bool ok = (c.sense == Sense::Equal && c.rhs == 0.0) ||
                      (c.sense == Sense::LessEqual && c.rhs >= 0.0) ||
                      (c.sense == Sense::GreaterEqual && c.rhs <= 0.0);
      if (!ok) report.impossible_rows.push_back(c.name);
    }
  }
  for (const auto& v : inst.variables) {
    if (v.is_binary) ++report.binaries;
    if (v.lower > v.upper) {
      report.impossible_rows.push_back(v.name + " (bounds)");
    }
  }
  for (const auto& states : inst.layout.state) {
    report.state_bound_entries += 2 * states.size();
  }
  return report;
}

double dispatch_cost(const EnergyNetwork& net, const SeriesBundle& series,
                     double dt_hours,
                     const std::vector<std::vector<double>>& flows) {
  double cost = 0.0;
  const auto& arcs = net.arcs();
  for (std::size_t t = 0; t < series.size(); ++t) {
    double bought = 0.0;
    double sold = 0.0;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (arcs[a].from == NodeId::PG) bought += flows[a][t];
      if (arcs[a].to == NodeId::PG) sold += flows[a][t];
    }
    cost += dt_hours * (series.c_buy[t] * bought - series.c_sell[t] * sold);
  }
  return cost;
}

void add_objective_cut(MilpInstance& inst, double bound) {
  Constraint cut;
  cut.name = fmt::format("objective_cut_{}", inst.constraints.size());
  cut.kind = RowKind::ObjectiveCut;
  cut.sense = Sense::LessEqual;
  cut.rhs = bound;
  for (std::size_t j = 0; j < inst.variables.size(); ++j) {
    if (inst.variables[j].cost != 0.0) {
      cut.index.push_back(static_cast<int>(j));
      cut.value.push_back(inst.variables[j].cost);
    }
  }
  inst.add_constraint(std::move(cut));
}

void maximize_state_sum(MilpInstance& inst, NodeId storage) {
  for (auto& v : inst.variables) v.cost = 0.0;
  for (int j : inst.layout.state[storage_slot(storage)]) {
    inst.variables[static_cast<std::size_t>(j)].cost = -1.0;
  }
}

}  // namespace stes
