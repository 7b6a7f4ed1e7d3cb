#include <cmath>

#include <doctest.h>

#include "checks.hpp"
#include "fixtures.hpp"
#include "stes/error.hpp"
#include "stes/formulation.hpp"
#include "stes/solver.hpp"
#include "stes/synthetic.hpp"

using namespace stes;
using stes::test::constant_bundle;
using stes::test::require_verified;

namespace {

BoundaryConditions empty_free() { return {}; }

std::size_t arc(const EnergyNetwork& net, NodeId a, NodeId b) {
  return *net.arc_index({a, b});
}

}  // namespace

TEST_SUITE("formulation") {

TEST_CASE("all-zero one-step window costs nothing") {
  const EnergyNetwork net = stes::test::case_network();
  const auto inst =
      build_milp(net, stes::test::window(constant_bundle(1, 0, 0, 0.3, 0.1)));
  const SolveResult res = solve_milp(inst);
  require_verified(inst, res);
  CHECK(res.objective == 0.0);
  for (double v : res.x) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("two-step heat-pump-only window matches a grid search") {
  const EnergyNetwork net = stes::test::case_network();
  SeriesBundle s = constant_bundle(2, 0, 15, 0.25, 0.05);
  const auto inst = build_milp(net, stes::test::window(s, empty_free()));
  const SolveResult res = solve_milp(inst);
  require_verified(inst, res);

  // Grid search over the electricity bought for the heat pump in each hour,
  // 0.01 kW resolution; heat must equal demand and stay below the cap.
  const double cop = net.heat_pump().cop;
  double best = INFINITY;
  for (int a = 0; a <= 500; ++a) {
    for (int b = 0; b <= 500; ++b) {
      const double p0 = a * 0.01;
      const double p1 = b * 0.01;
      if (std::abs(cop * p0 - 15.0) > 1e-9 || std::abs(cop * p1 - 15.0) > 1e-9) {
        continue;
      }
      best = std::min(best, 0.25 * (p0 + p1));
    }
  }
  CHECK(best == doctest::Approx(1.875).epsilon(1e-12));
  CHECK(res.objective == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("year window with the heat storage fixed at 3000 kWh at the end") {
  SyntheticSpec spec;
  const SeriesBundle year = generate_synthetic(spec);
  REQUIRE(year.size() == 8760);
  const CaseConfig cfg = stes::test::case_config();
  BoundaryConditions bc;
  bc.e_init = {0.0, 3000.0};
  bc.end = {EndPolicy::fixed_at(0.0), EndPolicy::fixed_at(3000.0)};
  const auto inst = build_milp(cfg.network(), stes::test::window(year, bc));
  const AuditReport rep = constraint_audit(inst);
  CHECK(rep.count(RowKind::EndLevel) == 2);
  bool found = false;
  for (const auto& c : inst.constraints) {
    if (c.name == "end_SH") {
      found = true;
      CHECK(c.sense == Sense::Equal);
      CHECK(c.rhs == 3000.0);
      REQUIRE(c.index.size() == 1);
      CHECK(c.index[0] == inst.layout.state[1].back());
    }
  }
  CHECK(found);
}

TEST_CASE("binary steps are exactly the negative-price steps") {
  SeriesBundle s = constant_bundle(2, 0, 0, 0.3, 0.1);
  s.c_buy = {0.3, 0.2};
  s.c_sell = {0.1, 0.05};
  CHECK(flag_binary_steps(stes::test::window(s)).empty());
  s.c_sell = {0.1, -0.02};
  CHECK(flag_binary_steps(stes::test::window(s)) ==
        std::vector<std::size_t>{1});
  s.c_buy = {-0.01, 0.2};
  CHECK(flag_binary_steps(stes::test::window(s)) ==
        std::vector<std::size_t>{0, 1});
}

TEST_CASE("synthetic year: one binary pair per negative-price hour") {
  const SeriesBundle year = generate_synthetic(SyntheticSpec{});
  std::size_t negative = 0;
  for (std::size_t t = 0; t < year.size(); ++t) {
    if (year.c_buy[t] < 0.0 || year.c_sell[t] < 0.0) ++negative;
  }
  CHECK(negative > 0);
  const WindowSpec w = stes::test::window(year);
  CHECK(flag_binary_steps(w).size() == negative);
  const auto inst = build_milp(stes::test::case_network(), w);
  CHECK(inst.num_binaries() == 2 * negative);
  CHECK(constraint_audit(inst).binaries == 2 * negative);
}

TEST_CASE("positive prices give no binaries") {
  const auto inst = build_milp(stes::test::case_network(),
                               stes::test::window(constant_bundle(48, 1, 2, 0.3, 0.1)));
  CHECK(inst.num_binaries() == 0);
  for (const auto& b : inst.layout.binary) {
    for (int j : b) CHECK(j == -1);
  }
}

TEST_CASE("audit tallies per row kind") {
  const EnergyNetwork net = stes::test::case_network();
  const std::size_t T = 24;
  SeriesBundle s = constant_bundle(T, 1, 2, 0.3, 0.1);
  s.c_sell[5] = -0.1;

  auto inst = build_milp(net, stes::test::window(s));
  AuditReport rep = constraint_audit(inst);
  CHECK(rep.count(RowKind::DemandElectric) == T);
  CHECK(rep.count(RowKind::DemandHeat) == T);
  CHECK(rep.count(RowKind::PvBalance) == T);
  CHECK(rep.count(RowKind::SolarThermalCap) == T);
  CHECK(rep.count(RowKind::AcHeatCap) == T);
  CHECK(rep.count(RowKind::StateBattery) == T);
  CHECK(rep.count(RowKind::StateHeat) == T);
  CHECK(rep.count(RowKind::HeatPumpRatio) == T);
  CHECK(rep.count(RowKind::HeatPumpCap) == T);
  CHECK(rep.count(RowKind::ChargeBound) == 2 * T);
  CHECK(rep.count(RowKind::DischargeBound) == 2 * T);
  CHECK(rep.count(RowKind::EndLevel) == 0);
  CHECK(rep.binaries == 2);
  CHECK(rep.state_bound_entries == 4 * T);
  CHECK(rep.impossible_rows.empty());
  CHECK(rep.total_rows == T * (2 + 1 + 1 + 1 + 2 + 1 + 1) + 4 * T);
  CHECK(rep.total_rows == expected_row_count(stes::test::window(s)));

  BoundaryConditions bc;
  bc.end = {EndPolicy::fixed_at(0.0), EndPolicy::fixed_at(100.0)};
  inst = build_milp(net, stes::test::window(s, bc));
  rep = constraint_audit(inst);
  CHECK(rep.count(RowKind::EndLevel) == 2);
  CHECK(rep.total_rows == expected_row_count(stes::test::window(s, bc)));

  bc.end = {EndPolicy::free(), EndPolicy::force_max()};
  inst = build_milp(net, stes::test::window(s, bc));
  CHECK(constraint_audit(inst).count(RowKind::EndLevel) == 1);
}

TEST_CASE("audit flags structurally impossible rows") {
  MilpInstance inst;
  inst.add_variable({"x", 0.0, 1.0, false, 0.0});
  inst.add_constraint({"empty_eq", RowKind::Other, {}, {}, Sense::Equal, 2.0});
  inst.add_constraint({"empty_le", RowKind::Other, {}, {}, Sense::LessEqual, 1.0});
  inst.add_variable({"bad", 2.0, 1.0, false, 0.0});
  const AuditReport rep = constraint_audit(inst);
  CHECK(rep.impossible_rows ==
        std::vector<std::string>{"empty_eq", "bad (bounds)"});
}

TEST_CASE("force policies become end rows at the state limits") {
  const EnergyNetwork net = stes::test::case_network();
  BoundaryConditions bc;
  bc.e_init = {10.0, 3000.0};
  bc.end = {EndPolicy::force_max(), EndPolicy::force_min()};
  const auto inst =
      build_milp(net, stes::test::window(constant_bundle(3, 1, 2, 0.3, 0.1), bc));
  for (const auto& c : inst.constraints) {
    if (c.name == "end_SE") CHECK(c.rhs == 49.0);
    if (c.name == "end_SH") CHECK(c.rhs == 0.0);
  }
}

TEST_CASE("end level outside the state bounds is rejected") {
  BoundaryConditions bc;
  bc.end[1] = EndPolicy::fixed_at(5000.0);
  CHECK_THROWS_AS(build_milp(stes::test::case_network(),
                             stes::test::window(constant_bundle(2, 0, 0, 0.3, 0.1), bc)),
                  InputError);
  bc.end[1] = EndPolicy::fixed_at(-1.0);
  CHECK_THROWS_AS(build_milp(stes::test::case_network(),
                             stes::test::window(constant_bundle(2, 0, 0, 0.3, 0.1), bc)),
                  InputError);
  CHECK_THROWS_AS(build_milp(stes::test::case_network(),
                             stes::test::window(constant_bundle(0, 0, 0, 0.3, 0.1))),
                  InputError);
}

TEST_CASE("hand-built dispatch is feasible and costs what the formula says") {
  const EnergyNetwork net = stes::test::case_network();
  SeriesBundle s = constant_bundle(2, 2.0, 5.0, 0.3, 0.1, 3.0, 1.0, 0.0);
  BoundaryConditions bc;
  bc.e_init = {10.0, 3000.0};
  const auto inst = build_milp(net, stes::test::window(s, bc));
  std::vector<double> x(inst.variables.size(), 0.0);
  const std::size_t n_arcs = net.arcs().size();
  std::vector<std::vector<double>> flows(n_arcs, std::vector<double>(2, 0.0));
  auto set = [&](NodeId a, NodeId b, std::size_t t, double v) {
    flows[arc(net, a, b)][t] = v;
    x[static_cast<std::size_t>(inst.layout.flow[arc(net, a, b)][t])] = v;
  };
  const StorageParams& se = net.storage(NodeId::SE);
  const StorageParams& sh = net.storage(NodeId::SH);
  // Hour 0: PV covers the electric load and sells the rest; solar thermal
  // covers 1 kW of heat, the heat pump the other 4 kW.
  set(NodeId::PV, NodeId::DE, 0, 2.0);
  set(NodeId::PV, NodeId::PG, 0, 1.0);
  set(NodeId::ST, NodeId::DH, 0, 1.0);
  set(NodeId::PG, NodeId::HP, 0, 1.0);
  set(NodeId::HP, NodeId::DH, 0, 4.0);
  // Hour 1: the battery discharges 1 kW to the load, the heat storage
  // supplies 5 kW of heat, PV charges the battery with 3 kW.
  set(NodeId::SE, NodeId::DE, 1, 1.0);
  set(NodeId::PV, NodeId::DE, 1, 0.0);
  set(NodeId::PG, NodeId::DE, 1, 1.0);
  set(NodeId::PV, NodeId::SE, 1, 3.0);
  set(NodeId::SH, NodeId::DH, 1, 4.0);
  set(NodeId::ST, NodeId::DH, 1, 1.0);
  const double e_se0 = se.rho * 10.0;
  const double e_sh0 = sh.rho * 3000.0;
  const double e_se1 = se.rho * e_se0 + se.eta_ch * 3.0 - 1.0 / se.eta_dis;
  const double e_sh1 = sh.rho * e_sh0 - 4.0 / sh.eta_dis;
  x[static_cast<std::size_t>(inst.layout.state[0][0])] = e_se0;
  x[static_cast<std::size_t>(inst.layout.state[1][0])] = e_sh0;
  x[static_cast<std::size_t>(inst.layout.state[0][1])] = e_se1;
  x[static_cast<std::size_t>(inst.layout.state[1][1])] = e_sh1;

  const ViolationReport rep = verify_solution(inst, x);
  INFO(rep.worst);
  CHECK(rep.max_violation <= 1e-9);
  const double direct = dispatch_cost(net, s, 1.0, flows);
  CHECK(direct == doctest::Approx(0.3 * 1.0 - 0.1 * 1.0 + 0.3 * 1.0));
  CHECK(inst.objective(x) == doctest::Approx(direct).epsilon(1e-9));

  // Moving 1 kW more into the tight electric demand row breaks it.
  x[static_cast<std::size_t>(inst.layout.flow[arc(net, NodeId::PV, NodeId::DE)][0])] += 1.0;
  const ViolationReport bad = verify_solution(inst, x);
  CHECK_FALSE(bad.ok());
  bool flagged = false;
  for (const auto& name : bad.flagged) flagged |= name == "dmd_DE_t0";
  CHECK(flagged);
}

TEST_CASE("objective equals the direct cost formula on solved windows") {
  const EnergyNetwork net = stes::test::case_network();
  SyntheticSpec spec;
  spec.days = 3;
  const SeriesBundle s = generate_synthetic(spec);
  BoundaryConditions bc;
  bc.e_init = {20.0, 3000.0};
  bc.end = {EndPolicy::free(), EndPolicy::fixed_at(2990.0)};
  const auto inst = build_milp(net, stes::test::window(s, bc));
  const SolveResult res = solve_milp(inst);
  require_verified(inst, res);
  std::vector<std::vector<double>> flows(net.arcs().size());
  for (std::size_t a = 0; a < flows.size(); ++a) {
    for (int j : inst.layout.flow[a]) {
      flows[a].push_back(res.x[static_cast<std::size_t>(j)]);
    }
  }
  CHECK(stes::test::rel_diff(dispatch_cost(net, s, 1.0, flows), res.objective) <=
        1e-9);
}

TEST_CASE("construction is deterministic") {
  const EnergyNetwork net = stes::test::case_network();
  SyntheticSpec spec;
  spec.days = 2;
  spec.dip_probability = 1.0;
  const WindowSpec w = stes::test::window(generate_synthetic(spec));
  const auto a = build_milp(net, w);
  const auto b = build_milp(net, w);
  CHECK(a.variables == b.variables);
  CHECK(a.constraints == b.constraints);
  CHECK(a.layout == b.layout);
}

TEST_CASE("binaries forbid charging and discharging in the same step") {
  // Buying is paid and selling earns, so a full battery that could both
  // charge from and discharge to the grid would do so; the relaxation does.
  const EnergyNetwork net = stes::test::case_network();
  SeriesBundle s = constant_bundle(1, 1.0, 0.0, -0.5, 0.05);
  BoundaryConditions bc;
  bc.e_init = {49.0, 0.0};
  const auto inst = build_milp(net, stes::test::window(s, bc));
  REQUIRE(inst.num_binaries() == 2);

  auto simultaneous = [&](const std::vector<double>& x) {
    double in = 0.0;
    double out = 0.0;
    for (NodeId from : net.inflow_nodes(NodeId::SE)) {
      in += x[static_cast<std::size_t>(inst.layout.flow[arc(net, from, NodeId::SE)][0])];
    }
    for (NodeId to : net.outflow_nodes(NodeId::SE)) {
      out += x[static_cast<std::size_t>(inst.layout.flow[arc(net, NodeId::SE, to)][0])];
    }
    return in > 1e-7 && out > 1e-7;
  };
  const SolveResult relaxed = solve_lp(inst);
  REQUIRE(relaxed.status == SolveStatus::Optimal);
  CHECK(simultaneous(relaxed.x));
  const SolveResult milp = solve_milp(inst);
  require_verified(inst, milp);
  CHECK_FALSE(simultaneous(milp.x));
  CHECK(milp.objective >= relaxed.objective - 1e-9);
}

TEST_CASE("soft end level adds penalised slacks") {
  const EnergyNetwork net = stes::test::case_network();
  BoundaryConditions bc;
  bc.e_init = {0.0, 100.0};
  bc.end = {EndPolicy::free(), EndPolicy::soft_at(200.0, 1.0)};
  // 200 kWh cannot be reached in one hour; the hard version is infeasible.
  SeriesBundle s = constant_bundle(1, 0, 0, 0.3, 0.1);
  const auto soft = build_milp(net, stes::test::window(s, bc));
  const SolveResult res = solve_milp(soft);
  require_verified(soft, res);
  const double reach = net.storage(NodeId::SH).rho * 100.0;
  // Charging costs at most 0.3 / (cop * eta) per stored kWh, well below the
  // penalty, so the storage charges at full power.
  const double stored = reach + net.storage(NodeId::SH).eta_ch *
                                    net.storage(NodeId::SH).p_ch_max;
  CHECK(res.x[static_cast<std::size_t>(soft.layout.state[1][0])] ==
        doctest::Approx(stored).epsilon(1e-9));

  bc.end[1] = EndPolicy::fixed_at(200.0);
  const auto hard = build_milp(net, stes::test::window(s, bc));
  CHECK(solve_milp(hard).status == SolveStatus::Infeasible);
}

TEST_CASE("objective cut and state-sum objective") {
  const EnergyNetwork net = stes::test::case_network();
  BoundaryConditions bc;
  bc.e_init = {0.0, 100.0};
  auto inst = build_milp(net, stes::test::window(constant_bundle(4, 1, 3, 0.3, 0.1), bc));
  const SolveResult first = solve_milp(inst);
  require_verified(inst, first);
  add_objective_cut(inst, first.objective + 1e-9);
  CHECK(inst.constraints.back().kind == RowKind::ObjectiveCut);
  maximize_state_sum(inst, NodeId::SH);
  for (std::size_t j = 0; j < inst.variables.size(); ++j) {
    const bool is_sh_state =
        std::find(inst.layout.state[1].begin(), inst.layout.state[1].end(),
                  static_cast<int>(j)) != inst.layout.state[1].end();
    CHECK(inst.variables[j].cost == (is_sh_state ? -1.0 : 0.0));
  }
  const SolveResult second = solve_milp(inst);
  require_verified(inst, second);
}

}  // TEST_SUITE
