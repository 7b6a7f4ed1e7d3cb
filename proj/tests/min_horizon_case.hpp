#pragma once

// A small system whose minimum prediction horizon is known by direct
// definition: ten days of constant prices with an expensive day 8, a small
// battery and a small heat storage.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "stes/formulation.hpp"
#include "stes/network.hpp"
#include "stes/solver.hpp"

namespace stes::test {

inline constexpr std::size_t kCaseDays = 10;
inline constexpr std::size_t kSpikeDay = 8;

inline EnergyNetwork spike_network() {
  StorageParams battery;
  battery.eta_ch = 0.95;
  battery.eta_dis = 0.95;
  battery.rho = 0.9999;
  battery.e_max = 6.0;
  battery.p_ch_max = 2.0;
  battery.p_dis_max = 2.0;
  StorageParams heat;
  heat.eta_ch = 0.9;
  heat.eta_dis = 0.9;
  heat.rho = 0.999;
  heat.e_max = 60.0;
  heat.p_ch_max = 5.0;
  heat.p_dis_max = 5.0;
  return EnergyNetwork::canonical(battery, heat, {4.0, 15.0});
}

// Constant loads; buying costs 0.30 EUR/kWh except from 06:00 to 18:00 on
// the spike day, when it costs 1.50 EUR/kWh.
inline SeriesBundle spike_series() {
  const std::size_t steps = kCaseDays * 24;
  SeriesBundle s;
  s.d_de.assign(steps, 1.0);
  s.d_dh.assign(steps, 3.0);
  s.p_pv.assign(steps, 0.0);
  s.p_st.assign(steps, 0.0);
  s.p_ac.assign(steps, 0.0);
  s.c_buy.assign(steps, 0.30);
  s.c_sell.assign(steps, 0.10);
  for (std::size_t h = 6; h < 18; ++h) s.c_buy[kSpikeDay * 24 + h] = 1.50;
  return s;
}

inline std::array<double, 2> spike_initial_levels() { return {3.0, 30.0}; }

// Cost optimum, then the largest heat storage levels, then the largest
// battery levels among cost optima; an independent rendering of the
// canonical tie-break.
inline std::optional<std::vector<double>> lexicographic_optimum(MilpInstance inst) {
  SolveResult res = solve_milp(inst);
  if (res.status != SolveStatus::Optimal) return std::nullopt;
  for (NodeId storage : {NodeId::SH, NodeId::SE}) {
    const double f = inst.objective(res.x);
    add_objective_cut(inst, f + 1e-9 * std::max(1.0, std::abs(f)));
    maximize_state_sum(inst, storage);
    SolveResult next = solve_milp(inst);
    if (next.status != SolveStatus::Optimal) break;
    res = next;
  }
  return res.x;
}

// Smallest horizon in days for which the end-of-day-one levels from `day`
// are the same under every terminal condition tried: a grid of fixed end
// levels for each storage (0, 1/4, 1/2, 3/4 and all of capacity) and no end
// condition. Combinations that are infeasible are ignored. Returns
// max_days + 1 if no horizon qualifies.
inline std::size_t min_horizon_oracle(const EnergyNetwork& net,
                                      const SeriesBundle& series,
                                      std::size_t day, std::size_t max_days,
                                      const std::array<double, 2>& e_init) {
  std::array<std::vector<EndPolicy>, 2> ends;
  for (std::size_t k = 0; k < 2; ++k) {
    const StorageParams& sp = net.storage(kStorageNodes[k]);
    ends[k].push_back(EndPolicy::free());
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      ends[k].push_back(EndPolicy::fixed_at(sp.e_min + f * (sp.e_max - sp.e_min)));
    }
  }
  for (std::size_t days = 1; days <= max_days; ++days) {
    std::optional<std::array<double, 2>> first;
    bool same = true;
    for (const EndPolicy& se : ends[0]) {
      for (const EndPolicy& sh : ends[1]) {
        if (!same) break;
        WindowSpec w;
        w.start_step = day * 24;
        w.series = series.slice(day * 24, days * 24);
        w.boundary.e_init = e_init;
        w.boundary.end = {se, sh};
        const MilpInstance inst = build_milp(net, w);
        const auto x = lexicographic_optimum(inst);
        if (!x) continue;
        const std::array<double, 2> levels = {
            (*x)[static_cast<std::size_t>(inst.layout.state[0][23])],
            (*x)[static_cast<std::size_t>(inst.layout.state[1][23])]};
        if (!first) {
          first = levels;
          continue;
        }
        for (std::size_t k = 0; k < 2; ++k) {
          const double tol =
              std::max(1e-6 * net.storage(kStorageNodes[k]).e_max, 1e-9);
          if (std::abs(levels[k] - (*first)[k]) > tol) same = false;
        }
      }
    }
    if (first && same) return days;
  }
  return max_days + 1;
}

}  // namespace stes::test
