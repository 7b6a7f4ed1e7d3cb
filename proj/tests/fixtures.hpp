#pragma once

// Shared builders for the unit tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stes/data.hpp"
#include "stes/formulation.hpp"
#include "stes/network.hpp"
#include "stes/solver.hpp"

namespace stes::test {

inline CaseConfig case_config() { return CaseConfig::residential_case(); }

inline StorageParams battery() { return case_config().battery; }
inline StorageParams heat_storage() { return case_config().heat_storage; }

inline EnergyNetwork case_network() { return case_config().network(); }

// Lossless storage with the given capacity and symmetric power bound.
inline StorageParams ideal_storage(double e_max, double power,
                                   double e_init = 0.0) {
  StorageParams sp;
  sp.e_max = e_max;
  sp.p_ch_max = power;
  sp.p_dis_max = power;
  sp.e_init = e_init;
  return sp;
}

// Every series constant over `steps` steps.
inline SeriesBundle constant_bundle(std::size_t steps, double d_de, double d_dh,
                                    double c_buy, double c_sell,
                                    double p_pv = 0.0, double p_st = 0.0,
                                    double p_ac = 0.0) {
  SeriesBundle b;
  b.d_de.assign(steps, d_de);
  b.d_dh.assign(steps, d_dh);
  b.p_pv.assign(steps, p_pv);
  b.p_st.assign(steps, p_st);
  b.p_ac.assign(steps, p_ac);
  b.c_buy.assign(steps, c_buy);
  b.c_sell.assign(steps, c_sell);
  return b;
}

inline WindowSpec window(const SeriesBundle& series,
                         const BoundaryConditions& bc = {}) {
  WindowSpec w;
  w.series = series;
  w.boundary = bc;
  return w;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace stes::test
