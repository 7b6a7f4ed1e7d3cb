#pragma once

// Full-horizon benchmark, rolling-horizon (MPC) simulation with terminal
// storage policies, the minimum-prediction-horizon search and derived
// historical targets.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stes/formulation.hpp"
#include "stes/network.hpp"
#include "stes/solver.hpp"

namespace stes {

inline constexpr std::size_t kHoursPerYear = 8760;

// Storage levels at the start and end of the simulated period, by storage
// slot (battery 0, heat storage 1).
struct YearBoundary {
  std::array<double, 2> e_init{};
  std::array<double, 2> e_end{};
};

// Heat storage level per hour of a reference year.
struct TargetSeries {
  std::vector<double> level;  // level[h - 1] is the level at the end of hour h

  // Level at 1-based hour h; hours past the end wrap around the period.
  double at_hour(std::size_t hour) const;
  std::vector<Violation> validate(const StorageParams& heat) const;
};

struct RollingPolicy {
  enum class HeatEnd { Free, FixedInitial, HistoricalTarget, ForceMin, ForceMax };
  enum class BatteryEnd { Free, FixedInitial };

  std::size_t prediction_days = 1;
  std::size_t control_days = 1;
  HeatEnd sh_end = HeatEnd::Free;
  BatteryEnd se_end = BatteryEnd::Free;
  TargetSeries targets;  // HistoricalTarget only
  // Replaces the hard historical target by a penalized soft one (EUR/kWh).
  std::optional<double> soft_penalty;

  // Heat storage held to the prior-year optimum, battery left free.
  static RollingPolicy hybrid(std::size_t days, TargetSeries targets);
  // Both storages end each window at the level they started it with.
  static RollingPolicy fixed_level(std::size_t days);

  std::vector<Violation> validate() const;
};

const char* to_string(RollingPolicy::HeatEnd e);
const char* to_string(RollingPolicy::BatteryEnd e);

struct WindowRecord {
  std::size_t index = 0;
  std::size_t day = 0;
  std::size_t start_step = 0;
  std::size_t steps = 0;
  std::size_t implemented_steps = 0;
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  double seconds = 0.0;
  double max_violation = 0.0;
};

struct SimulationTrace {
  std::string method;
  std::size_t horizon_days = 0;
  bool benchmark = false;
  double dt_hours = 1.0;
  std::array<double, 2> e_init{};
  std::vector<Arc> arcs;
  std::vector<std::vector<double>> flows;      // flows[arc][t]
  std::array<std::vector<double>, 2> state;    // level at the end of step t
  std::vector<std::size_t> window_of_step;
  std::vector<WindowRecord> windows;
  double total_cost = 0.0;
  double runtime_s = 0.0;

  std::size_t steps() const { return window_of_step.size(); }
};

struct HorizonOptions {
  SolverConfig solver;
  double dt_hours = 1.0;
  // Canonical optimum among ties: after the cost optimum, maximize the sum
  // of heat storage levels, then the sum of battery levels.
  bool polish = false;
  // Called with every window model before it is solved.
  std::function<void(const MilpInstance&, const WindowRecord&)> on_window;
  // Called after every solve, whatever its status. Minimum-horizon solves
  // report the searched day and horizon length in the record. A threaded
  // sweep calls it from its workers.
  std::function<void(const MilpInstance&, const WindowRecord&,
                     const SolveResult&)>
      on_solved;
};

// Throws InfeasibleError or LimitError when the single solve fails.
SimulationTrace solve_full_horizon(const EnergyNetwork& net,
                                   const SeriesBundle& series,
                                   const YearBoundary& boundary,
                                   const HorizonOptions& opts = {});

// Day-by-day receding horizon. Windows that reach the end of the data are
// truncated and take the year-end levels as fixed end levels. Throws
// InfeasibleError carrying the day of the failing window.
SimulationTrace run_rolling(const EnergyNetwork& net,
                            const SeriesBundle& series,
                            const RollingPolicy& policy,
                            const YearBoundary& boundary,
                            const HorizonOptions& opts = {});

// Solves one window model, applying the polish if requested. Throws nothing;
// the caller inspects the status.
SolveResult solve_window(const MilpInstance& inst, const HorizonOptions& opts);

struct MinHorizonResult {
  std::size_t day = 0;
  std::size_t days = 0;  // max_days + 1 if never reached
  bool reached = false;
  // Horizons where the forced-minimum or forced-maximum run was infeasible.
  std::vector<std::size_t> skipped;
  // The agreement found at `days` did not hold at days + 1.
  bool recheck_failed = false;
};

// Smallest prediction horizon (days) for which the end-of-day-one storage
// levels agree between windows forced to end empty and windows forced to end
// full. `e_init` is the storage state at the start of `day`. The data must
// cover day + max_days days.
MinHorizonResult min_prediction_horizon(const EnergyNetwork& net,
                                        const SeriesBundle& series,
                                        std::size_t day, std::size_t max_days,
                                        const std::array<double, 2>& e_init,
                                        HorizonOptions opts = {});

// Runs the search for every day in [first_day, last_day) with start states
// taken from a benchmark trace, on `threads` worker threads.
std::vector<MinHorizonResult> min_prediction_horizon_sweep(
    const EnergyNetwork& net, const SeriesBundle& series,
    const SimulationTrace& benchmark, std::size_t first_day,
    std::size_t last_day, std::size_t max_days, const HorizonOptions& opts,
    std::size_t threads = 1);

// (cost - benchmark) / |benchmark|. Throws UndefinedGapError for a zero
// benchmark.
double suboptimality_gap(double cost, double benchmark_cost);
double suboptimality_gap(const SimulationTrace& trace,
                         const SimulationTrace& benchmark);

// Heat storage levels of a year-long trace. Throws InputError if the trace
// does not have exactly `period` steps.
TargetSeries derive_targets(const SimulationTrace& trace,
                            std::size_t period = kHoursPerYear);

// State recursion across every step (including window seams) and state
// bounds, checked against the implemented flows. Returns one message per
// violation.
std::vector<std::string> trace_violations(const EnergyNetwork& net,
                                          const SimulationTrace& trace,
                                          double tolerance = 1e-9);

}  // namespace stes
