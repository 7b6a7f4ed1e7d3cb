#include "stes/horizon.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "stes/error.hpp"

namespace stes {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::size_t steps_per_day(double dt_hours) {
  TimeGrid grid;
  grid.dt_hours = dt_hours;
  grid.n_steps = 1;
  grid.control_steps = 1;
  const auto problems = grid.validate();
  if (!problems.empty()) {
    throw InputError("time step: " + problems.front().rule);
  }
  const std::size_t spd = grid.steps_per_day();
  if (spd == 0 || std::abs(static_cast<double>(spd) * dt_hours - 24.0) > 1e-9) {
    throw InputError(fmt::format("time step {} h does not divide a day", dt_hours));
  }
  return spd;
}

SimulationTrace empty_trace(const EnergyNetwork& net, std::size_t steps,
                            double dt_hours,
                            const std::array<double, 2>& e_init) {
  SimulationTrace tr;
  tr.dt_hours = dt_hours;
  tr.e_init = e_init;
  tr.arcs = net.arcs();
  tr.flows.assign(tr.arcs.size(), std::vector<double>(steps, 0.0));
  tr.state[0].assign(steps, 0.0);
  tr.state[1].assign(steps, 0.0);
  tr.window_of_step.assign(steps, 0);
  return tr;
}

// Copies the first `count` steps of a window solution into the trace.
void implement(SimulationTrace& tr, const MilpInstance& inst,
               const std::vector<double>& x, std::size_t first,
               std::size_t count, std::size_t window) {
  const VariableLayout& lay = inst.layout;
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t a = 0; a < lay.flow.size(); ++a) {
      tr.flows[a][first + t] = x[static_cast<std::size_t>(lay.flow[a][t])];
    }
    for (std::size_t s = 0; s < 2; ++s) {
      tr.state[s][first + t] = x[static_cast<std::size_t>(lay.state[s][t])];
    }
    tr.window_of_step[first + t] = window;
  }
}

std::string describe_end(const EndPolicy& e) {
  switch (e.kind) {
    case EndPolicy::Kind::Free: return "free";
    case EndPolicy::Kind::FixedAt: return fmt::format("fixed at {}", e.value);
    case EndPolicy::Kind::ForceMin: return "forced to minimum";
    case EndPolicy::Kind::ForceMax: return "forced to maximum";
    case EndPolicy::Kind::SoftAt:
      return fmt::format("soft target {} (penalty {})", e.value, e.penalty);
  }
  return "?";
}

[[noreturn]] void throw_failure(const SolveResult& res, const WindowSpec& win,
                                const WindowRecord& rec) {
  const std::string where = fmt::format(
      "window {} (day {}, steps {}..{}; start levels SE {:.6g} kWh, SH {:.6g} "
      "kWh; SE end {}, SH end {})",
      rec.index, rec.day, rec.start_step, rec.start_step + rec.steps - 1,
      win.boundary.e_init[0], win.boundary.e_init[1],
      describe_end(win.boundary.end[0]), describe_end(win.boundary.end[1]));
  switch (res.status) {
    case SolveStatus::Infeasible:
      throw InfeasibleError(where + " is infeasible", rec.day);
    case SolveStatus::LimitReached:
      throw LimitError(where + " hit a solver limit");
    case SolveStatus::Unbounded:
      throw SolverError(where + " is unbounded");
    case SolveStatus::Optimal: break;
  }
  throw SolverError(where + " failed");
}

WindowRecord solve_into(SimulationTrace& tr, const EnergyNetwork& net,
                        const WindowSpec& win, WindowRecord rec,
                        const HorizonOptions& opts) {
  const MilpInstance inst = build_milp(net, win);
  if (opts.on_window) opts.on_window(inst, rec);
  const SolveResult res = solve_window(inst, opts);
  if (opts.on_solved) opts.on_solved(inst, rec, res);
  rec.status = res.status;
  rec.iterations = res.iterations;
  rec.nodes = res.nodes;
  rec.seconds = res.wall_seconds;
  if (res.status != SolveStatus::Optimal) throw_failure(res, win, rec);
  rec.objective = res.objective;
  rec.max_violation = verify_solution(inst, res.x).max_violation;
  implement(tr, inst, res.x, rec.start_step, rec.implemented_steps, rec.index);
  spdlog::debug("window {} day {}: {} steps, cost {:.6f}, {} iterations, {} nodes",
                rec.index, rec.day, rec.steps, rec.objective, rec.iterations,
                rec.nodes);
  return rec;
}

// Basis of a solved model extended by one appended row whose logical is
// basic.
Basis with_extra_row(Basis b) {
  if (!b.empty()) b.logical.push_back(VarStatus::Basic);
  return b;
}

}  // namespace

double TargetSeries::at_hour(std::size_t hour) const {
  if (level.empty()) throw InputError("target series is empty");
  if (hour == 0) throw InputError("target hours are 1-based");
  return level[(hour - 1) % level.size()];
}

std::vector<Violation> TargetSeries::validate(const StorageParams& heat) const {
  std::vector<Violation> out;
  if (level.empty()) out.push_back({"targets", "target series is empty"});
  for (std::size_t h = 0; h < level.size(); ++h) {
    if (!(level[h] >= heat.e_min && level[h] <= heat.e_max)) {
      out.push_back({fmt::format("targets[{}]", h + 1),
                     fmt::format("level {} outside [{}, {}]", level[h],
                                 heat.e_min, heat.e_max)});
    }
  }
  return out;
}

RollingPolicy RollingPolicy::hybrid(std::size_t days, TargetSeries targets) {
  RollingPolicy p;
  p.prediction_days = days;
  p.sh_end = HeatEnd::HistoricalTarget;
  p.se_end = BatteryEnd::Free;
  p.targets = std::move(targets);
  return p;
}

RollingPolicy RollingPolicy::fixed_level(std::size_t days) {
  RollingPolicy p;
  p.prediction_days = days;
  p.sh_end = HeatEnd::FixedInitial;
  p.se_end = BatteryEnd::FixedInitial;
  return p;
}

std::vector<Violation> RollingPolicy::validate() const {
  std::vector<Violation> out;
  if (control_days == 0) {
    out.push_back({"control_days", "must be at least 1"});
  }
  if (prediction_days < control_days) {
    out.push_back({"prediction_days", "must not be shorter than control_days"});
  }
  if (sh_end == HeatEnd::HistoricalTarget && targets.level.empty()) {
    out.push_back({"targets", "historical target policy needs a target series"});
  }
  if (soft_penalty && !(*soft_penalty >= 0.0)) {
    out.push_back({"soft_penalty", "must be nonnegative"});
  }
  return out;
}

const char* to_string(RollingPolicy::HeatEnd e) {
  switch (e) {
    case RollingPolicy::HeatEnd::Free: return "free";
    case RollingPolicy::HeatEnd::FixedInitial: return "fixed-initial";
    case RollingPolicy::HeatEnd::HistoricalTarget: return "historical-target";
    case RollingPolicy::HeatEnd::ForceMin: return "force-min";
    case RollingPolicy::HeatEnd::ForceMax: return "force-max";
  }
  return "?";
}

const char* to_string(RollingPolicy::BatteryEnd e) {
  switch (e) {
    case RollingPolicy::BatteryEnd::Free: return "free";
    case RollingPolicy::BatteryEnd::FixedInitial: return "fixed-initial";
  }
  return "?";
}

SolveResult solve_window(const MilpInstance& inst, const HorizonOptions& opts) {
  SolveResult res = solve_milp(inst, opts.solver);
  if (!opts.polish || res.status != SolveStatus::Optimal) return res;

  // Stage 2: hold the cost at its optimum, maximize heat storage levels.
  MilpInstance work = inst;
  const double f = res.objective;
  add_objective_cut(work, f + 1e-9 * std::max(1.0, std::abs(f)));
  maximize_state_sum(work, NodeId::SH);
  Basis start = with_extra_row(res.basis);
  SolveResult second = solve_milp(work, opts.solver, &start);
  std::size_t iterations = res.iterations + second.iterations;
  std::size_t nodes = res.nodes + second.nodes;
  if (second.status != SolveStatus::Optimal) {
    spdlog::warn("polish stage 2 ended {}; keeping the cost optimum",
                 to_string(second.status));
    return res;
  }

  // Stage 3: also hold the heat storage sum, maximize battery levels.
  const double g = second.objective;
  add_objective_cut(work, g + 1e-9 * std::max(1.0, std::abs(g)));
  maximize_state_sum(work, NodeId::SE);
  start = with_extra_row(second.basis);
  SolveResult third = solve_milp(work, opts.solver, &start);
  iterations += third.iterations;
  nodes += third.nodes;
  SolveResult& best = third.status == SolveStatus::Optimal ? third : second;
  if (third.status != SolveStatus::Optimal) {
    spdlog::warn("polish stage 3 ended {}; keeping stage 2",
                 to_string(third.status));
  }

  SolveResult out;
  out.status = SolveStatus::Optimal;
  out.x = best.x;
  out.objective = inst.objective(out.x);
  out.best_bound = res.best_bound;
  out.iterations = iterations;
  out.nodes = nodes;
  out.wall_seconds = res.wall_seconds + second.wall_seconds + third.wall_seconds;
  return out;
}

SimulationTrace solve_full_horizon(const EnergyNetwork& net,
                                   const SeriesBundle& series,
                                   const YearBoundary& boundary,
                                   const HorizonOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t spd = steps_per_day(opts.dt_hours);
  const std::size_t n = series.size();
  if (n == 0) throw InputError("series are empty");

  SimulationTrace tr = empty_trace(net, n, opts.dt_hours, boundary.e_init);
  tr.method = "full-horizon";
  tr.benchmark = true;
  tr.horizon_days = (n + spd - 1) / spd;

  WindowSpec win;
  win.start_step = 0;
  win.dt_hours = opts.dt_hours;
  win.series = series;
  win.boundary.e_init = boundary.e_init;
  win.boundary.end = {EndPolicy::fixed_at(boundary.e_end[0]),
                      EndPolicy::fixed_at(boundary.e_end[1])};
  WindowRecord rec;
  rec.steps = n;
  rec.implemented_steps = n;
  tr.windows.push_back(solve_into(tr, net, win, rec, opts));
  tr.total_cost = dispatch_cost(net, series, opts.dt_hours, tr.flows);
  tr.runtime_s = seconds_since(t0);
  return tr;
}

SimulationTrace run_rolling(const EnergyNetwork& net,
                            const SeriesBundle& series,
                            const RollingPolicy& policy,
                            const YearBoundary& boundary,
                            const HorizonOptions& opts) {
  const auto problems = policy.validate();
  if (!problems.empty()) {
    throw InputError("rolling policy: " + problems.front().subject + ": " +
                     problems.front().rule);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t spd = steps_per_day(opts.dt_hours);
  const std::size_t n = series.size();
  if (n == 0) throw InputError("series are empty");

  SimulationTrace tr = empty_trace(net, n, opts.dt_hours, boundary.e_init);
  tr.horizon_days = policy.prediction_days;
  switch (policy.sh_end) {
    case RollingPolicy::HeatEnd::HistoricalTarget: tr.method = "hybrid"; break;
    case RollingPolicy::HeatEnd::FixedInitial:
      tr.method = policy.se_end == RollingPolicy::BatteryEnd::FixedInitial
                      ? "fixed-level"
                      : "rolling";
      break;
    default: tr.method = "rolling"; break;
  }

  std::array<double, 2> e = boundary.e_init;
  std::size_t s = 0;
  std::size_t w = 0;
  while (s < n) {
    const std::size_t day = s / spd;
    const std::size_t len = std::min(policy.prediction_days * spd, n - s);
    WindowSpec win;
    win.start_step = s;
    win.dt_hours = opts.dt_hours;
    win.series = series.slice(s, len);
    win.boundary.e_init = e;
    if (s + len == n) {
      win.boundary.end = {EndPolicy::fixed_at(boundary.e_end[0]),
                          EndPolicy::fixed_at(boundary.e_end[1])};
    } else {
      switch (policy.se_end) {
        case RollingPolicy::BatteryEnd::Free:
          win.boundary.end[0] = EndPolicy::free();
          break;
        case RollingPolicy::BatteryEnd::FixedInitial:
          win.boundary.end[0] = EndPolicy::fixed_at(e[0]);
          break;
      }
      EndPolicy& sh = win.boundary.end[1];
      switch (policy.sh_end) {
        case RollingPolicy::HeatEnd::Free: sh = EndPolicy::free(); break;
        case RollingPolicy::HeatEnd::FixedInitial:
          sh = EndPolicy::fixed_at(e[1]);
          break;
        case RollingPolicy::HeatEnd::HistoricalTarget: {
          const double target =
              policy.targets.at_hour((day + policy.prediction_days) * spd);
          sh = policy.soft_penalty
                   ? EndPolicy::soft_at(target, *policy.soft_penalty)
                   : EndPolicy::fixed_at(target);
          break;
        }
        case RollingPolicy::HeatEnd::ForceMin: sh = EndPolicy::force_min(); break;
        case RollingPolicy::HeatEnd::ForceMax: sh = EndPolicy::force_max(); break;
      }
    }
    WindowRecord rec;
    rec.index = w;
    rec.day = day;
    rec.start_step = s;
    rec.steps = len;
    rec.implemented_steps = std::min(policy.control_days * spd, len);
    tr.windows.push_back(solve_into(tr, net, win, rec, opts));
    s += rec.implemented_steps;
    e = {tr.state[0][s - 1], tr.state[1][s - 1]};
    ++w;
  }
  tr.total_cost = dispatch_cost(net, series, opts.dt_hours, tr.flows);
  tr.runtime_s = seconds_since(t0);
  spdlog::info("{} {} days: cost {:.2f} EUR over {} windows in {:.1f} s",
               tr.method, tr.horizon_days, tr.total_cost, tr.windows.size(),
               tr.runtime_s);
  return tr;
}

MinHorizonResult min_prediction_horizon(const EnergyNetwork& net,
                                        const SeriesBundle& series,
                                        std::size_t day, std::size_t max_days,
                                        const std::array<double, 2>& e_init,
                                        HorizonOptions opts) {
  const std::size_t spd = steps_per_day(opts.dt_hours);
  if (max_days == 0) throw InputError("max_days must be at least 1");
  if ((day + max_days) * spd > series.size()) {
    throw InputError(fmt::format(
        "min-horizon search from day {} over {} days needs {} steps of data, "
        "have {}",
        day, max_days, (day + max_days) * spd, series.size()));
  }
  opts.polish = true;
  std::array<double, 2> tol{};
  for (std::size_t k = 0; k < 2; ++k) {
    tol[k] = std::max(1e-6 * net.storage(kStorageNodes[k]).e_max, 1e-9);
  }

  // End-of-day-one levels with both storages forced to `end`, or nothing if
  // that window is infeasible.
  auto day_one = [&](std::size_t days, const EndPolicy& end)
      -> std::optional<std::array<double, 2>> {
    WindowSpec win;
    win.start_step = day * spd;
    win.dt_hours = opts.dt_hours;
    win.series = series.slice(day * spd, days * spd);
    win.boundary.e_init = e_init;
    win.boundary.end = {end, end};
    const MilpInstance inst = build_milp(net, win);
    const SolveResult res = solve_window(inst, opts);
    if (opts.on_solved) {
      WindowRecord rec;
      rec.day = day;
      rec.start_step = win.start_step;
      rec.steps = win.length();
      rec.status = res.status;
      opts.on_solved(inst, rec, res);
    }
    if (res.status == SolveStatus::Infeasible) return std::nullopt;
    if (res.status != SolveStatus::Optimal) {
      throw LimitError(fmt::format("min-horizon day {} with {} days: solver {}",
                                   day, days, to_string(res.status)));
    }
    const VariableLayout& lay = inst.layout;
    return std::array<double, 2>{
        res.x[static_cast<std::size_t>(lay.state[0][spd - 1])],
        res.x[static_cast<std::size_t>(lay.state[1][spd - 1])]};
  };
  auto agree = [&](std::size_t days) -> std::optional<bool> {
    const auto lo = day_one(days, EndPolicy::force_min());
    if (!lo) return std::nullopt;
    const auto hi = day_one(days, EndPolicy::force_max());
    if (!hi) return std::nullopt;
    return std::abs((*lo)[0] - (*hi)[0]) <= tol[0] &&
           std::abs((*lo)[1] - (*hi)[1]) <= tol[1];
  };

  MinHorizonResult out;
  out.day = day;
  for (std::size_t t = 1; t <= max_days; ++t) {
    const auto ok = agree(t);
    if (!ok) {
      out.skipped.push_back(t);
      continue;
    }
    if (!*ok) continue;
    out.days = t;
    out.reached = true;
    if ((day + t + 1) * spd <= series.size()) {
      const auto again = agree(t + 1);
      if (again && !*again) {
        out.recheck_failed = true;
        spdlog::warn("day {}: levels agree at {} days but not at {} days", day,
                     t, t + 1);
      }
    }
    return out;
  }
  out.days = max_days + 1;
  return out;
}

std::vector<MinHorizonResult> min_prediction_horizon_sweep(
    const EnergyNetwork& net, const SeriesBundle& series,
    const SimulationTrace& benchmark, std::size_t first_day,
    std::size_t last_day, std::size_t max_days, const HorizonOptions& opts,
    std::size_t threads) {
  const std::size_t spd = steps_per_day(opts.dt_hours);
  if (last_day < first_day) throw InputError("empty day range");
  if (last_day * spd > benchmark.steps() + spd) {
    throw InputError("day range runs past the benchmark trace");
  }
  std::vector<MinHorizonResult> results(last_day - first_day);
  std::atomic<std::size_t> next{first_day};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t d = next.fetch_add(1);
      if (d >= last_day) return;
      try {
        const std::array<double, 2> e0 =
            d == 0 ? benchmark.e_init
                   : std::array<double, 2>{benchmark.state[0][d * spd - 1],
                                           benchmark.state[1][d * spd - 1]};
        results[d - first_day] =
            min_prediction_horizon(net, series, d, max_days, e0, opts);
        spdlog::info("day {}: minimum prediction horizon {} days", d,
                     results[d - first_day].days);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = last_day;
        return;
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

double suboptimality_gap(double cost, double benchmark_cost) {
  if (benchmark_cost == 0.0) {
    throw UndefinedGapError("benchmark cost is zero; relative gap undefined");
  }
  return (cost - benchmark_cost) / std::abs(benchmark_cost);
}

double suboptimality_gap(const SimulationTrace& trace,
                         const SimulationTrace& benchmark) {
  if (trace.steps() != benchmark.steps()) {
    throw InputError("traces cover different periods");
  }
  return suboptimality_gap(trace.total_cost, benchmark.total_cost);
}

TargetSeries derive_targets(const SimulationTrace& trace, std::size_t period) {
  if (trace.steps() != period) {
    throw InputError(fmt::format(
        "target derivation needs a trace of {} steps, got {}", period,
        trace.steps()));
  }
  TargetSeries out;
  out.level = trace.state[1];
  return out;
}

std::vector<std::string> trace_violations(const EnergyNetwork& net,
                                          const SimulationTrace& trace,
                                          double tolerance) {
  std::vector<std::string> out;
  const std::size_t n = trace.steps();
  const double dt = trace.dt_hours;
  for (std::size_t k = 0; k < 2; ++k) {
    const NodeId node = kStorageNodes[k];
    const StorageParams& p = net.storage(node);
    std::vector<std::size_t> in_arcs;
    std::vector<std::size_t> out_arcs;
    for (std::size_t a = 0; a < trace.arcs.size(); ++a) {
      if (trace.arcs[a].to == node) in_arcs.push_back(a);
      if (trace.arcs[a].from == node) out_arcs.push_back(a);
    }
    const double scale = std::max(1.0, p.e_max);
    double prev = trace.e_init[k];
    for (std::size_t t = 0; t < n; ++t) {
      double charge = 0.0;
      double discharge = 0.0;
      for (std::size_t a : in_arcs) charge += trace.flows[a][t];
      for (std::size_t a : out_arcs) discharge += trace.flows[a][t];
      const double expect =
          p.rho * prev + dt * (p.eta_ch * charge - discharge / p.eta_dis);
      const double e = trace.state[k][t];
      if (std::abs(e - expect) > tolerance * scale) {
        out.push_back(fmt::format(
            "{} step {} (window {}): level {} but recursion gives {}",
            to_string(node), t, trace.window_of_step[t], e, expect));
      }
      if (e < p.e_min - tolerance * scale || e > p.e_max + tolerance * scale) {
        out.push_back(fmt::format("{} step {}: level {} outside [{}, {}]",
                                  to_string(node), t, e, p.e_min, p.e_max));
      }
      prev = e;
    }
  }
  return out;
}

}  // namespace stes
