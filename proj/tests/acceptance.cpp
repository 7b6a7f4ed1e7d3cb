// Acceptance run: one PASS, FAIL or SKIP line per criterion, exit status 1
// if anything failed.
//
// The published-dataset criterion runs only when STES_CASE_CONFIG (the
// simulated year, with data running on into the next year) and
// STES_CASE_PRIOR_CONFIG (the year before, giving the hybrid targets) name
// case configurations. Otherwise the synthetic property criteria are the
// gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "fixtures.hpp"
#include "highs_bridge.hpp"
#include "min_horizon_case.hpp"
#include "oracles.hpp"
#include "stes/data.hpp"
#include "stes/error.hpp"
#include "stes/horizon.hpp"
#include "stes/network.hpp"
#include "stes/synthetic.hpp"

using namespace stes;
using stes::test::rel_diff;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Board {
 public:
  void pass(const std::string& id, const std::string& what) { line("PASS", id, what); }
  void skip(const std::string& id, const std::string& what) { line("SKIP", id, what); }
  void fail(const std::string& id, const std::string& what) {
    line("FAIL", id, what);
    failed_ = true;
  }
  void check(bool ok, const std::string& id, const std::string& what) {
    ok ? pass(id, what) : fail(id, what);
  }
  bool failed() const { return failed_; }

 private:
  void line(const char* verdict, const std::string& id, const std::string& what) {
    fmt::print("{} {:<3} {}\n", verdict, id, what);
    std::fflush(stdout);
  }
  bool failed_ = false;
};

// Every solve the run sees: largest verified violation over optimal results
// and the worst simultaneous charge and discharge at positive-price hours.
struct SolveAudit {
  std::mutex mu;
  std::size_t optimal = 0;
  double max_violation = 0.0;
  std::string worst_violation;
  std::size_t windows = 0;
  std::size_t positive_hours = 0;
  double worst_overlap = 0.0;
  std::string worst_overlap_at;

  void record_optimal(const MilpInstance& inst, const std::vector<double>& x) {
    const ViolationReport rep = verify_solution(inst, x);
    std::lock_guard lock(mu);
    ++optimal;
    if (rep.max_violation > max_violation) {
      max_violation = rep.max_violation;
      worst_violation = rep.worst;
    }
  }

  // `prices` holds at least the window's steps, starting at `offset`.
  void record_window(const EnergyNetwork& net, const MilpInstance& inst,
                     const std::vector<double>& x, const SeriesBundle& prices,
                     std::size_t offset) {
    std::size_t positive = 0;
    double overlap = 0.0;
    std::string at;
    for (std::size_t t = 0; t < inst.layout.steps; ++t) {
      if (!(prices.c_buy[offset + t] > 0.0 && prices.c_sell[offset + t] > 0.0)) continue;
      ++positive;
      for (std::size_t k = 0; k < 2; ++k) {
        const NodeId node = kStorageNodes[k];
        double in = 0.0;
        double out = 0.0;
        for (std::size_t a = 0; a < net.arcs().size(); ++a) {
          const double v = x[static_cast<std::size_t>(inst.layout.flow[a][t])];
          if (net.arcs()[a].to == node) in += v;
          if (net.arcs()[a].from == node) out += v;
        }
        if (std::min(in, out) > overlap) {
          overlap = std::min(in, out);
          at = fmt::format("{} step {} of a {}-step window", to_string(node), t,
                           inst.layout.steps);
        }
      }
    }
    std::lock_guard lock(mu);
    ++windows;
    positive_hours += positive;
    if (overlap > worst_overlap) {
      worst_overlap = overlap;
      worst_overlap_at = at;
    }
  }

  // Options that route every engine solve through this audit.
  HorizonOptions options(const EnergyNetwork& net, const SeriesBundle& series) {
    HorizonOptions o;
    o.on_solved = [this, &net, &series](const MilpInstance& inst,
                                        const WindowRecord& rec,
                                        const SolveResult& res) {
      if (res.status != SolveStatus::Optimal) return;
      record_optimal(inst, res.x);
      record_window(net, inst, res.x, series, rec.start_step);
    };
    return o;
  }
};

// Simultaneous flows below this many kW count as none.
constexpr double kOverlapTol = 1e-9;

void criterion_1(Board& board) {
  const CaseConfig cfg = CaseConfig::residential_case();
  const StorageDurations se = storage_durations(cfg.battery);
  const StorageDurations sh = storage_durations(cfg.heat_storage);
  const bool ok = std::abs(se.charge_hours - 3.16) <= 0.01 &&
                  std::abs(se.discharge_hours - 4.75) <= 0.01 &&
                  std::abs(sh.charge_hours - 583.2) <= 0.1 &&
                  std::abs(sh.discharge_hours - 394.3) <= 0.1;
  board.check(ok, "1",
              fmt::format("storage durations: battery {:.3f} h / {:.3f} h "
                          "(3.16 / 4.75 within 0.01 h), heat {:.2f} h / {:.2f} h "
                          "(583.2 / 394.3 within 0.1 h)",
                          se.charge_hours, se.discharge_hours, sh.charge_hours,
                          sh.discharge_hours));
}

void criterion_2(Board& board) {
  const CaseConfig cfg = CaseConfig::residential_case();
  const double days = leaky_fill_horizon(cfg.heat_storage) / 24.0;
  board.check(days >= 41.0 && days <= 42.0, "2",
              fmt::format("leaky fill horizon of the heat storage: {:.3f} days "
                          "(in [41, 42])",
                          days));
}

// Published-dataset reproduction.
void criterion_3(Board& board) {
  const char* year_cfg = std::getenv("STES_CASE_CONFIG");
  const char* prior_cfg = std::getenv("STES_CASE_PRIOR_CONFIG");
  if (year_cfg == nullptr || prior_cfg == nullptr) {
    board.skip("3", "published dataset not configured (set STES_CASE_CONFIG "
                    "and STES_CASE_PRIOR_CONFIG); synthetic criterion 4 applies");
    return;
  }
  try {
    const CaseConfig cfg = load_config(year_cfg);
    const CaseConfig prior_case = load_config(prior_cfg);
    const SeriesBundle all = ingest(cfg);
    const std::size_t year = cfg.year_steps == 0 ? all.size() : cfg.year_steps;
    const SeriesBundle s = all.slice(0, year);
    const EnergyNetwork net = cfg.network();
    const YearBoundary yb = cfg.year_boundary();
    HorizonOptions opts;
    opts.dt_hours = cfg.dt_hours;

    auto within_time = [](double seconds, double reported) {
      return seconds <= 10.0 * reported;
    };

    auto t0 = Clock::now();
    const SimulationTrace bench = solve_full_horizon(net, s, yb, opts);
    double secs = seconds_since(t0);
    board.check(rel_diff(bench.total_cost, 1362.45) <= 0.01 && within_time(secs, 20),
                "3a", fmt::format("full horizon {:.2f} EUR (1362.45 within 1 %), "
                                  "{:.0f} s (at most 200 s)",
                                  bench.total_cost, secs));

    const SeriesBundle prior_all = ingest(prior_case);
    const std::size_t prior_year =
        prior_case.year_steps == 0 ? prior_all.size() : prior_case.year_steps;
    const SimulationTrace prior =
        solve_full_horizon(prior_case.network(), prior_all.slice(0, prior_year),
                           prior_case.year_boundary(), opts);
    const TargetSeries targets = derive_targets(prior, prior_year);

    for (std::size_t days : {4, 5}) {
      bool infeasible = false;
      try {
        run_rolling(net, s, RollingPolicy::hybrid(days, targets), yb, opts);
      } catch (const InfeasibleError&) {
        infeasible = true;
      }
      board.check(infeasible, fmt::format("3{}", days == 4 ? 'b' : 'c'),
                  fmt::format("hybrid {} days is infeasible", days));
    }

    struct Row {
      std::size_t days;
      double gap;
      double seconds;
    };
    const Row rows[] = {{6, 4.31, 12}, {10, 2.87, 26}, {20, 1.95, 54},
                        {30, 1.44, 122}, {42, 0.92, 230}};
    char id = 'd';
    std::optional<double> hybrid_42;
    for (const Row& r : rows) {
      t0 = Clock::now();
      const SimulationTrace tr =
          run_rolling(net, s, RollingPolicy::hybrid(r.days, targets), yb, opts);
      secs = seconds_since(t0);
      const double gap = suboptimality_gap(tr, bench) * 100.0;
      if (r.days == 42) hybrid_42 = tr.total_cost;
      board.check(std::abs(gap - r.gap) <= 0.5 && within_time(secs, r.seconds) &&
                      trace_violations(net, tr).empty(),
                  fmt::format("3{}", id++),
                  fmt::format("hybrid {} days: gap {:.2f} % ({:.2f} within 0.5 "
                              "points), {:.0f} s (at most {:.0f} s)",
                              r.days, gap, r.gap, secs, 10 * r.seconds));
    }

    t0 = Clock::now();
    const SimulationTrace fixed =
        run_rolling(net, s, RollingPolicy::fixed_level(42), yb, opts);
    secs = seconds_since(t0);
    const double fixed_gap = suboptimality_gap(fixed, bench) * 100.0;
    board.check(std::abs(fixed_gap - 11.42) <= 0.5 && within_time(secs, 177) &&
                    hybrid_42 && *hybrid_42 < fixed.total_cost,
                fmt::format("3{}", id++),
                fmt::format("fixed level 42 days: gap {:.2f} % (11.42 within "
                            "0.5 points), {:.0f} s (at most 1770 s), below hybrid "
                            "42 days",
                            fixed_gap, secs));

    const std::size_t spd = s.size() / (year / 24);
    const std::size_t days_in_year = year / spd;
    const std::size_t max_days =
        std::min<std::size_t>(40, all.size() / spd - days_in_year);
    const auto sweep = min_prediction_horizon_sweep(
        net, all, bench, 0, days_in_year, max_days, opts,
        std::max(1U, std::thread::hardware_concurrency()));
    std::size_t worst = 0;
    for (const auto& r : sweep) worst = std::max(worst, r.days);
    board.check(worst == 36, fmt::format("3{}", id++),
                fmt::format("largest minimum prediction horizon over the year: "
                            "{} days (exactly 36)",
                            worst));
  } catch (const std::exception& e) {
    board.fail("3", fmt::format("published dataset run failed: {}", e.what()));
  }
}

// A 30-day synthetic stub used by 4(a), 4(c), 4(d) and 5.
SeriesBundle stub_30() {
  SyntheticSpec spec;
  spec.days = 30;
  return generate_synthetic(spec);
}

struct Sample {
  MilpInstance inst;
  double objective;
};

void criterion_4a_d(Board& board, SolveAudit& audit, std::vector<Sample>& samples,
                    std::vector<SimulationTrace>& traces) {
  const SeriesBundle s = stub_30();
  const EnergyNetwork net = stes::test::case_network();
  const YearBoundary yb = stes::test::case_config().year_boundary();

  HorizonOptions opts = audit.options(net, s);
  const SimulationTrace bench = solve_full_horizon(net, s, yb, opts);

  RollingPolicy whole;
  whole.prediction_days = 30;
  HorizonOptions sampled = opts;
  sampled.on_window = [&samples](const MilpInstance& inst, const WindowRecord& rec) {
    if (rec.index % 6 == 0) samples.push_back({inst, 0.0});
  };
  const SimulationTrace roll = run_rolling(net, s, whole, yb, sampled);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].objective = roll.windows[6 * i].objective;
  }
  const double diff = rel_diff(roll.total_cost, bench.total_cost);
  board.check(diff <= 1e-6, "4a",
              fmt::format("rolling over the whole remaining 30 days costs {:.6f} "
                          "EUR, full horizon {:.6f} EUR (relative difference "
                          "{:.2e}, at most 1e-6)",
                          roll.total_cost, bench.total_cost, diff));

  traces.push_back(bench);
  traces.push_back(roll);
  const TargetSeries targets = derive_targets(bench, s.size());
  traces.push_back(run_rolling(net, s, RollingPolicy::hybrid(7, targets), yb, opts));
  traces.push_back(run_rolling(net, s, RollingPolicy::fixed_level(7), yb, opts));
}

void criterion_4b(Board& board, SolveAudit& audit) {
  const EnergyNetwork net = stes::test::case_network();
  std::size_t checked = 0;
  std::size_t branched = 0;
  std::size_t max_binaries = 0;
  double worst = 0.0;
  std::string problem;
  for (std::uint64_t seed = 1; checked < 50 && seed < 1000; ++seed) {
    const WindowSpec w = stes::test::random_binary_window(seed);
    const MilpInstance inst = build_milp(net, w);
    if (inst.num_binaries() == 0 || inst.num_binaries() > 10) continue;
    ++checked;
    max_binaries = std::max(max_binaries, inst.num_binaries());
    const SolveResult bb = solve_milp(inst);
    const auto oracle = stes::test::enumerate_binaries(inst);
    if (bb.status != SolveStatus::Optimal || !oracle.objective) {
      problem = fmt::format("seed {}: B&B {}, enumeration {}", seed,
                            to_string(bb.status), oracle.objective ? "optimal" : "none");
      continue;
    }
    audit.record_optimal(inst, bb.x);
    audit.record_window(net, inst, bb.x, w.series, 0);
    {
      std::lock_guard lock(audit.mu);
      if (oracle.max_violation > audit.max_violation) {
        audit.max_violation = oracle.max_violation;
        audit.worst_violation = "enumeration LP";
      }
    }
    if (bb.nodes > 1) ++branched;
    worst = std::max(worst, rel_diff(bb.objective, *oracle.objective));
  }
  board.check(checked == 50 && problem.empty() && worst <= 1e-8, "4b",
              fmt::format("B&B equals enumeration on {} windows with 1 to {} "
                          "binaries ({} branched): largest difference {:.2e} "
                          "(at most 1e-8){}",
                          checked, max_binaries, branched, worst,
                          problem.empty() ? "" : "; " + problem));
}

void criterion_4e(Board& board, SolveAudit& audit, std::vector<SimulationTrace>& traces) {
  namespace st = stes::test;
  const EnergyNetwork net = st::spike_network();
  const SeriesBundle s = st::spike_series();
  YearBoundary yb;
  yb.e_init = st::spike_initial_levels();
  yb.e_end = yb.e_init;
  HorizonOptions opts = audit.options(net, s);
  const SimulationTrace bench = solve_full_horizon(net, s, yb, opts);
  traces.push_back(bench);

  std::string detail;
  bool ok = true;
  for (std::size_t day : {0, 5, 6, 7}) {
    const std::array<double, 2> e0 =
        day == 0 ? yb.e_init
                 : std::array<double, 2>{bench.state[0][day * 24 - 1],
                                         bench.state[1][day * 24 - 1]};
    const std::size_t max_days = st::kCaseDays - day;
    const MinHorizonResult r = min_prediction_horizon(net, s, day, max_days, e0, opts);
    const std::size_t oracle = st::min_horizon_oracle(net, s, day, max_days, e0);
    ok = ok && r.reached && r.days == oracle;
    detail += fmt::format("{}day {}: {} vs {}", detail.empty() ? "" : ", ", day,
                          r.days, oracle);
  }
  board.check(ok, "4e",
              fmt::format("minimum prediction horizon on the 10-day spike case "
                          "equals the direct-definition oracle (engine vs oracle, "
                          "days: {})",
                          detail));
}

void criterion_5b(Board& board, const std::vector<Sample>& samples) {
  if (!stes::test::highs_available()) {
    board.skip("5b", "no external solver (python3 with highspy) found at build time");
    return;
  }
  const auto dir = std::filesystem::temp_directory_path() / "stes_acceptance_highs";
  std::size_t agreed = 0;
  double worst = 0.0;
  std::string problem;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto run = stes::test::solve_with_highs(samples[i].inst, dir,
                                                  fmt::format("window_{}", i));
    if (!run || run->exit_code != 0 || run->solution.status != "optimal") {
      problem = fmt::format("window {}: HiGHS did not report an optimum", i);
      continue;
    }
    const double d = rel_diff(run->solution.objective, samples[i].objective);
    worst = std::max(worst, d);
    if (d <= 1e-6) ++agreed;
  }
  std::filesystem::remove_all(dir);
  board.check(samples.size() == 5 && agreed == 5, "5b",
              fmt::format("HiGHS on {} exported windows: {} agree, largest "
                          "relative difference {:.2e} (at most 1e-6){}",
                          samples.size(), agreed, worst,
                          problem.empty() ? "" : "; " + problem));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  Board board;
  try {
    criterion_1(board);
    criterion_2(board);
    criterion_3(board);

    const auto start = Clock::now();
    SolveAudit audit;
    std::vector<Sample> samples;
    std::vector<SimulationTrace> traces;
    criterion_4a_d(board, audit, samples, traces);
    criterion_4b(board, audit);

    const EnergyNetwork case_net = stes::test::case_network();
    const EnergyNetwork spike_net = stes::test::spike_network();
    criterion_4e(board, audit, traces);

    board.check(audit.worst_overlap <= kOverlapTol, "4c",
                fmt::format("simultaneous charge and discharge over {} "
                            "positive-price hours in {} solved windows: largest "
                            "{:.2e} kW (at most {:.0e}){}",
                            audit.positive_hours, audit.windows,
                            audit.worst_overlap, kOverlapTol,
                            audit.worst_overlap_at.empty()
                                ? ""
                                : ", at " + audit.worst_overlap_at));

    std::size_t violations = 0;
    std::string first;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const EnergyNetwork& net = i + 1 == traces.size() ? spike_net : case_net;
      const auto v = trace_violations(net, traces[i]);
      violations += v.size();
      if (first.empty() && !v.empty()) first = traces[i].method + ": " + v.front();
    }
    board.check(violations == 0, "4d",
                fmt::format("state continuity and bounds on {} traces: {} "
                            "violations{}",
                            traces.size(), violations,
                            first.empty() ? "" : " (" + first + ")"));

    const double elapsed = seconds_since(start);
    board.check(elapsed < 300.0, "4",
                fmt::format("synthetic property suite ran in {:.1f} s (under "
                            "300 s)",
                            elapsed));

    board.check(audit.max_violation <= 1e-9, "5a",
                fmt::format("verify_solution on {} optimal solves plus every "
                            "enumeration LP: largest "
                            "violation {:.2e} (at most 1e-9){}",
                            audit.optimal, audit.max_violation,
                            audit.worst_violation.empty()
                                ? ""
                                : ", at " + audit.worst_violation));
    criterion_5b(board, samples);
  } catch (const std::exception& e) {
    board.fail("!", fmt::format("acceptance run aborted: {}", e.what()));
  }
  return board.failed() ? 1 : 0;
}
