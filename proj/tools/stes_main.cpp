// Command-line driver: data generation, benchmark and rolling-horizon runs,
// minimum prediction horizon search, target derivation and reporting.
//
// Exit codes: 0 success, 1 internal error, 2 infeasible model, 3 input
// error, 4 solver limit reached.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "stes/data.hpp"
#include "stes/error.hpp"
#include "stes/horizon.hpp"
#include "stes/lp_format.hpp"
#include "stes/report.hpp"
#include "stes/synthetic.hpp"
#include "stes/trace_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace stes;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInfeasible = 2,
  kInputError = 3,
  kLimit = 4,
};

struct Common {
  std::string config;
  std::string log_level = "info";
  std::string dump_lp;
  double time_limit = 0.0;
  std::optional<double> fee;
  std::optional<double> sh_init;
  std::optional<double> sh_end;
  std::optional<std::size_t> year_steps;
};

struct Loaded {
  CaseConfig cfg;
  SeriesBundle all;   // every ingested hour
  SeriesBundle year;  // the simulated year
};

Loaded load(const Common& c) {
  if (c.config.empty()) throw InputError("--config is required");
  Loaded l;
  l.cfg = load_config(c.config);
  if (c.fee) l.cfg.transport_fee = *c.fee;
  if (c.sh_init) l.cfg.heat_storage.e_init = *c.sh_init;
  if (c.sh_end) l.cfg.heat_storage.e_end = *c.sh_end;
  if (c.year_steps) l.cfg.year_steps = *c.year_steps;
  const auto problems = l.cfg.validate();
  if (!problems.empty()) {
    throw InputError(fmt::format("config: {}: {}", problems.front().subject,
                                 problems.front().rule));
  }
  l.all = ingest(l.cfg);
  l.year = l.cfg.year_steps == 0 ? l.all : l.all.slice(0, l.cfg.year_steps);
  return l;
}

HorizonOptions options(const Common& c, const CaseConfig& cfg) {
  HorizonOptions o;
  o.dt_hours = cfg.dt_hours;
  if (c.time_limit > 0.0) o.solver.time_limit_seconds = c.time_limit;
  if (!c.dump_lp.empty()) {
    fs::create_directories(c.dump_lp);
    const fs::path dir = c.dump_lp;
    o.on_window = [dir](const MilpInstance& inst, const WindowRecord& rec) {
      const fs::path p = dir / fmt::format("window_{:04}_day_{:03}.lp",
                                           rec.index, rec.day);
      std::ofstream out(p);
      if (!out) throw InputError(fmt::format("cannot write {}", p.string()));
      write_lp(out, inst);
    };
  }
  return o;
}

void print_summary(const SimulationTrace& tr) {
  fmt::print("{}: {} days, cost {:.2f} EUR, {} windows, {:.1f} s\n",
             tr.method, tr.horizon_days, tr.total_cost, tr.windows.size(),
             tr.runtime_s);
}

int run(int argc, char** argv) {
  CLI::App app{"Storage dispatch with full and rolling horizons"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&c](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", c.config, "case configuration (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--log-level", c.log_level, "trace, debug, info, warn, error")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    sub->add_option("--dump-lp", c.dump_lp, "write every window model as an LP file into DIR");
    sub->add_option("--time-limit", c.time_limit, "seconds per solve (0: none)");
    sub->add_option("--fee", c.fee, "override the transport fee, EUR/kWh");
    sub->add_option("--sh-init", c.sh_init, "override the initial heat storage level, kWh");
    sub->add_option("--sh-end", c.sh_end, "override the final heat storage level, kWh");
    sub->add_option("--year-steps", c.year_steps, "override the simulated year length in steps");
  };

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic case (CSVs and config.json)");
  SyntheticSpec spec;
  std::string synth_dir;
  synth->add_option("-o,--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--days", spec.days, "number of days")->capture_default_str();
  synth->add_option("--year", spec.year, "calendar year of the data")->capture_default_str();
  synth->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  synth->add_option("--amplitude", spec.amplitude, "variation scale, 0 gives constant series")
      ->capture_default_str();
  synth->add_option("--dip-probability", spec.dip_probability,
                    "daily probability of a negative midday price dip")
      ->capture_default_str();
  synth->add_option("--log-level", c.log_level, "log level");

  // full-horizon
  auto* full = app.add_subcommand("full-horizon", "optimize the whole year at once");
  add_common(full, true);
  std::string full_out;
  full->add_option("-o,--out", full_out, "trace CSV to write")->required();

  // rolling
  auto* rolling = app.add_subcommand("rolling", "rolling-horizon simulation");
  add_common(rolling, true);
  std::string rolling_out;
  std::string policy_name = "hybrid";
  std::string targets_path;
  std::string prior_trace;
  std::size_t pred_days = 6;
  std::size_t control_days = 1;
  std::optional<double> soft_penalty;
  rolling->add_option("-o,--out", rolling_out, "trace CSV to write")->required();
  rolling->add_option("--days", pred_days, "prediction horizon in days")->capture_default_str();
  rolling->add_option("--control-days", control_days, "days implemented per window")
      ->capture_default_str();
  rolling->add_option("--policy", policy_name, "hybrid, fixed-level or free")
      ->check(CLI::IsMember({"hybrid", "fixed-level", "free"}))
      ->capture_default_str();
  rolling->add_option("--targets", targets_path, "heat storage targets CSV (hybrid)");
  rolling->add_option("--prior-trace", prior_trace,
                      "derive hybrid targets from this year-long benchmark trace");
  rolling->add_option("--soft-penalty", soft_penalty,
                      "soft heat storage target with this penalty, EUR/kWh");

  // min-horizon
  auto* minh = app.add_subcommand("min-horizon", "minimum prediction horizon per day");
  add_common(minh, true);
  std::string bench_path;
  std::string minh_out;
  std::size_t first_day = 0;
  std::optional<std::size_t> last_day;
  std::size_t max_days = 60;
  std::size_t threads = 1;
  minh->add_option("--benchmark", bench_path, "full-horizon trace giving each day's start levels")
      ->required()
      ->check(CLI::ExistingFile);
  minh->add_option("-o,--out", minh_out, "results CSV to write")->required();
  minh->add_option("--first-day", first_day, "first day (0-based)")->capture_default_str();
  minh->add_option("--last-day", last_day, "one past the last day (default: all days of the trace)");
  minh->add_option("--max-days", max_days, "largest horizon tried")->capture_default_str();
  minh->add_option("--threads", threads, "worker threads")->capture_default_str();

  // derive-targets
  auto* derive = app.add_subcommand("derive-targets", "heat storage targets from a benchmark trace");
  std::string derive_in;
  std::string derive_out;
  std::size_t period = kHoursPerYear;
  derive->add_option("--trace", derive_in, "year-long benchmark trace")
      ->required()
      ->check(CLI::ExistingFile);
  derive->add_option("-o,--out", derive_out, "targets CSV to write")->required();
  derive->add_option("--period", period, "steps per year")->capture_default_str();
  derive->add_option("--log-level", c.log_level, "log level");

  // report
  auto* report = app.add_subcommand("report", "results table and heat storage plots");
  std::vector<std::string> report_traces;
  std::string report_bench;
  std::string report_dir;
  report->add_option("--trace", report_traces, "trace CSV (repeatable)");
  report->add_option("--benchmark", report_bench, "benchmark trace for the gaps")
      ->check(CLI::ExistingFile);
  report->add_option("-o,--out-dir", report_dir, "output directory")->required();
  report->add_option("--log-level", c.log_level, "log level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  spdlog::set_level(spdlog::level::from_str(c.log_level));

  if (*synth) {
    const fs::path cfg = write_synthetic(spec, synth_dir);
    fmt::print("wrote {}\n", cfg.string());
    return kOk;
  }
  if (*full) {
    const Loaded l = load(c);
    const auto tr = solve_full_horizon(l.cfg.network(), l.year,
                                       l.cfg.year_boundary(), options(c, l.cfg));
    write_trace(fs::path(full_out), tr);
    print_summary(tr);
    return kOk;
  }
  if (*rolling) {
    const Loaded l = load(c);
    RollingPolicy policy;
    if (policy_name == "hybrid") {
      TargetSeries targets;
      if (!targets_path.empty()) {
        targets = read_targets(fs::path(targets_path));
      } else if (!prior_trace.empty()) {
        targets = derive_targets(read_trace(fs::path(prior_trace)));
      } else {
        throw InputError("the hybrid policy needs --targets or --prior-trace");
      }
      const auto bad = targets.validate(l.cfg.heat_storage);
      if (!bad.empty()) {
        throw InputError(fmt::format("{}: {}", bad.front().subject, bad.front().rule));
      }
      policy = RollingPolicy::hybrid(pred_days, std::move(targets));
      policy.soft_penalty = soft_penalty;
    } else if (policy_name == "fixed-level") {
      policy = RollingPolicy::fixed_level(pred_days);
    } else {
      policy.prediction_days = pred_days;
    }
    policy.control_days = control_days;
    const auto tr = run_rolling(l.cfg.network(), l.year, policy,
                                l.cfg.year_boundary(), options(c, l.cfg));
    write_trace(fs::path(rolling_out), tr);
    print_summary(tr);
    return kOk;
  }
  if (*minh) {
    const Loaded l = load(c);
    const auto bench = read_trace(fs::path(bench_path));
    const std::size_t spd = static_cast<std::size_t>(24.0 / l.cfg.dt_hours + 0.5);
    const std::size_t last = last_day.value_or(bench.steps() / spd);
    const auto results = min_prediction_horizon_sweep(
        l.cfg.network(), l.all, bench, first_day, last, max_days,
        options(c, l.cfg), threads);
    std::ofstream out(minh_out);
    if (!out) throw InputError(fmt::format("cannot write {}", minh_out));
    out << "day,min_horizon_days,reached,recheck_failed,skipped\n";
    std::size_t worst = 0;
    for (const auto& r : results) {
      std::string skipped;
      for (std::size_t k = 0; k < r.skipped.size(); ++k) {
        skipped += (k ? " " : "") + std::to_string(r.skipped[k]);
      }
      out << fmt::format("{},{},{},{},{}\n", r.day, r.days, r.reached ? 1 : 0,
                         r.recheck_failed ? 1 : 0, skipped);
      worst = std::max(worst, r.days);
    }
    fmt::print("maximum minimum prediction horizon: {} days over {} days\n",
               worst, results.size());
    return kOk;
  }
  if (*derive) {
    const auto targets = derive_targets(read_trace(fs::path(derive_in)), period);
    write_targets(fs::path(derive_out), targets);
    fmt::print("wrote {} targets\n", targets.level.size());
    return kOk;
  }
  if (*report) {
    std::vector<SimulationTrace> traces;
    for (const auto& p : report_traces) traces.push_back(read_trace(fs::path(p)));
    std::optional<SimulationTrace> bench;
    if (!report_bench.empty()) bench = read_trace(fs::path(report_bench));
    const auto files = emit_report(traces, bench ? &*bench : nullptr, report_dir);
    std::cout << format_table_text(report_rows(traces, bench ? &*bench : nullptr));
    fmt::print("wrote {}, {}, {}, {}\n", files.table_csv.string(),
               files.table_text.string(), files.plot_svg.string(),
               files.plot_points.string());
    return kOk;
  }
  return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("stes"));
  try {
    return run(argc, argv);
  } catch (const InfeasibleError& e) {
    spdlog::error("{}", e.what());
    return kInfeasible;
  } catch (const LimitError& e) {
    spdlog::error("{}", e.what());
    return kLimit;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const UndefinedGapError& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
}
