#include "stes/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "simplex.hpp"

namespace stes {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::LimitReached: return "limit";
  }
  return "?";
}

SolveResult solve_lp(const MilpInstance& inst, const SolverConfig& cfg,
                     const Basis* start) {
  detail::Simplex lp(inst);
  auto res = lp.solve(cfg, start);
  res.nodes = 1;
  return res;
}

namespace {

struct Node {
  std::size_t id;
  double bound;
  // (variable, fixed value) along the path from the root.
  std::vector<std::pair<int, double>> fixings;
  Basis basis;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SolveResult solve_milp(const MilpInstance& inst, const SolverConfig& cfg,
                       const Basis* start) {
  std::vector<int> binaries;
  for (std::size_t j = 0; j < inst.variables.size(); ++j) {
    if (inst.variables[j].is_binary) binaries.push_back(static_cast<int>(j));
  }
  if (binaries.empty()) return solve_lp(inst, cfg, start);

  const auto t0 = std::chrono::steady_clock::now();
  detail::Simplex lp(inst);
  for (int j : binaries) {
    const auto uj = static_cast<std::size_t>(j);
    lp.set_bounds(uj, std::max(0.0, inst.variables[uj].lower),
                  std::min(1.0, inst.variables[uj].upper));
  }
  std::vector<std::pair<double, double>> root_bounds;
  for (int j : binaries) {
    root_bounds.emplace_back(lp.lower(static_cast<std::size_t>(j)),
                             lp.upper(static_cast<std::size_t>(j)));
  }

  auto tol_of = [](double v) { return 1e-9 * std::max(1.0, std::abs(v)); };

  std::priority_queue<Node, std::vector<Node>, WorseBound> open;
  open.push({0, -kInfinity, {}, start ? *start : Basis{}});
  std::size_t next_id = 1;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  bool have_incumbent = false;
  double incumbent_obj = kInfinity;
  std::vector<double> incumbent_x;
  Basis incumbent_basis;
  bool limited = false;
  bool unbounded = false;

  while (!open.empty()) {
    if (nodes >= cfg.node_limit || elapsed_since(t0) > cfg.time_limit_seconds) {
      limited = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (have_incumbent && node.bound >= incumbent_obj - tol_of(incumbent_obj)) {
      continue;
    }
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      lp.set_bounds(static_cast<std::size_t>(binaries[k]), root_bounds[k].first,
                    root_bounds[k].second);
    }
    for (const auto& [j, v] : node.fixings) {
      lp.set_bounds(static_cast<std::size_t>(j), v, v);
    }
    SolverConfig node_cfg = cfg;
    node_cfg.time_limit_seconds = cfg.time_limit_seconds - elapsed_since(t0);
    SolveResult res =
        lp.solve(node_cfg, node.basis.empty() ? nullptr : &node.basis);
    ++nodes;
    iterations += res.iterations;
    if (res.status == SolveStatus::LimitReached) {
      limited = true;
      open.push(std::move(node));
      break;
    }
    if (res.status == SolveStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (res.status != SolveStatus::Optimal) continue;
    if (have_incumbent &&
        res.objective >= incumbent_obj - tol_of(incumbent_obj)) {
      continue;
    }

    // Most fractional binary, ties to the lowest index.
    int branch = -1;
    double best_frac = cfg.integrality_tol;
    for (int j : binaries) {
      const double v = res.x[static_cast<std::size_t>(j)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      have_incumbent = true;
      incumbent_obj = res.objective;
      incumbent_x = res.x;
      incumbent_basis = res.basis;
      continue;
    }
    for (double value : {0.0, 1.0}) {
      Node child{next_id++, res.objective, node.fixings, res.basis};
      child.fixings.emplace_back(branch, value);
      open.push(std::move(child));
    }
  }

  SolveResult out;
  out.nodes = nodes;
  if (unbounded) {
    out.status = SolveStatus::Unbounded;
    out.iterations = iterations;
    out.wall_seconds = elapsed_since(t0);
    return out;
  }
  if (!have_incumbent) {
    out.status = limited ? SolveStatus::LimitReached : SolveStatus::Infeasible;
    out.iterations = iterations;
    out.best_bound = open.empty() ? kInfinity : open.top().bound;
    out.wall_seconds = elapsed_since(t0);
    return out;
  }

  // Re-solve with every binary fixed at its rounded incumbent value so that
  // the reported point is exactly integral and freshly factorized.
  for (int j : binaries) {
    const double v = std::round(incumbent_x[static_cast<std::size_t>(j)]);
    lp.set_bounds(static_cast<std::size_t>(j), v, v);
  }
  SolveResult clean = lp.solve(cfg, &incumbent_basis);
  iterations += clean.iterations;
  if (clean.status != SolveStatus::Optimal) {
    // Rounding moved the point off the feasible set; keep the incumbent.
    clean.status = SolveStatus::Optimal;
    clean.x = incumbent_x;
    clean.objective = incumbent_obj;
    clean.basis = incumbent_basis;
  }
  clean.nodes = nodes;
  clean.iterations = iterations;
  const double open_bound = open.empty() ? kInfinity : open.top().bound;
  clean.best_bound = std::min(clean.objective, open_bound);
  clean.gap = (clean.objective - clean.best_bound) /
              std::max(1.0, std::abs(clean.objective));
  if (limited && clean.gap > 0.0) clean.status = SolveStatus::LimitReached;
  clean.wall_seconds = elapsed_since(t0);
  return clean;
}

ViolationReport verify_solution(const MilpInstance& inst,
                                const std::vector<double>& x,
                                double tolerance) {
  ViolationReport rep;
  auto record = [&](const std::string& name, double rel) {
    if (rel > rep.max_violation) {
      rep.max_violation = rel;
      rep.worst = name;
    }
    if (rel > tolerance) rep.flagged.push_back(name);
  };
  if (x.size() != inst.variables.size()) {
    rep.max_violation = kInfinity;
    rep.worst = "solution length";
    rep.flagged.push_back("solution length");
    return rep;
  }
  for (std::size_t i = 0; i < inst.constraints.size(); ++i) {
    const Constraint& c = inst.constraints[i];
    double act = 0.0;
    double mag = 0.0;
    for (std::size_t k = 0; k < c.index.size(); ++k) {
      const double term = c.value[k] * x[static_cast<std::size_t>(c.index[k])];
      act += term;
      mag += std::abs(term);
    }
    double viol = 0.0;
    switch (c.sense) {
      case Sense::Equal: viol = std::abs(act - c.rhs); break;
      case Sense::LessEqual: viol = std::max(0.0, act - c.rhs); break;
      case Sense::GreaterEqual: viol = std::max(0.0, c.rhs - act); break;
    }
    record(c.name, viol / std::max({1.0, std::abs(c.rhs), mag}));
  }
  for (std::size_t j = 0; j < inst.variables.size(); ++j) {
    const Variable& v = inst.variables[j];
    const double xj = x[j];
    if (xj < v.lower) {
      record(v.name, (v.lower - xj) / std::max(1.0, std::abs(v.lower)));
    }
    if (xj > v.upper) {
      record(v.name, (xj - v.upper) / std::max(1.0, std::abs(v.upper)));
    }
    if (v.is_binary) {
      record(v.name + " (integrality)", std::min(std::abs(xj), std::abs(xj - 1.0)));
    }
  }
  return rep;
}

}  // namespace stes
