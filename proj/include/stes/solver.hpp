#pragma once

// Exact solution of MilpInstance: a bounded-variable primal simplex for the
// continuous relaxation and best-bound branch-and-bound over the binaries.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stes/milp.hpp"

namespace stes {

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

const char* to_string(SolveStatus status);

struct SolverConfig {
  // Primal feasibility, relative to max(1, |bound|).
  double feasibility_tol = 1e-9;
  // Reduced-cost optimality threshold.
  double optimality_tol = 1e-9;
  double integrality_tol = 1e-6;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degeneracy_streak = 200;
  // Basis updates between refactorizations.
  std::size_t refactor_interval = 100;
  std::size_t iteration_limit = std::numeric_limits<std::size_t>::max();
  std::size_t node_limit = 100000;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
};

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

// Status of every structural column and every row's logical column. Used to
// start a solve from a previous optimum (branch-and-bound children, the
// polish stages).
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> logical;

  bool empty() const { return structural.empty() && logical.empty(); }
};

// At an optimal basis: row duals y, reduced costs d = c - A^T y of the
// structural columns, and the dual objective value.
struct DualCertificate {
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  double wall_seconds = 0.0;
  // Branch-and-bound: best proven lower bound and relative gap to the
  // incumbent. Equal to the objective for LPs solved to optimality.
  double best_bound = 0.0;
  double gap = 0.0;
  // Phase-1 sum of infeasibilities when the status is Infeasible.
  double infeasibility = 0.0;
  DualCertificate dual;
  Basis basis;
};

// Continuous relaxation (binaries treated as [0, 1] variables).
SolveResult solve_lp(const MilpInstance& inst, const SolverConfig& cfg = {},
                     const Basis* start = nullptr);

// Mixed-binary optimum by best-bound branch-and-bound, branching on the most
// fractional binary (ties to the lowest index). Instances without binaries
// are passed straight to solve_lp.
SolveResult solve_milp(const MilpInstance& inst, const SolverConfig& cfg = {},
                       const Basis* start = nullptr);

struct ViolationReport {
  double max_violation = 0.0;  // relative
  std::string worst;           // row or variable name
  // Every row, bound or binary whose relative violation exceeds the
  // tolerance passed to verify_solution().
  std::vector<std::string> flagged;

  bool ok() const { return flagged.empty(); }
};

// Independent re-check of every row, bound and binary. Row violations are
// relative to max(1, |rhs|, sum |a_ij x_j|); bound violations to
// max(1, |bound|); binaries report the distance to the nearest of {0, 1}.
ViolationReport verify_solution(const MilpInstance& inst,
                                const std::vector<double>& x,
                                double tolerance = 1e-9);

}  // namespace stes
