#pragma once

// Bounded-variable revised primal simplex.
//
// Every row i gets a logical column s_i with a_i^T x - s_i = 0 and bounds
// taken from the row sense, so the constraint matrix is [A  -I] and all
// bounds live on columns. A cold start uses a triangular crash basis. Phase 1
// minimizes the sum of bound violations of the basic variables; phase 2 the
// true costs. The basis inverse is a sparse LU factorization (KLU) followed
// by a product-form eta file, refactorized periodically.

#include <chrono>
#include <cstddef>
#include <memory>
#include <vector>

#include "stes/milp.hpp"
#include "stes/solver.hpp"

namespace stes::detail {

class BasisFactor;

class Simplex {
 public:
  explicit Simplex(const MilpInstance& inst);
  ~Simplex();
  Simplex(const Simplex&) = delete;
  Simplex& operator=(const Simplex&) = delete;

  std::size_t num_structural() const { return n_; }
  std::size_t num_rows() const { return m_; }

  void set_bounds(std::size_t j, double lower, double upper);
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }

  SolveResult solve(const SolverConfig& cfg, const Basis* start);

 private:
  enum class Step { Continue, Optimal, Infeasible, Unbounded };

  // Column access over [A -I].
  template <typename F>
  void for_column(std::size_t j, F&& f) const;

  void install_basis(const Basis* start);
  void slack_basis();
  void crash_basis();
  void set_nonbasic_value(std::size_t j);

  void refactor();
  void recompute_primal();
  // Phase-1 costs from the current basic values; returns true if any basic
  // variable is infeasible.
  bool assign_phase_costs();
  void recompute_duals();
  double primal_tol(double bound) const;
  int infeasibility_sign(std::size_t j) const;
  double sum_infeasibility() const;

  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;

  std::ptrdiff_t price() const;
  Step iterate();

  SolveResult finish(SolveStatus status);

  // Problem data.
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<std::size_t> row_start_;
  std::vector<int> row_col_;
  std::vector<double> row_val_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;

  // Solve state.
  SolverConfig cfg_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;   // basic column at each basis position
  std::vector<int> where_;  // basis position of a column, -1 if nonbasic
  std::vector<double> work_cost_;
  std::vector<double> dual_;  // y
  std::vector<double> reduced_;
  bool phase_one_ = false;
  bool bland_ = false;
  std::size_t degenerate_run_ = 0;
  std::size_t iterations_ = 0;
  std::size_t singular_repairs_ = 0;
  std::size_t infeasible_basics_ = 0;  // phase 1 only

  std::unique_ptr<BasisFactor> factor_;

  // Scratch.
  std::vector<double> column_;
  std::vector<int> column_nz_;
  std::vector<double> row_rho_;
  std::vector<double> row_alpha_;
  std::vector<int> row_touched_;
  std::vector<char> row_mark_;

  std::chrono::steady_clock::time_point started_;
};

}  // namespace stes::detail
