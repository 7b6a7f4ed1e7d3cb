#include "simplex.hpp"

#include <algorithm>
#include <cmath>

#include <klu.h>

#include "stes/error.hpp"

namespace stes::detail {
namespace {

constexpr double kPivotZero = 1e-9;   // |alpha| below this never pivots
constexpr double kPivotSmall = 1e-7;  // refactor before pivoting below this
constexpr double kEtaDrop = 1e-13;
constexpr double kDualDrop = 1e-14;
constexpr double kDegenerateStep = 1e-12;

}  // namespace

// LU factors of the basis matrix at the last refactorization plus the eta
// file of subsequent column replacements.
class BasisFactor {
 public:
  explicit BasisFactor(std::size_t m) : m_(m) {
    klu_defaults(&common_);
    common_.btf = 1;
    common_.ordering = 0;  // AMD
    common_.tol = 0.01;
  }
  ~BasisFactor() { release(); }
  BasisFactor(const BasisFactor&) = delete;
  BasisFactor& operator=(const BasisFactor&) = delete;

  // Returns false if the matrix is singular.
  bool factorize(std::vector<int>& ap, std::vector<int>& ai,
                 std::vector<double>& ax) {
    release();
    clear_etas();
    if (m_ == 0) return true;
    const int n = static_cast<int>(m_);
    symbolic_ = klu_analyze(n, ap.data(), ai.data(), &common_);
    if (symbolic_ == nullptr) return false;
    numeric_ = klu_factor(ap.data(), ai.data(), ax.data(), symbolic_, &common_);
    if (numeric_ == nullptr || common_.status == KLU_SINGULAR) {
      release();
      return false;
    }
    return true;
  }

  void ftran(double* v) const {
    if (m_ == 0) return;
    klu_solve(symbolic_, numeric_, static_cast<int>(m_), 1, v, &common_);
    for (std::size_t k = 0; k < eta_row_.size(); ++k) {
      const auto r = static_cast<std::size_t>(eta_row_[k]);
      const double xr = v[r] / eta_pivot_[k];
      if (xr != 0.0) {
        for (std::size_t p = eta_start_[k]; p < eta_start_[k + 1]; ++p) {
          v[eta_index_[p]] -= eta_value_[p] * xr;
        }
      }
      v[r] = xr;
    }
  }

  void btran(double* v) const {
    if (m_ == 0) return;
    for (std::size_t k = eta_row_.size(); k-- > 0;) {
      const auto r = static_cast<std::size_t>(eta_row_[k]);
      double s = v[r];
      for (std::size_t p = eta_start_[k]; p < eta_start_[k + 1]; ++p) {
        s -= eta_value_[p] * v[eta_index_[p]];
      }
      v[r] = s / eta_pivot_[k];
    }
    klu_tsolve(symbolic_, numeric_, static_cast<int>(m_), 1, v, &common_);
  }

  // Column `alpha` (= B^-1 a_q) enters at basis position r.
  void push(std::size_t r, const std::vector<double>& alpha,
            const std::vector<int>& nonzeros) {
    eta_row_.push_back(static_cast<int>(r));
    eta_pivot_.push_back(alpha[r]);
    for (int ii : nonzeros) {
      const auto i = static_cast<std::size_t>(ii);
      if (i != r && std::abs(alpha[i]) > kEtaDrop) {
        eta_index_.push_back(static_cast<int>(i));
        eta_value_.push_back(alpha[i]);
      }
    }
    eta_start_.push_back(eta_index_.size());
  }

  std::size_t updates() const { return eta_row_.size(); }

 private:
  void release() {
    if (numeric_ != nullptr) klu_free_numeric(&numeric_, &common_);
    if (symbolic_ != nullptr) klu_free_symbolic(&symbolic_, &common_);
  }
  void clear_etas() {
    eta_row_.clear();
    eta_pivot_.clear();
    eta_index_.clear();
    eta_value_.clear();
    eta_start_.assign(1, 0);
  }

  std::size_t m_;
  mutable klu_common common_{};
  klu_symbolic* symbolic_ = nullptr;
  klu_numeric* numeric_ = nullptr;
  std::vector<int> eta_row_;
  std::vector<double> eta_pivot_;
  std::vector<std::size_t> eta_start_{0};
  std::vector<int> eta_index_;
  std::vector<double> eta_value_;
};

Simplex::Simplex(const MilpInstance& inst)
    : n_(inst.variables.size()), m_(inst.constraints.size()) {
  const std::size_t total = n_ + m_;
  lower_.resize(total);
  upper_.resize(total);
  cost_.assign(total, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const Variable& v = inst.variables[j];
    lower_[j] = v.lower;
    upper_[j] = v.upper;
    cost_[j] = v.cost;
  }

  // Row-wise copy first (duplicates within a row are summed), then the
  // column-wise transpose.
  row_start_.assign(m_ + 1, 0);
  std::vector<double> acc(n_, 0.0);
  std::vector<int> seen(n_, -1);
  std::vector<int> order;
  for (std::size_t i = 0; i < m_; ++i) {
    const Constraint& c = inst.constraints[i];
    order.clear();
    for (std::size_t k = 0; k < c.index.size(); ++k) {
      const int j = c.index[k];
      if (j < 0 || static_cast<std::size_t>(j) >= n_) {
        throw InputError("constraint " + c.name + " references a bad column");
      }
      if (seen[static_cast<std::size_t>(j)] != static_cast<int>(i)) {
        seen[static_cast<std::size_t>(j)] = static_cast<int>(i);
        acc[static_cast<std::size_t>(j)] = 0.0;
        order.push_back(j);
      }
      acc[static_cast<std::size_t>(j)] += c.value[k];
    }
    std::sort(order.begin(), order.end());
    for (int j : order) {
      const double a = acc[static_cast<std::size_t>(j)];
      if (a != 0.0) {
        row_col_.push_back(j);
        row_val_.push_back(a);
      }
    }
    row_start_[i + 1] = row_col_.size();

    double lo = -kInfinity;
    double hi = kInfinity;
    switch (c.sense) {
      case Sense::Equal: lo = hi = c.rhs; break;
      case Sense::LessEqual: hi = c.rhs; break;
      case Sense::GreaterEqual: lo = c.rhs; break;
    }
    lower_[n_ + i] = lo;
    upper_[n_ + i] = hi;
  }

  col_start_.assign(n_ + 1, 0);
  for (int j : row_col_) ++col_start_[static_cast<std::size_t>(j) + 1];
  for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
  col_row_.resize(row_col_.size());
  col_val_.resize(row_col_.size());
  std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(row_col_[p]);
      col_row_[fill[j]] = static_cast<int>(i);
      col_val_[fill[j]] = row_val_[p];
      ++fill[j];
    }
  }

  factor_ = std::make_unique<BasisFactor>(m_);
}

Simplex::~Simplex() = default;

void Simplex::set_bounds(std::size_t j, double lower, double upper) {
  lower_[j] = lower;
  upper_[j] = upper;
}

template <typename F>
void Simplex::for_column(std::size_t j, F&& f) const {
  if (j < n_) {
    for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      f(static_cast<std::size_t>(col_row_[p]), col_val_[p]);
    }
  } else {
    f(j - n_, -1.0);
  }
}

double Simplex::primal_tol(double bound) const {
  return cfg_.feasibility_tol * std::max(1.0, std::abs(bound));
}

// -1 below the lower bound, +1 above the upper bound, 0 within tolerance.
int Simplex::infeasibility_sign(std::size_t j) const {
  const double x = x_[j];
  if (x < lower_[j] - primal_tol(lower_[j])) return -1;
  if (x > upper_[j] + primal_tol(upper_[j])) return 1;
  return 0;
}

double Simplex::sum_infeasibility() const {
  double s = 0.0;
  for (std::size_t r = 0; r < m_; ++r) {
    const auto j = static_cast<std::size_t>(head_[r]);
    if (x_[j] < lower_[j]) s += lower_[j] - x_[j];
    if (x_[j] > upper_[j]) s += x_[j] - upper_[j];
  }
  return s;
}

void Simplex::set_nonbasic_value(std::size_t j) {
  const bool has_lo = std::isfinite(lower_[j]);
  const bool has_hi = std::isfinite(upper_[j]);
  VarStatus& st = status_[j];
  if (st == VarStatus::AtUpper && !has_hi) st = VarStatus::AtLower;
  if (st == VarStatus::AtLower && !has_lo) {
    st = has_hi ? VarStatus::AtUpper : VarStatus::FreeZero;
  }
  if (st == VarStatus::FreeZero && (has_lo || has_hi)) {
    st = has_lo ? VarStatus::AtLower : VarStatus::AtUpper;
  }
  switch (st) {
    case VarStatus::AtLower: x_[j] = lower_[j]; break;
    case VarStatus::AtUpper: x_[j] = upper_[j]; break;
    case VarStatus::FreeZero: x_[j] = 0.0; break;
    case VarStatus::Basic: break;
  }
}

void Simplex::slack_basis() {
  const std::size_t total = n_ + m_;
  status_.assign(total, VarStatus::AtLower);
  head_.assign(m_, -1);
  where_.assign(total, -1);
  for (std::size_t i = 0; i < m_; ++i) {
    status_[n_ + i] = VarStatus::Basic;
    head_[i] = static_cast<int>(n_ + i);
    where_[n_ + i] = static_cast<int>(i);
  }
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] != VarStatus::Basic) set_nonbasic_value(j);
  }
}

// Triangular crash: structural columns replace the fixed logicals of
// equality rows wherever that keeps the basis triangular. Columns are tried
// free first, then one-sided, then boxed, sparser columns first within a
// class. A column qualifies only if it has no entry in an already pivoted
// row, and it pivots on its largest entry among the remaining equality rows.
void Simplex::crash_basis() {
  slack_basis();
  std::vector<char> pivoted(m_, 0);
  std::vector<char> eligible(m_, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    eligible[i] = lower_[n_ + i] == upper_[n_ + i] ? 1 : 0;
  }
  auto rank = [&](std::size_t j) {
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (!lo && !hi) return 0;
    if (lo != hi) return 1;
    return 2;
  };
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < n_; ++j) {
    if (rank(j) < 2 && col_start_[j] < col_start_[j + 1]) {
      order.push_back(j);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const int ra = rank(a);
                     const int rb = rank(b);
                     if (ra != rb) return ra < rb;
                     return col_start_[a + 1] - col_start_[a] <
                            col_start_[b + 1] - col_start_[b];
                   });
  for (std::size_t j : order) {
    double col_max = 0.0;
    double best = 0.0;
    std::ptrdiff_t row = -1;
    bool blocked = false;
    for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const auto i = static_cast<std::size_t>(col_row_[p]);
      const double a = std::abs(col_val_[p]);
      col_max = std::max(col_max, a);
      if (pivoted[i]) {
        blocked = true;
        break;
      }
      if (eligible[i] && a > best) {
        best = a;
        row = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (blocked || row < 0 || best < 0.1 * col_max) continue;
    const auto r = static_cast<std::size_t>(row);
    pivoted[r] = 1;
    const std::size_t logical = n_ + r;
    status_[logical] = VarStatus::AtLower;
    set_nonbasic_value(logical);
    where_[logical] = -1;
    status_[j] = VarStatus::Basic;
    head_[r] = static_cast<int>(j);
    where_[j] = static_cast<int>(r);
  }
}

void Simplex::install_basis(const Basis* start) {
  const std::size_t total = n_ + m_;
  x_.assign(total, 0.0);
  if (start == nullptr) {
    crash_basis();
    return;
  }
  if (start->structural.size() != n_ || start->logical.size() != m_) {
    slack_basis();
    return;
  }
  status_.resize(total);
  std::copy(start->structural.begin(), start->structural.end(),
            status_.begin());
  std::copy(start->logical.begin(), start->logical.end(),
            status_.begin() + static_cast<std::ptrdiff_t>(n_));
  head_.clear();
  where_.assign(total, -1);
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] == VarStatus::Basic) {
      where_[j] = static_cast<int>(head_.size());
      head_.push_back(static_cast<int>(j));
    }
  }
  if (head_.size() != m_) {
    slack_basis();
    return;
  }
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] != VarStatus::Basic) set_nonbasic_value(j);
  }
}

void Simplex::refactor() {
  std::vector<int> ap(m_ + 1, 0);
  std::vector<int> ai;
  std::vector<double> ax;
  for (std::size_t r = 0; r < m_; ++r) {
    for_column(static_cast<std::size_t>(head_[r]),
               [&](std::size_t i, double a) {
                 ai.push_back(static_cast<int>(i));
                 ax.push_back(a);
               });
    ap[r + 1] = static_cast<int>(ai.size());
  }
  if (factor_->factorize(ap, ai, ax)) return;

  // Singular: fall back to the all-logical basis, which always factorizes.
  // Nonbasic values are kept where they sit on a bound.
  if (++singular_repairs_ > 8) {
    throw SolverError("basis matrix repeatedly singular");
  }
  std::vector<VarStatus> keep = status_;
  slack_basis();
  for (std::size_t j = 0; j < n_; ++j) {
    if (keep[j] != VarStatus::Basic) {
      status_[j] = keep[j];
      set_nonbasic_value(j);
    }
  }
  bland_ = true;
  refactor();
}

void Simplex::recompute_primal() {
  std::vector<double>& rhs = column_;
  rhs.assign(m_, 0.0);
  const std::size_t total = n_ + m_;
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] == VarStatus::Basic || x_[j] == 0.0) continue;
    const double xj = x_[j];
    for_column(j, [&](std::size_t i, double a) { rhs[i] -= a * xj; });
  }
  factor_->ftran(rhs.data());
  for (std::size_t r = 0; r < m_; ++r) {
    x_[static_cast<std::size_t>(head_[r])] = rhs[r];
  }
}

bool Simplex::assign_phase_costs() {
  bool infeasible = false;
  for (std::size_t r = 0; r < m_; ++r) {
    if (infeasibility_sign(static_cast<std::size_t>(head_[r])) != 0) {
      infeasible = true;
      break;
    }
  }
  phase_one_ = infeasible;
  const std::size_t total = n_ + m_;
  if (!phase_one_) {
    work_cost_ = cost_;
    return false;
  }
  work_cost_.assign(total, 0.0);
  infeasible_basics_ = 0;
  for (std::size_t r = 0; r < m_; ++r) {
    const auto j = static_cast<std::size_t>(head_[r]);
    const int sign = infeasibility_sign(j);
    work_cost_[j] = static_cast<double>(sign);
    if (sign != 0) ++infeasible_basics_;
  }
  return true;
}

void Simplex::recompute_duals() {
  dual_.assign(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    dual_[r] = work_cost_[static_cast<std::size_t>(head_[r])];
  }
  factor_->btran(dual_.data());
  const std::size_t total = n_ + m_;
  reduced_.assign(total, 0.0);
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] == VarStatus::Basic) continue;
    double d = work_cost_[j];
    for_column(j, [&](std::size_t i, double a) { d -= dual_[i] * a; });
    reduced_[j] = d;
  }
}

void Simplex::ftran(std::vector<double>& v) const { factor_->ftran(v.data()); }
void Simplex::btran(std::vector<double>& v) const { factor_->btran(v.data()); }

std::ptrdiff_t Simplex::price() const {
  const double tol = cfg_.optimality_tol;
  std::ptrdiff_t best = -1;
  double best_score = 0.0;
  const std::size_t total = n_ + m_;
  for (std::size_t j = 0; j < total; ++j) {
    const double d = reduced_[j];
    bool eligible = false;
    switch (status_[j]) {
      case VarStatus::Basic: continue;
      case VarStatus::AtLower:
        eligible = d < -tol && upper_[j] > lower_[j];
        break;
      case VarStatus::AtUpper:
        eligible = d > tol && upper_[j] > lower_[j];
        break;
      case VarStatus::FreeZero: eligible = std::abs(d) > tol; break;
    }
    if (!eligible) continue;
    if (bland_) return static_cast<std::ptrdiff_t>(j);
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = static_cast<std::ptrdiff_t>(j);
    }
  }
  return best;
}

Simplex::Step Simplex::iterate() {
  const std::ptrdiff_t entering = price();
  if (entering < 0) return phase_one_ ? Step::Infeasible : Step::Optimal;
  const auto q = static_cast<std::size_t>(entering);
  const double dq = reduced_[q];
  const double dir = dq < 0.0 ? 1.0 : -1.0;

  std::vector<double>& alpha = column_;
  alpha.assign(m_, 0.0);
  for_column(q, [&](std::size_t i, double a) { alpha[i] = a; });
  ftran(alpha);
  std::vector<int>& nz = column_nz_;
  nz.clear();
  for (std::size_t i = 0; i < m_; ++i) {
    if (alpha[i] != 0.0) nz.push_back(static_cast<int>(i));
  }

  // Blocking bound of basic position r when the entering column moves by
  // theta >= 0. Returns false if the position does not block.
  struct Block {
    double bound;
    double rate;
  };
  auto blocking = [&](std::size_t r, Block& b) {
    const double a = alpha[r];
    if (std::abs(a) < kPivotZero) return false;
    const auto j = static_cast<std::size_t>(head_[r]);
    const double rate = -dir * a;
    const double x = x_[j];
    const double lo = lower_[j];
    const double hi = upper_[j];
    if (rate < 0.0) {
      if (phase_one_ && x > hi + primal_tol(hi)) {
        b = {hi, rate};
        return true;
      }
      if (x < lo - primal_tol(lo) || !std::isfinite(lo)) return false;
      b = {lo, rate};
      return true;
    }
    if (phase_one_ && x < lo - primal_tol(lo)) {
      b = {lo, rate};
      return true;
    }
    if (x > hi + primal_tol(hi) || !std::isfinite(hi)) return false;
    b = {hi, rate};
    return true;
  };

  const double range = upper_[q] - lower_[q];
  std::ptrdiff_t leave = -1;
  double theta = 0.0;
  Block chosen{};
  if (bland_) {
    // Textbook ratio test, ties to the lowest column index.
    double best = kInfinity;
    for (int rr : nz) {
      const auto r = static_cast<std::size_t>(rr);
      Block b{};
      if (!blocking(r, b)) continue;
      const double ratio =
          std::max(0.0, (x_[static_cast<std::size_t>(head_[r])] - b.bound) /
                            (-b.rate));
      const bool tie = leave >= 0 && std::abs(ratio - best) <=
                                         1e-12 * std::max(1.0, best);
      if ((ratio < best && !tie) ||
          (tie && head_[r] < head_[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = static_cast<std::ptrdiff_t>(r);
        chosen = b;
      }
    }
    theta = best;
  } else {
    // Harris two-pass: bound the step with tolerance-relaxed bounds, then
    // take the largest pivot among positions that block within that step.
    double relaxed_max = kInfinity;
    for (int rr : nz) {
      const auto r = static_cast<std::size_t>(rr);
      Block b{};
      if (!blocking(r, b)) continue;
      const double x = x_[static_cast<std::size_t>(head_[r])];
      const double relaxed =
          (std::abs(x - b.bound) + primal_tol(b.bound)) / std::abs(b.rate);
      relaxed_max = std::min(relaxed_max, relaxed);
    }
    double best_pivot = 0.0;
    for (int rr : nz) {
      const auto r = static_cast<std::size_t>(rr);
      Block b{};
      if (!blocking(r, b)) continue;
      const double x = x_[static_cast<std::size_t>(head_[r])];
      const double exact = (x - b.bound) / (-b.rate);
      if (exact > relaxed_max) continue;
      if (std::abs(alpha[r]) > best_pivot) {
        best_pivot = std::abs(alpha[r]);
        leave = static_cast<std::ptrdiff_t>(r);
        chosen = b;
        theta = std::max(0.0, exact);
      }
    }
  }

  const bool flip = std::isfinite(range) && (leave < 0 || range <= theta);
  if (!flip && leave < 0) {
    if (phase_one_) throw SolverError("phase-1 ratio test found no bound");
    return Step::Unbounded;
  }

  if (!flip && factor_->updates() > 0 &&
      std::abs(alpha[static_cast<std::size_t>(leave)]) < kPivotSmall) {
    // Small pivot on stale factors: refresh and price again.
    refactor();
    recompute_primal();
    assign_phase_costs();
    recompute_duals();
    return Step::Continue;
  }

  const double step = flip ? range : theta;
  if (step > kDegenerateStep) {
    degenerate_run_ = 0;
    bland_ = false;
  } else if (++degenerate_run_ >= cfg_.degeneracy_streak) {
    bland_ = true;
  }

  if (step != 0.0) {
    for (int rr : nz) {
      const auto r = static_cast<std::size_t>(rr);
      x_[static_cast<std::size_t>(head_[r])] -= dir * alpha[r] * step;
    }
  }

  if (flip) {
    status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
    x_[q] = dir > 0 ? upper_[q] : lower_[q];
  } else {
    const auto r = static_cast<std::size_t>(leave);
    const auto out = static_cast<std::size_t>(head_[r]);
    x_[q] += dir * step;

    // Pivot row r of B^-1 [A -I] for the reduced-cost update.
    std::vector<double>& rho = row_rho_;
    rho.assign(m_, 0.0);
    rho[r] = 1.0;
    btran(rho);
    row_alpha_.resize(n_, 0.0);
    row_mark_.resize(n_, 0);
    row_touched_.clear();
    const double theta_d = dq / alpha[r];
    for (std::size_t i = 0; i < m_; ++i) {
      const double ri = rho[i];
      if (std::abs(ri) < kDualDrop) continue;
      for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
        const auto j = static_cast<std::size_t>(row_col_[p]);
        if (!row_mark_[j]) {
          row_mark_[j] = 1;
          row_touched_.push_back(static_cast<int>(j));
        }
        row_alpha_[j] += ri * row_val_[p];
      }
      const std::size_t logical = n_ + i;
      if (status_[logical] != VarStatus::Basic) {
        reduced_[logical] += theta_d * ri;  // alpha_rj = -rho_i
      }
    }
    for (int jj : row_touched_) {
      const auto j = static_cast<std::size_t>(jj);
      if (status_[j] != VarStatus::Basic) reduced_[j] -= theta_d * row_alpha_[j];
      row_alpha_[j] = 0.0;
      row_mark_[j] = 0;
    }

    const double leaving_cost_new = phase_one_ ? 0.0 : cost_[out];
    if (phase_one_ && work_cost_[out] != 0.0) --infeasible_basics_;
    reduced_[q] = 0.0;
    reduced_[out] = leaving_cost_new - work_cost_[out] - theta_d;
    work_cost_[out] = leaving_cost_new;

    x_[out] = chosen.bound;
    status_[out] = chosen.bound == lower_[out] ? VarStatus::AtLower
                                                : VarStatus::AtUpper;
    factor_->push(r, alpha, nz);
    status_[q] = VarStatus::Basic;
    head_[r] = static_cast<int>(q);
    where_[q] = static_cast<int>(r);
    where_[out] = -1;
  }

  // Basic feasibility may have changed; phase-1 costs follow it.
  bool refresh = false;
  // Only basic values at the nonzeros of alpha moved.
  if (phase_one_) {
    refresh = infeasible_basics_ == 0;
    for (std::size_t k = 0; k < nz.size() && !refresh; ++k) {
      const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(nz[k])]);
      refresh = static_cast<double>(infeasibility_sign(j)) != work_cost_[j];
    }
  } else {
    for (std::size_t k = 0; k < nz.size() && !refresh; ++k) {
      const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(nz[k])]);
      refresh = infeasibility_sign(j) != 0;
    }
  }
  if (refresh) {
    assign_phase_costs();
    recompute_duals();
  }
  ++iterations_;
  return Step::Continue;
}

SolveResult Simplex::solve(const SolverConfig& cfg, const Basis* start) {
  cfg_ = cfg;
  started_ = std::chrono::steady_clock::now();
  iterations_ = 0;
  degenerate_run_ = 0;
  bland_ = false;
  singular_repairs_ = 0;

  install_basis(start);
  // A warm-start basis that turns out singular is replaced by the
  // all-logical basis inside refactor().
  refactor();
  recompute_primal();
  assign_phase_costs();
  recompute_duals();
  bool fresh = true;

  for (;;) {
    if (iterations_ >= cfg_.iteration_limit) {
      return finish(SolveStatus::LimitReached);
    }
    if ((iterations_ & 63) == 0) {
      const double elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - started_)
                                 .count();
      if (elapsed > cfg_.time_limit_seconds) {
        return finish(SolveStatus::LimitReached);
      }
    }
    if (factor_->updates() >= cfg_.refactor_interval) {
      refactor();
      recompute_primal();
      assign_phase_costs();
      recompute_duals();
      fresh = true;
    }
    const std::size_t before = iterations_;
    const Step step = iterate();
    switch (step) {
      case Step::Continue:
        if (iterations_ != before) fresh = false;
        break;
      case Step::Optimal:
      case Step::Infeasible:
        if (!fresh) {
          // Confirm on fresh factors before concluding.
          refactor();
          recompute_primal();
          assign_phase_costs();
          recompute_duals();
          fresh = true;
          break;
        }
        return finish(step == Step::Optimal ? SolveStatus::Optimal
                                            : SolveStatus::Infeasible);
      case Step::Unbounded:
        return finish(SolveStatus::Unbounded);
    }
  }
}

SolveResult Simplex::finish(SolveStatus status) {
  SolveResult res;
  res.status = status;
  res.iterations = iterations_;
  res.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  double f = 0.0;
  for (std::size_t j = 0; j < n_; ++j) f += cost_[j] * x_[j];
  res.objective = f;
  res.best_bound = f;
  res.basis.structural.assign(status_.begin(),
                              status_.begin() + static_cast<std::ptrdiff_t>(n_));
  res.basis.logical.assign(status_.begin() + static_cast<std::ptrdiff_t>(n_),
                           status_.end());
  if (status == SolveStatus::Infeasible) {
    res.infeasibility = sum_infeasibility();
  }
  if (status == SolveStatus::Optimal) {
    res.dual.row_duals = dual_;
    res.dual.reduced_costs.assign(
        reduced_.begin(), reduced_.begin() + static_cast<std::ptrdiff_t>(n_));
    double dual_obj = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (status_[j] != VarStatus::Basic) dual_obj += reduced_[j] * x_[j];
    }
    res.dual.objective = dual_obj;
  }
  res.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started_)
                         .count();
  return res;
}

}  // namespace stes::detail
