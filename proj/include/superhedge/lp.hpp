#pragma once

// Dense bounded-variable simplex with certificates.
//
// Every row i of a LinearProgram is brought into the form a_i.x + s_i = b_i
// with one logical variable s_i whose bounds encode the relation
// (<=: s >= 0, >=: s <= 0, =: s = 0). Structural columns keep their own
// bounds, so free variables are never split. Phase 1 minimizes the sum of
// artificial variables attached to rows whose logical starts out of bounds.

#include "superhedge/errors.hpp"
#include "superhedge/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace superhedge::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

inline const char *to_string(Status s) {
  switch (s) {
  case Status::Optimal:
    return "Optimal";
  case Status::Infeasible:
    return "Infeasible";
  case Status::Unbounded:
    return "Unbounded";
  }
  return "?";
}

struct Term {
  int column;
  double coefficient;
};

struct Row {
  std::vector<Term> terms;
  Relation relation;
  double rhs;
  std::string name;
};

struct Column {
  double lower;
  double upper;
  double cost;
  std::string name;
};

class LinearProgram {
public:
  explicit LinearProgram(Sense sense = Sense::Minimize) : sense_(sense) {}

  int add_column(double lower, double upper, double cost = 0.0,
                 std::string name = {}) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper ||
        !std::isfinite(cost))
      throw InvalidModel("bad column bounds or cost for '" + name + "'");
    columns_.push_back({lower, upper, cost, std::move(name)});
    return static_cast<int>(columns_.size()) - 1;
  }

  int add_free_column(double cost = 0.0, std::string name = {}) {
    return add_column(-kInf, kInf, cost, std::move(name));
  }

  int add_row(std::vector<Term> terms, Relation relation, double rhs,
              std::string name = {}) {
    if (!std::isfinite(rhs))
      throw InvalidModel("non-finite right-hand side in row '" + name + "'");
    for (const auto &t : terms) {
      if (t.column < 0 || t.column >= num_columns())
        throw InvalidModel("row '" + name + "' references unknown column");
      if (!std::isfinite(t.coefficient))
        throw InvalidModel("non-finite coefficient in row '" + name + "'");
    }
    // Merge repeated columns, keeping first-appearance order.
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto &t : terms) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Term &m) { return m.column == t.column; });
      if (it == merged.end())
        merged.push_back(t);
      else
        it->coefficient += t.coefficient;
    }
    rows_.push_back({std::move(merged), relation, rhs, std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_cost(int column, double cost) { columns_.at(column).cost = cost; }
  void set_sense(Sense s) { sense_ = s; }

  Sense sense() const { return sense_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Column &column(int j) const { return columns_[j]; }
  const Row &row(int i) const { return rows_[i]; }
  const std::vector<Column> &columns() const { return columns_; }
  const std::vector<Row> &rows() const { return rows_; }

  double row_activity(int i, const std::vector<double> &x) const {
    double s = 0.0;
    for (const auto &t : rows_[i].terms)
      s += t.coefficient * x[t.column];
    return s;
  }

  double objective_value(const std::vector<double> &x) const {
    double s = 0.0;
    for (int j = 0; j < num_columns(); ++j)
      s += columns_[j].cost * x[j];
    return s;
  }

private:
  Sense sense_;
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

/// Result of a solve.
///
/// `duals[i]` is the shadow price d(value)/d(rhs_i) in the sense of the
/// problem, `reduced_costs[j]` the matching bound multiplier. For
/// Infeasible, `farkas` holds row multipliers y (y_i <= 0 on <= rows,
/// y_i >= 0 on >= rows) with sup over the bound box of (A^T y).x < y.b.
/// For Unbounded, `ray` is a recession direction improving the objective
/// and `primal` a feasible point.
struct LpSolution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::vector<double> ray;
  std::vector<double> farkas;
  int iterations = 0;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double gap = 0.0;
  double dual_objective = 0.0;
  double certificate = 0.0; // Farkas gap or ray improvement (positive = ok)
};

namespace detail {

inline double bound_value_min_form(double w, double lower, double upper) {
  // sup over [lower, upper] of w * x
  if (w > 0.0)
    return w * upper;
  if (w < 0.0)
    return w * lower;
  return 0.0;
}

} // namespace detail

/// Recomputes optimality residuals of an Optimal solution against the
/// original data (min-form signs are handled internally).
inline Residuals optimality_residuals(const LinearProgram &lp,
                                      const LpSolution &sol) {
  Residuals r;
  const double sgn = lp.sense() == Sense::Maximize ? -1.0 : 1.0;
  const int n = lp.num_columns();
  const int m = lp.num_rows();
  // Primal.
  for (int j = 0; j < n; ++j) {
    const auto &c = lp.column(j);
    r.primal = std::max(r.primal, c.lower - sol.primal[j]);
    r.primal = std::max(r.primal, sol.primal[j] - c.upper);
  }
  std::vector<double> slack(m);
  for (int i = 0; i < m; ++i) {
    const auto &row = lp.row(i);
    const double act = lp.row_activity(i, sol.primal);
    slack[i] = row.rhs - act;
    switch (row.relation) {
    case Relation::LessEqual:
      r.primal = std::max(r.primal, -slack[i]);
      break;
    case Relation::GreaterEqual:
      r.primal = std::max(r.primal, slack[i]);
      break;
    case Relation::Equal:
      r.primal = std::max(r.primal, std::abs(slack[i]));
      break;
    }
  }
  // Dual in min form: y = sgn * duals, d = c_min - A^T y.
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j)
    d[j] = sgn * lp.column(j).cost;
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto &row = lp.row(i);
    const double y = sgn * sol.duals[i];
    if (row.relation == Relation::LessEqual)
      r.dual = std::max(r.dual, y);
    if (row.relation == Relation::GreaterEqual)
      r.dual = std::max(r.dual, -y);
    for (const auto &t : row.terms)
      d[t.column] -= y * t.coefficient;
    dual_obj += y * row.rhs;
    r.complementarity =
        std::max(r.complementarity, std::abs(y) * std::abs(slack[i]));
  }
  for (int j = 0; j < n; ++j) {
    const auto &c = lp.column(j);
    if (d[j] > 0.0) {
      if (std::isinf(c.lower)) {
        r.dual = std::max(r.dual, d[j]);
      } else {
        dual_obj += d[j] * c.lower;
        r.complementarity =
            std::max(r.complementarity, d[j] * (sol.primal[j] - c.lower));
      }
    } else if (d[j] < 0.0) {
      if (std::isinf(c.upper)) {
        r.dual = std::max(r.dual, -d[j]);
      } else {
        dual_obj += d[j] * c.upper;
        r.complementarity =
            std::max(r.complementarity, -d[j] * (c.upper - sol.primal[j]));
      }
    }
  }
  r.dual_objective = sgn * dual_obj;
  r.gap = std::abs(sol.objective - r.dual_objective);
  return r;
}

/// Positive return value = amount by which y.b exceeds the supremum of
/// y^T(Ax) over the bound box; <= 0 means the certificate is invalid.
inline double farkas_margin(const LinearProgram &lp,
                            const std::vector<double> &y) {
  const int n = lp.num_columns();
  std::vector<double> w(n, 0.0);
  double yb = 0.0, ymax = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto &row = lp.row(i);
    if (row.relation == Relation::LessEqual && y[i] > 0.0)
      return -kInf;
    if (row.relation == Relation::GreaterEqual && y[i] < 0.0)
      return -kInf;
    yb += y[i] * row.rhs;
    ymax = std::max(ymax, std::abs(y[i]));
    for (const auto &t : row.terms)
      w[t.column] += y[i] * t.coefficient;
  }
  // Same relative threshold as the sign clipping of the multipliers.
  const double zero = 1e-9 * std::max(1.0, ymax);
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(w[j]) <= zero)
      continue;
    const auto &c = lp.column(j);
    const double v = detail::bound_value_min_form(w[j], c.lower, c.upper);
    if (std::isinf(v))
      return -kInf;
    sup += v;
  }
  return yb - sup;
}

/// Positive return value = objective improvement per unit step along the
/// ray; returns -inf if the direction leaves the feasible recession cone.
inline double ray_margin(const LinearProgram &lp, const std::vector<double> &d,
                         double tol) {
  for (int j = 0; j < lp.num_columns(); ++j) {
    const auto &c = lp.column(j);
    if (std::isfinite(c.lower) && d[j] < -tol)
      return -kInf;
    if (std::isfinite(c.upper) && d[j] > tol)
      return -kInf;
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const double act = lp.row_activity(i, d);
    switch (lp.row(i).relation) {
    case Relation::LessEqual:
      if (act > tol)
        return -kInf;
      break;
    case Relation::GreaterEqual:
      if (act < -tol)
        return -kInf;
      break;
    case Relation::Equal:
      if (std::abs(act) > tol)
        return -kInf;
      break;
    }
  }
  const double gain = lp.objective_value(d);
  return lp.sense() == Sense::Maximize ? gain : -gain;
}

namespace detail {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

class Simplex {
public:
  Simplex(const LinearProgram &lp, const Tolerances &tol, bool bland_only)
      : lp_(lp), tol_(tol), bland_(bland_only) {}

  LpSolution run() {
    setup();
    LpSolution sol;
    // Phase 1.
    if (num_art_ > 0) {
      std::vector<double> cost1(ncols_, 0.0);
      for (int k = 0; k < num_art_; ++k)
        cost1[n_ + m_ + k] = 1.0;
      cost_ = cost1;
      const auto st = iterate(/*phase1=*/true);
      (void)st;
      refine();
      double infeas = 0.0;
      for (int k = 0; k < num_art_; ++k)
        infeas += value(n_ + m_ + k);
      if (infeas > tol_.feasibility * (1.0 + bnorm_)) {
        sol.status = Status::Infeasible;
        sol.farkas = row_duals();
        clip_signs(sol.farkas);
        sol.iterations = iterations_;
        sol.primal = structural_values();
        return sol;
      }
      // Artificials are pinned to zero for phase 2.
      for (int k = 0; k < num_art_; ++k) {
        const int j = n_ + m_ + k;
        lower_[j] = upper_[j] = 0.0;
        if (state_[j] != VarState::Basic)
          state_[j] = VarState::AtLower;
      }
    }
    // Phase 2.
    std::vector<double> cost2(ncols_, 0.0);
    const double sgn = lp_.sense() == Sense::Maximize ? -1.0 : 1.0;
    for (int j = 0; j < n_; ++j)
      cost2[j] = sgn * lp_.column(j).cost;
    cost_ = cost2;
    const auto st = iterate(/*phase1=*/false);
    refine();
    sol.iterations = iterations_;
    sol.primal = structural_values();
    sol.objective = lp_.objective_value(sol.primal);
    if (st == Status::Unbounded) {
      sol.status = Status::Unbounded;
      sol.ray = ray_;
      return sol;
    }
    sol.status = Status::Optimal;
    auto y = row_duals();
    sol.duals.resize(m_);
    for (int i = 0; i < m_; ++i)
      sol.duals[i] = sgn * y[i];
    sol.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      sol.reduced_costs[j] = lp_.column(j).cost;
    for (int i = 0; i < m_; ++i)
      for (const auto &t : lp_.row(i).terms)
        sol.reduced_costs[t.column] -= sol.duals[i] * t.coefficient;
    return sol;
  }

private:
  double &T(int i, int j) { return tab_[static_cast<std::size_t>(i) * ncols_ + j]; }
  double T(int i, int j) const {
    return tab_[static_cast<std::size_t>(i) * ncols_ + j];
  }

  double value(int j) const {
    switch (state_[j]) {
    case VarState::Basic:
      return beta_[where_[j]];
    case VarState::AtLower:
      return lower_[j];
    case VarState::AtUpper:
      return upper_[j];
    case VarState::FreeZero:
      return 0.0;
    }
    return 0.0;
  }

  void setup() {
    n_ = lp_.num_columns();
    m_ = lp_.num_rows();
    lower_.clear();
    upper_.clear();
    for (int j = 0; j < n_; ++j) {
      lower_.push_back(lp_.column(j).lower);
      upper_.push_back(lp_.column(j).upper);
    }
    for (int i = 0; i < m_; ++i) {
      switch (lp_.row(i).relation) {
      case Relation::LessEqual:
        lower_.push_back(0.0);
        upper_.push_back(kInf);
        break;
      case Relation::GreaterEqual:
        lower_.push_back(-kInf);
        upper_.push_back(0.0);
        break;
      case Relation::Equal:
        lower_.push_back(0.0);
        upper_.push_back(0.0);
        break;
      }
    }
    state_.assign(n_ + m_, VarState::AtLower);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j]))
        state_[j] = VarState::AtLower;
      else if (std::isfinite(upper_[j]))
        state_[j] = VarState::AtUpper;
      else
        state_[j] = VarState::FreeZero;
    }
    // Residual of each row with logicals removed.
    std::vector<double> r(m_);
    bnorm_ = 0.0;
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (const auto &t : lp_.row(i).terms)
        act += t.coefficient * value(t.column);
      r[i] = lp_.row(i).rhs - act;
      bnorm_ = std::max(bnorm_, std::abs(lp_.row(i).rhs));
    }
    // Decide which rows need an artificial.
    auto &art_row = art_row_;
    auto &art_sign = art_sign_;
    art_row.clear();
    art_sign.clear();
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      if (r[i] >= lower_[s] && r[i] <= upper_[s])
        continue;
      art_row.push_back(i);
      art_sign.push_back(r[i] > 0.0 ? 1.0 : -1.0);
    }
    num_art_ = static_cast<int>(art_row.size());
    ncols_ = n_ + m_ + num_art_;
    lower_.resize(ncols_, 0.0);
    upper_.resize(ncols_, kInf);
    state_.resize(ncols_, VarState::AtLower);
    tab_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (const auto &t : lp_.row(i).terms)
        T(i, t.column) += t.coefficient;
      T(i, n_ + i) = 1.0;
    }
    basis_.assign(m_, -1);
    where_.assign(ncols_, -1);
    beta_.assign(m_, 0.0);
    std::vector<int> art_of_row(m_, -1);
    for (int k = 0; k < num_art_; ++k) {
      art_of_row[art_row[k]] = k;
      T(art_row[k], n_ + m_ + k) = art_sign[k];
    }
    a_ = tab_;
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      if (art_of_row[i] < 0) {
        basis_[i] = s;
        where_[s] = i;
        state_[s] = VarState::Basic;
        beta_[i] = r[i];
      } else {
        const int k = art_of_row[i];
        const int a = n_ + m_ + k;
        // Logical sits at the bound nearest the residual.
        state_[s] = std::isfinite(lower_[s]) ? VarState::AtLower
                                             : VarState::AtUpper;
        const double sval = value(s);
        const double sign = art_sign[k];
        // Normalize the row so the artificial has coefficient +1.
        for (int j = 0; j < ncols_; ++j)
          T(i, j) *= sign;
        basis_[i] = a;
        where_[a] = i;
        state_[a] = VarState::Basic;
        beta_[i] = sign * (r[i] - sval);
      }
    }
    iterations_ = 0;
    degenerate_run_ = 0;
  }

  void compute_reduced_costs() {
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0)
        continue;
      const double *row = &tab_[static_cast<std::size_t>(i) * ncols_];
      for (int j = 0; j < ncols_; ++j)
        d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i)
      d_[basis_[i]] = 0.0;
  }

  bool fixed(int j) const { return lower_[j] == upper_[j]; }

  int choose_entering(bool phase1) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      const auto st = state_[j];
      if (st == VarState::Basic || fixed(j))
        continue;
      if (!phase1 && j >= n_ + m_)
        continue;
      const double dj = d_[j];
      bool eligible = false;
      if (st == VarState::AtLower)
        eligible = dj < -tol_.optimality;
      else if (st == VarState::AtUpper)
        eligible = dj > tol_.optimality;
      else
        eligible = std::abs(dj) > tol_.optimality;
      if (!eligible)
        continue;
      if (bland_)
        return j;
      const double score = std::abs(dj);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  Status iterate(bool phase1) {
    compute_reduced_costs();
    int since_refresh = 0;
    bool fresh = false;
    for (;;) {
      if (++iterations_ > tol_.max_iterations)
        throw NumericalFailure("simplex iteration limit exceeded");
      if (++since_refresh >= 100) {
        refresh();
        since_refresh = 0;
        fresh = true;
      }
      int q = choose_entering(phase1);
      if (q < 0 && !fresh) {
        // Optimality is only declared on a freshly inverted basis.
        refresh();
        since_refresh = 0;
        q = choose_entering(phase1);
      }
      if (q < 0)
        return Status::Optimal;
      fresh = false;
      const double dir = (state_[q] == VarState::AtUpper ||
                          (state_[q] == VarState::FreeZero && d_[q] > 0.0))
                             ? -1.0
                             : 1.0;
      // Ratio test. Basic variable in row i moves by -dir * alpha_i * theta.
      // Outside Bland mode this is the two-pass Harris test: bounds are
      // relaxed by `slack` to find the longest admissible step, then the
      // largest pivot within that step leaves.
      const double slack = bland_ ? 0.0 : kHarrisSlack;
      auto limit_of = [&](int i, double relax, bool &to_upper) {
        const double rate = -dir * T(i, q); // change of x_k per unit theta
        const int k = basis_[i];
        if (rate < 0.0) {
          to_upper = false;
          if (!std::isfinite(lower_[k]))
            return kInf;
          return std::max(0.0, (beta_[i] - lower_[k] + relax) / -rate);
        }
        to_upper = true;
        if (!std::isfinite(upper_[k]))
          return kInf;
        return std::max(0.0, (upper_[k] - beta_[i] + relax) / rate);
      };
      double bound = kInf;
      if (!bland_)
        for (int i = 0; i < m_; ++i) {
          if (std::abs(T(i, q)) <= tol_.pivot)
            continue;
          bool up = false;
          bound = std::min(bound, limit_of(i, slack, up));
        }
      double theta = kInf;
      int leave = -1;
      bool leave_to_upper = false;
      double best_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = T(i, q);
        if (std::abs(alpha) <= tol_.pivot)
          continue;
        bool to_upper = false;
        const double limit = limit_of(i, 0.0, to_upper);
        if (!std::isfinite(limit))
          continue;
        bool take = false;
        if (bland_) {
          if (leave < 0 || limit < theta - 1e-12)
            take = true;
          else if (limit <= theta + 1e-12)
            take = basis_[i] < basis_[leave];
        } else if (limit <= bound) {
          take = leave < 0 || std::abs(alpha) > best_alpha;
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_to_upper = to_upper;
          best_alpha = std::abs(alpha);
        }
      }
      const double range = upper_[q] - lower_[q];
      const bool flip = std::isfinite(range) && range <= theta;
      if (leave < 0 && !flip) {
        if (phase1)
          throw NumericalFailure("phase 1 reported unbounded");
        ray_.assign(n_, 0.0);
        if (q < n_)
          ray_[q] = dir;
        for (int i = 0; i < m_; ++i)
          if (basis_[i] < n_)
            ray_[basis_[i]] = -dir * T(i, q);
        return Status::Unbounded;
      }
      const double step = flip ? range : theta;
      if (step <= 1e-12) {
        if (++degenerate_run_ > tol_.bland_after)
          bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
      for (int i = 0; i < m_; ++i) {
        const double alpha = T(i, q);
        if (alpha != 0.0)
          beta_[i] -= dir * alpha * step;
      }
      if (flip) {
        state_[q] =
            state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        continue;
      }
      const double entering_value = value(q) + dir * step;
      const int k = basis_[leave];
      state_[k] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      where_[k] = -1;
      pivot(leave, q);
      basis_[leave] = q;
      where_[q] = leave;
      state_[q] = VarState::Basic;
      beta_[leave] = entering_value;
    }
  }

  void pivot(int r, int q) {
    double *prow = &tab_[static_cast<std::size_t>(r) * ncols_];
    const double inv = 1.0 / prow[q];
    nz_.clear();
    for (int j = 0; j < ncols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        if (std::abs(prow[j]) < 1e-14)
          prow[j] = 0.0;
        else
          nz_.push_back(j);
      }
    }
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r)
        continue;
      double *row = &tab_[static_cast<std::size_t>(i) * ncols_];
      const double f = row[q];
      if (f == 0.0)
        continue;
      for (int j : nz_)
        row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (int j : nz_)
        d_[j] -= fd * prow[j];
    }
    d_[q] = 0.0;
  }

  // (B^{-1})_{r,i} sits in the logical column of row i.
  double binv(int r, int i) const { return T(r, n_ + i); }

  // Rebuilds the tableau B^{-1} [A I art] and the basic values from the
  // original data, then the reduced costs. Keeps the updated tableau if the
  // basis matrix is numerically singular.
  void refresh() {
    reinvert();
    compute_reduced_costs();
  }

  void reinvert() {
    const std::size_t m = static_cast<std::size_t>(m_);
    std::vector<double> b(m * m), inv(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const int k = basis_[r];
      for (std::size_t i = 0; i < m; ++i)
        b[i * m + r] = a_[i * ncols_ + k];
      inv[r * m + r] = 1.0;
    }
    // Gauss-Jordan with partial pivoting.
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      for (std::size_t i = c + 1; i < m; ++i)
        if (std::abs(b[i * m + c]) > std::abs(b[p * m + c]))
          p = i;
      if (std::abs(b[p * m + c]) < 1e-12)
        return;
      if (p != c)
        for (std::size_t j = 0; j < m; ++j) {
          std::swap(b[p * m + j], b[c * m + j]);
          std::swap(inv[p * m + j], inv[c * m + j]);
        }
      const double f = 1.0 / b[c * m + c];
      for (std::size_t j = 0; j < m; ++j) {
        b[c * m + j] *= f;
        inv[c * m + j] *= f;
      }
      for (std::size_t i = 0; i < m; ++i) {
        const double g = b[i * m + c];
        if (i == c || g == 0.0)
          continue;
        for (std::size_t j = 0; j < m; ++j) {
          b[i * m + j] -= g * b[c * m + j];
          inv[i * m + j] -= g * inv[c * m + j];
        }
      }
    }
    std::fill(tab_.begin(), tab_.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double *row = &tab_[r * ncols_];
      for (std::size_t i = 0; i < m; ++i) {
        const double v = inv[r * m + i];
        if (v == 0.0)
          continue;
        const double *arow = &a_[i * ncols_];
        for (int j = 0; j < ncols_; ++j)
          row[j] += v * arow[j];
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      double *row = &tab_[r * ncols_];
      for (int j = 0; j < ncols_; ++j)
        if (std::abs(row[j]) < 1e-14)
          row[j] = 0.0;
      row[basis_[r]] = 1.0;
    }
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      double v = lp_.row(static_cast<int>(i)).rhs;
      for (int j = 0; j < ncols_; ++j)
        if (state_[j] != VarState::Basic && a_[i * ncols_ + j] != 0.0)
          v -= a_[i * ncols_ + j] * value(j);
      rhs[i] = v;
    }
    for (std::size_t r = 0; r < m; ++r) {
      double v = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        v += inv[r * m + i] * rhs[i];
      beta_[r] = v;
    }
  }

  void refine() {
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> res(m_);
      for (int i = 0; i < m_; ++i) {
        double act = value(n_ + i);
        for (const auto &t : lp_.row(i).terms)
          act += t.coefficient * value(t.column);
        res[i] = lp_.row(i).rhs - act;
      }
      for (int k = 0; k < num_art_; ++k)
        res[art_row_[k]] -= art_sign_[k] * value(n_ + m_ + k);
      for (int r = 0; r < m_; ++r) {
        double corr = 0.0;
        for (int i = 0; i < m_; ++i)
          if (res[i] != 0.0)
            corr += binv(r, i) * res[i];
        beta_[r] += corr;
      }
    }
  }

  std::vector<double> row_duals() const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[basis_[r]];
      if (cb == 0.0)
        continue;
      for (int i = 0; i < m_; ++i)
        y[i] += cb * binv(r, i);
    }
    return y;
  }

  // Zeroes multipliers whose sign is wrong only by roundoff.
  void clip_signs(std::vector<double> &y) const {
    double ymax = 0.0;
    for (double v : y)
      ymax = std::max(ymax, std::abs(v));
    const double tiny = 1e-9 * std::max(1.0, ymax);
    for (int i = 0; i < m_; ++i) {
      const auto rel = lp_.row(i).relation;
      if (rel == Relation::LessEqual && y[i] > 0.0 && y[i] <= tiny)
        y[i] = 0.0;
      if (rel == Relation::GreaterEqual && y[i] < 0.0 && y[i] >= -tiny)
        y[i] = 0.0;
    }
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j)
      x[j] = value(j);
    return x;
  }

  const LinearProgram &lp_;
  const Tolerances &tol_;
  bool bland_;
  int n_ = 0, m_ = 0, num_art_ = 0, ncols_ = 0;
  static constexpr double kHarrisSlack = 1e-9;

  std::vector<double> tab_, a_, beta_, lower_, upper_, cost_, d_, ray_;
  std::vector<VarState> state_;
  std::vector<int> basis_, where_, nz_;
  std::vector<int> art_row_;
  std::vector<double> art_sign_;
  double bnorm_ = 0.0;
  int iterations_ = 0, degenerate_run_ = 0;
};

} // namespace detail

namespace detail {

/// Copy of `lp` with every row scaled by a power of two so that its largest
/// coefficient lies in [1, 2). Exact in floating point; tolerances then
/// mean the same thing for every row.
inline LinearProgram equilibrate(const LinearProgram &lp,
                                 std::vector<double> &scale) {
  LinearProgram out(lp.sense());
  for (const auto &c : lp.columns())
    out.add_column(c.lower, c.upper, c.cost, c.name);
  scale.assign(static_cast<std::size_t>(lp.num_rows()), 1.0);
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto &row = lp.row(i);
    double big = 0.0;
    for (const auto &t : row.terms)
      big = std::max(big, std::abs(t.coefficient));
    const double f = big > 0.0 ? std::ldexp(1.0, -std::ilogb(big)) : 1.0;
    scale[static_cast<std::size_t>(i)] = f;
    auto terms = row.terms;
    for (auto &t : terms)
      t.coefficient *= f;
    out.add_row(std::move(terms), row.relation, row.rhs * f, row.name);
  }
  return out;
}

} // namespace detail

/// Solves `lp`. Rows are equilibrated first; the result is checked against
/// the equilibrated data, a failed check triggers a restart under Bland's
/// rule, and NumericalFailure is thrown once the restart budget is spent.
/// Multipliers are reported for the rows as given.
inline LpSolution solve(const LinearProgram &original,
                        const Tolerances &tol = default_tolerances()) {
  std::vector<double> row_scale;
  const LinearProgram lp = detail::equilibrate(original, row_scale);
  auto unscale = [&](LpSolution sol) {
    for (std::size_t i = 0; i < sol.duals.size(); ++i)
      sol.duals[i] *= row_scale[i];
    for (std::size_t i = 0; i < sol.farkas.size(); ++i)
      sol.farkas[i] *= row_scale[i];
    return sol;
  };
  std::string last_problem;
  for (int attempt = 0; attempt <= tol.restarts; ++attempt) {
    detail::Simplex simplex(lp, tol, /*bland_only=*/attempt > 0);
    LpSolution sol = simplex.run();
    double rhs_norm = 0.0;
    for (const auto &row : lp.rows())
      rhs_norm = std::max(rhs_norm, std::abs(row.rhs));
    switch (sol.status) {
    case Status::Optimal: {
      const auto r = optimality_residuals(lp, sol);
      const double scale = 1.0 + std::abs(sol.objective);
      if (r.primal <= tol.feasibility * (1.0 + rhs_norm) &&
          r.dual <= tol.feasibility * scale &&
          r.complementarity <= tol.feasibility * scale &&
          r.gap <= tol.duality_gap * scale)
        return unscale(std::move(sol));
      std::ostringstream os;
      os << "optimal basis failed verification (primal " << r.primal
         << ", dual " << r.dual << ", complementarity " << r.complementarity
         << ", gap " << r.gap << ")";
      last_problem = os.str();
      break;
    }
    case Status::Infeasible:
      if (farkas_margin(lp, sol.farkas) > 0.0)
        return unscale(std::move(sol));
      last_problem = "Farkas certificate failed verification";
      break;
    case Status::Unbounded: {
      double rnorm = 0.0;
      for (double v : sol.ray)
        rnorm = std::max(rnorm, std::abs(v));
      if (rnorm > 0.0 && ray_margin(lp, sol.ray, tol.feasibility * rnorm) > 0.0)
        return unscale(std::move(sol));
      last_problem = "unbounded ray failed verification";
      break;
    }
    }
  }
  throw NumericalFailure(last_problem);
}

/// Writes `lp` in the common CPLEX LP text layout.
inline void write_lp_format(const LinearProgram &lp, std::ostream &os) {
  auto name_of = [&](int j) {
    const auto &n = lp.column(j).name;
    return n.empty() ? "x" + std::to_string(j) : n;
  };
  auto emit_terms = [&](const std::vector<Term> &terms) {
    bool first = true;
    for (const auto &t : terms) {
      if (t.coefficient == 0.0)
        continue;
      os << (t.coefficient < 0 ? (first ? "-" : " - ") : (first ? "" : " + "))
         << std::abs(t.coefficient) << " " << name_of(t.column);
      first = false;
    }
    if (first)
      os << "0 " << name_of(0);
  };
  os.precision(17);
  os << (lp.sense() == Sense::Maximize ? "Maximize" : "Minimize") << "\n obj: ";
  std::vector<Term> obj;
  for (int j = 0; j < lp.num_columns(); ++j)
    if (lp.column(j).cost != 0.0)
      obj.push_back({j, lp.column(j).cost});
  emit_terms(obj);
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto &row = lp.row(i);
    os << " " << (row.name.empty() ? "r" + std::to_string(i) : row.name)
       << ": ";
    emit_terms(row.terms);
    switch (row.relation) {
    case Relation::LessEqual:
      os << " <= ";
      break;
    case Relation::GreaterEqual:
      os << " >= ";
      break;
    case Relation::Equal:
      os << " = ";
      break;
    }
    os << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_columns(); ++j) {
    const auto &c = lp.column(j);
    if (std::isinf(c.lower) && std::isinf(c.upper))
      os << " " << name_of(j) << " free\n";
    else if (c.lower == c.upper)
      os << " " << name_of(j) << " = " << c.lower << "\n";
    else {
      os << " ";
      if (std::isinf(c.lower))
        os << "-inf";
      else
        os << c.lower;
      os << " <= " << name_of(j) << " <= ";
      if (std::isinf(c.upper))
        os << "+inf";
      else
        os << c.upper;
      os << "\n";
    }
  }
  os << "End\n";
}

} // namespace superhedge::lp
