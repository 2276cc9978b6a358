#pragma once

// Primal side: the zero-cost hedgeable set C, superhedging cost and the
// prices derived from it. C is never formed explicitly; every question is
// one LP over portfolio variables on the tree.

#include "superhedge/errors.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/market_model.hpp"
#include "superhedge/scenario_tree.hpp"
#include "superhedge/tolerances.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace superhedge {

/// Row and column layout of an assembled hedging LP.
///
/// Column blocks: x_n (dim entries, non-terminal nodes only), one epigraph
/// variable t per (node, cost term) with more than one piece, then whatever
/// the caller added. A single-piece term is folded straight into the budget
/// row, so its multiplier equals the budget multiplier.
struct HedgeAssembly {
  struct TermLayout {
    int t = -1;            // epigraph column, -1 when folded
    std::vector<int> rows; // one row per piece (empty when folded)
  };

  lp::LinearProgram lp;
  std::size_t dim = 0;
  std::vector<int> x;                           // first x column, -1 at leaves
  std::vector<std::vector<TermLayout>> terms;   // per node
  std::vector<std::vector<int>> domain_rows;    // per node, on the trade
  std::vector<std::vector<int>> constraint_rows; // per node, on the holding
  std::vector<int> budget;                      // per node

  PortfolioProcess portfolio(const std::vector<double> &primal) const {
    PortfolioProcess out(x.size(), dim);
    for (std::size_t n = 0; n < x.size(); ++n)
      if (x[n] >= 0)
        for (std::size_t j = 0; j < dim; ++j)
          out[n][j] = primal[static_cast<std::size_t>(x[n]) + j];
    return out;
  }
};

namespace detail {

inline void check_claim(const MarketModel &model, const ClaimProcess &c,
                        const char *what) {
  if (c.size() != model.tree().size())
    throw ShapeMismatch(std::string(what) + " has " + std::to_string(c.size()) +
                        " values for " + std::to_string(model.tree().size()) +
                        " nodes");
  for (double v : c.values())
    if (!std::isfinite(v))
      throw InvalidModel(std::string(what) + " has a non-finite value");
}

/// Terms of g . (x_n - carry_n * x_parent).
inline std::vector<lp::Term> trade_terms(const MarketModel &model,
                                         const std::vector<int> &x,
                                         std::size_t n, const Vector &g) {
  std::vector<lp::Term> out;
  const std::size_t dim = model.dim();
  if (x[n] >= 0)
    for (std::size_t j = 0; j < dim; ++j)
      if (g[j] != 0.0)
        out.push_back({x[n] + static_cast<int>(j), g[j]});
  const int p = model.tree().parent(n);
  if (p >= 0) {
    const auto &r = model.carry(n);
    for (std::size_t j = 0; j < dim; ++j)
      if (g[j] != 0.0)
        out.push_back({x[static_cast<std::size_t>(p)] + static_cast<int>(j),
                       -g[j] * r[j]});
  }
  return out;
}

/// Builds the budget system
///   sum_terms max_k (a_k . dx_n + b_k) + extra_n + c_n <= 0,
///   dx_n in dom S_n, x_n in D_n, x at leaves = 0.
/// `homogeneous` drops every offset (b, domain h, constraint h), giving the
/// recession system. `add_extra(lp)` may append columns and returns the
/// extra budget terms per node.
template <class AddExtra>
HedgeAssembly assemble_hedge(const MarketModel &model, const ClaimProcess &c,
                             bool homogeneous, lp::Sense sense,
                             AddExtra &&add_extra) {
  check_claim(model, c, "claim");
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  HedgeAssembly a;
  a.lp = lp::LinearProgram(sense);
  a.dim = dim;
  a.x.assign(tree.size(), -1);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (tree.is_terminal(n))
      continue;
    a.x[n] = a.lp.num_columns();
    for (std::size_t j = 0; j < dim; ++j)
      a.lp.add_free_column(0.0, "x_" + tree.id(n) + "_" + model.assets()[j]);
  }
  a.terms.resize(tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const auto &terms = model.cost(n).terms();
    a.terms[n].resize(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k)
      if (terms[k].size() > 1)
        a.terms[n][k].t = a.lp.add_free_column(
            0.0, "t_" + tree.id(n) + "_" + std::to_string(k));
  }
  const std::vector<std::vector<lp::Term>> extra = add_extra(a.lp);

  a.domain_rows.resize(tree.size());
  a.constraint_rows.resize(tree.size());
  a.budget.resize(tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const auto &cost = model.cost(n);
    std::vector<lp::Term> budget;
    double folded_offset = 0.0;
    for (std::size_t k = 0; k < cost.terms().size(); ++k) {
      const auto &term = cost.terms()[k];
      auto &layout = a.terms[n][k];
      if (layout.t < 0) {
        const auto &piece = term.front();
        auto tt = trade_terms(model, a.x, n, piece.a);
        budget.insert(budget.end(), tt.begin(), tt.end());
        if (!homogeneous)
          folded_offset += piece.b;
        continue;
      }
      budget.push_back({layout.t, 1.0});
      for (std::size_t q = 0; q < term.size(); ++q) {
        auto row = trade_terms(model, a.x, n, term[q].a);
        row.push_back({layout.t, -1.0});
        layout.rows.push_back(a.lp.add_row(
            std::move(row), lp::Relation::LessEqual,
            homogeneous ? 0.0 : -term[q].b,
            "piece_" + tree.id(n) + "_" + std::to_string(k) + "_" +
                std::to_string(q)));
      }
    }
    for (std::size_t i = 0; i < cost.domain().size(); ++i) {
      const auto &r = cost.domain()[i];
      a.domain_rows[n].push_back(
          a.lp.add_row(trade_terms(model, a.x, n, r.g), lp::Relation::LessEqual,
                       homogeneous ? 0.0 : r.h,
                       "dom_" + tree.id(n) + "_" + std::to_string(i)));
    }
    if (a.x[n] >= 0) {
      const auto &rows = model.constraint(n).rows();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<lp::Term> row;
        for (std::size_t j = 0; j < dim; ++j)
          if (rows[i].g[j] != 0.0)
            row.push_back({a.x[n] + static_cast<int>(j), rows[i].g[j]});
        a.constraint_rows[n].push_back(
            a.lp.add_row(std::move(row), lp::Relation::LessEqual,
                         homogeneous ? 0.0 : rows[i].h,
                         "con_" + tree.id(n) + "_" + std::to_string(i)));
      }
    }
    if (!extra.empty())
      budget.insert(budget.end(), extra[n].begin(), extra[n].end());
    a.budget[n] = a.lp.add_row(std::move(budget), lp::Relation::LessEqual,
                               -c[n] - folded_offset, "budget_" + tree.id(n));
  }
  return a;
}

inline HedgeAssembly assemble_hedge(const MarketModel &model,
                                    const ClaimProcess &c, bool homogeneous) {
  return assemble_hedge(model, c, homogeneous, lp::Sense::Minimize,
                        [](lp::LinearProgram &) {
                          return std::vector<std::vector<lp::Term>>{};
                        });
}

} // namespace detail

/// Largest violation of the budget system by portfolio x for claim c (0 if
/// x hedges c). Terminal holdings are taken as given, so a non-liquidated x
/// shows up as a constraint violation only through the trades it implies.
inline double hedge_residual(const MarketModel &model, const ClaimProcess &c,
                             const PortfolioProcess &x) {
  const auto &tree = model.tree();
  detail::check_claim(model, c, "claim");
  if (x.size() != tree.size() || x.dim() != model.dim())
    throw ShapeMismatch("portfolio does not match model");
  double worst = 0.0;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    Vector dx = x[n];
    const int p = tree.parent(n);
    if (p >= 0)
      for (std::size_t j = 0; j < dx.size(); ++j)
        dx[j] -= model.carry(n)[j] * x[static_cast<std::size_t>(p)][j];
    const auto &cost = model.cost(n);
    double s = 0.0;
    for (const auto &term : cost.terms()) {
      double best = -kInf;
      for (const auto &piece : term)
        best = std::max(best, detail::dot(piece.a, dx) + piece.b);
      s += best;
    }
    worst = std::max(worst, s + c[n]);
    for (const auto &r : cost.domain())
      worst = std::max(worst, detail::dot(r.g, dx) - r.h);
    for (const auto &r : model.constraint(n).rows())
      worst = std::max(worst, detail::dot(r.g, x[n]) - r.h);
    if (tree.is_terminal(n))
      worst = std::max(worst, detail::inf_norm(x[n]));
  }
  return worst;
}

enum class Membership { Member, NotMember };

inline const char *to_string(Membership m) {
  return m == Membership::Member ? "Member" : "NotMember";
}

struct HedgeResult {
  Membership status = Membership::NotMember;
  PortfolioProcess portfolio; // certificate when Member
  double residual = 0.0;      // hedge_residual of the certificate
  std::vector<double> farkas; // row multipliers proving NotMember
};

/// c in C: exists x in N_0 with x_n in D_n and S_n(dx_n) + c_n <= 0.
inline HedgeResult membership(const MarketModel &model, const ClaimProcess &c,
                              const Tolerances &tol = default_tolerances()) {
  auto a = detail::assemble_hedge(model, c, false);
  const auto sol = lp::solve(a.lp, tol);
  HedgeResult out;
  if (sol.status == lp::Status::Infeasible) {
    out.farkas = sol.farkas;
    return out;
  }
  out.status = Membership::Member;
  out.portfolio = a.portfolio(sol.primal);
  out.residual = hedge_residual(model, c, out.portfolio);
  return out;
}

/// c in rc C, via feasibility of the homogenized system. Exact for
/// polyhedral data.
inline bool recession_membership(const MarketModel &model, const ClaimProcess &c,
                                 const Tolerances &tol = default_tolerances()) {
  auto a = detail::assemble_hedge(model, c, true);
  return lp::solve(a.lp, tol).status != lp::Status::Infeasible;
}

enum class PriceStatus { Finite, MinusInfinity, PlusInfinity };

inline const char *to_string(PriceStatus s) {
  switch (s) {
  case PriceStatus::Finite:
    return "Finite";
  case PriceStatus::MinusInfinity:
    return "MinusInfinity";
  case PriceStatus::PlusInfinity:
    return "PlusInfinity";
  }
  return "?";
}

inline constexpr const char *kMinusInfinityDiagnosis =
    "premium in recession cone, pi = -inf on dom pi";

struct PriceResult {
  PriceStatus status = PriceStatus::PlusInfinity;
  double value = kInf;
  PortfolioProcess portfolio; // hedges c - value * p when Finite
  double residual = 0.0;
  std::string diagnosis;
  std::vector<double> certificate; // Farkas multipliers or improving ray
};

namespace detail {

/// Pricing LP: min alpha s.t. c - alpha p in C. `alpha_column` receives the
/// column index of alpha.
inline HedgeAssembly assemble_pricing(const MarketModel &model,
                                      const ClaimProcess &c,
                                      const ClaimProcess &p, int &alpha_column) {
  check_claim(model, p, "premium");
  if (p.is_zero())
    throw ZeroPremium("premium process is identically zero");
  return assemble_hedge(model, c, false, lp::Sense::Minimize,
                        [&](lp::LinearProgram &prog) {
                          alpha_column = prog.add_free_column(1.0, "alpha");
                          std::vector<std::vector<lp::Term>> extra(p.size());
                          for (std::size_t n = 0; n < p.size(); ++n)
                            if (p[n] != 0.0)
                              extra[n].push_back({alpha_column, -p[n]});
                          return extra;
                        });
}

inline PriceResult price_from_solution(const MarketModel &model,
                                       const ClaimProcess &c,
                                       const ClaimProcess &p,
                                       const HedgeAssembly &a, int alpha,
                                       const lp::LpSolution &sol) {
  PriceResult out;
  switch (sol.status) {
  case lp::Status::Optimal: {
    out.status = PriceStatus::Finite;
    out.value = sol.primal[static_cast<std::size_t>(alpha)];
    out.portfolio = a.portfolio(sol.primal);
    ClaimProcess hedged = c - out.value * p;
    out.residual = hedge_residual(model, hedged, out.portfolio);
    break;
  }
  case lp::Status::Unbounded:
    out.status = PriceStatus::MinusInfinity;
    out.value = -kInf;
    out.diagnosis = kMinusInfinityDiagnosis;
    out.certificate = sol.ray;
    break;
  case lp::Status::Infeasible:
    out.status = PriceStatus::PlusInfinity;
    out.value = kInf;
    out.diagnosis = "claim outside dom pi: no multiple of the premium makes it "
                    "hedgeable";
    out.certificate = sol.farkas;
    break;
  }
  return out;
}

} // namespace detail

/// pi(c) = inf { alpha | c - alpha p in C }.
inline PriceResult superhedge_cost(const MarketModel &model, const ClaimProcess &c,
                                   const ClaimProcess &p,
                                   const Tolerances &tol = default_tolerances()) {
  int alpha = -1;
  const auto a = detail::assemble_pricing(model, c, p, alpha);
  const auto sol = lp::solve(a.lp, tol);
  return detail::price_from_solution(model, c, p, a, alpha, sol);
}

/// Pricing LP as assembled, e.g. for dumping in LP text format.
inline lp::LinearProgram pricing_lp(const MarketModel &model, const ClaimProcess &c,
                                    const ClaimProcess &p) {
  int alpha = -1;
  return detail::assemble_pricing(model, c, p, alpha).lp;
}

struct PositiveHullResult {
  bool member = false;
  double gamma = 0.0; // largest gamma in [0, 1] with gamma p in C
};

/// p in pos C, decided by max gamma in [0, 1] with gamma p in C and a
/// strict threshold on gamma. p = 0 is reported as non-member.
inline PositiveHullResult positive_hull_membership(
    const MarketModel &model, const ClaimProcess &p,
    const Tolerances &tol = default_tolerances()) {
  detail::check_claim(model, p, "premium");
  PositiveHullResult out;
  if (p.is_zero())
    return out;
  int gamma = -1;
  auto a = detail::assemble_hedge(
      model, ClaimProcess::zero(model.tree()), false, lp::Sense::Maximize,
      [&](lp::LinearProgram &prog) {
        gamma = prog.add_column(0.0, 1.0, 1.0, "gamma");
        std::vector<std::vector<lp::Term>> extra(p.size());
        for (std::size_t n = 0; n < p.size(); ++n)
          if (p[n] != 0.0)
            extra[n].push_back({gamma, p[n]});
        return extra;
      });
  const auto sol = lp::solve(a.lp, tol);
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("positive hull LP is feasible at gamma = 0 and bounded");
  out.gamma = sol.objective;
  out.member = out.gamma > tol.positivity;
  return out;
}

struct ArbitrageResult {
  bool found = false;
  double value = 0.0;         // max E sum c over C cap [0, 1]^nodes
  ClaimProcess claim;         // nonnegative, nonzero member of C when found
  PortfolioProcess portfolio; // its hedge
};

/// Looks for c in C with 0 <= c <= 1 and positive expected total payout.
inline ArbitrageResult arbitrage_check(const MarketModel &model,
                                       const Tolerances &tol = default_tolerances()) {
  const auto &tree = model.tree();
  int first = -1;
  auto a = detail::assemble_hedge(
      model, ClaimProcess::zero(tree), false, lp::Sense::Maximize,
      [&](lp::LinearProgram &prog) {
        std::vector<std::vector<lp::Term>> extra(tree.size());
        for (std::size_t n = 0; n < tree.size(); ++n) {
          const int col = prog.add_column(0.0, 1.0, tree.prob(n), "c_" + tree.id(n));
          if (n == 0)
            first = col;
          extra[n].push_back({col, 1.0});
        }
        return extra;
      });
  const auto sol = lp::solve(a.lp, tol);
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("arbitrage LP is feasible at c = 0 and bounded");
  ArbitrageResult out;
  out.value = sol.objective;
  out.found = out.value > 1e-8;
  if (out.found) {
    out.claim = ClaimProcess(tree.size());
    for (std::size_t n = 0; n < tree.size(); ++n)
      out.claim[n] = std::max(0.0, sol.primal[static_cast<std::size_t>(first) + n]);
    out.portfolio = a.portfolio(sol.primal);
  }
  return out;
}

namespace detail {

inline double finite_price(const MarketModel &model, const ClaimProcess &c,
                           const ClaimProcess &p, const Tolerances &tol,
                           const char *what) {
  const auto r = superhedge_cost(model, c, p, tol);
  if (r.status != PriceStatus::Finite)
    throw UndefinedBase(std::string(what) + " has pi = " +
                        (r.status == PriceStatus::PlusInfinity ? "+inf" : "-inf"));
  return r.value;
}

inline double extended_price(const MarketModel &model, const ClaimProcess &c,
                             const ClaimProcess &p, const Tolerances &tol) {
  return superhedge_cost(model, c, p, tol).value;
}

} // namespace detail

/// P(cbar; c) = pi(cbar + c) - pi(cbar). May be +inf.
inline double selling_price(const MarketModel &model, const ClaimProcess &cbar,
                            const ClaimProcess &c, const ClaimProcess &p,
                            const Tolerances &tol = default_tolerances()) {
  const double base = detail::finite_price(model, cbar, p, tol, "base claim");
  return detail::extended_price(model, cbar + c, p, tol) - base;
}

/// -P(cbar; -c).
inline double buying_price(const MarketModel &model, const ClaimProcess &cbar,
                           const ClaimProcess &c, const ClaimProcess &p,
                           const Tolerances &tol = default_tolerances()) {
  return -selling_price(model, cbar, -c, p, tol);
}

/// Directional derivative pi'(cbar; c). pi(cbar + alpha c) is piecewise
/// linear in alpha, so difference quotients at alpha and alpha / 2 agree as
/// soon as alpha is below the first kink. Returns +inf when every probe
/// leaves dom pi.
inline double marginal_price(const MarketModel &model, const ClaimProcess &cbar,
                             const ClaimProcess &c, const ClaimProcess &p,
                             const Tolerances &tol = default_tolerances(),
                             double alpha0 = 1e-3, int max_halvings = 30,
                             double agreement = 1e-9) {
  const double base = detail::finite_price(model, cbar, p, tol, "base claim");
  auto slope = [&](double alpha) {
    return (detail::extended_price(model, cbar + alpha * c, p, tol) - base) / alpha;
  };
  double alpha = alpha0;
  double prev = slope(alpha);
  for (int k = 0; k < max_halvings; ++k) {
    alpha *= 0.5;
    const double cur = slope(alpha);
    if (std::isinf(prev) && std::isinf(cur) && prev == cur) {
      if (k + 1 == max_halvings)
        return cur;
      prev = cur;
      continue;
    }
    if (std::abs(cur - prev) <= agreement)
      return cur;
    prev = cur;
  }
  throw SlopeNotStabilized("last slopes did not agree after " +
                           std::to_string(max_halvings) + " halvings");
}

struct AdmissibilityReport {
  bool minus_p_in_rc = false;
  bool p_in_rc = false;
  bool p_in_pos = false;
  bool admissible = false;
  // Filled when not admissible: C = M exactly when the constant claim 1 lies
  // in rc C, and then no premium at all is admissible.
  std::optional<bool> c_is_everything;
  std::string note;
};

/// -p in rc C and p not in rc C, the standing hypothesis for pi.
inline AdmissibilityReport premium_admissibility(
    const MarketModel &model, const ClaimProcess &p,
    const Tolerances &tol = default_tolerances()) {
  detail::check_claim(model, p, "premium");
  AdmissibilityReport r;
  r.minus_p_in_rc = recession_membership(model, -p, tol);
  r.p_in_rc = recession_membership(model, p, tol);
  r.p_in_pos = positive_hull_membership(model, p, tol).member;
  r.admissible = r.minus_p_in_rc && !r.p_in_rc;
  if (r.admissible) {
    r.note = r.p_in_pos ? "admissible; p in pos C, so pi(0) < 0"
                        : "admissible";
    return r;
  }
  r.c_is_everything = recession_membership(
      model, ClaimProcess::constant(model.tree(), 1.0), tol);
  if (*r.c_is_everything)
    r.note = "C = M: every claim is hedgeable at zero cost, no premium is "
             "admissible";
  else if (r.p_in_rc)
    r.note = "p in rc C: pi = -inf on dom pi";
  else
    r.note = "-p not in rc C: translation by p may leave C";
  return r;
}

// ---------------------------------------------------------------------------
// Formulation after eliminating a numeraire: cash is absorbed into one
// budget row per path.

namespace detail {

template <class AddExtra>
lp::LinearProgram assemble_reduced(const NumeraireReduction &red,
                                   const ClaimProcess &c, AddExtra &&add_extra,
                                   std::vector<int> &x) {
  const auto &tree = red.tree;
  if (c.size() != tree.size())
    throw ShapeMismatch("claim does not match reduced model");
  const std::size_t dim = red.dim();
  lp::LinearProgram prog;
  x.assign(tree.size(), -1);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (tree.is_terminal(n) || dim == 0)
      continue;
    x[n] = prog.num_columns();
    for (std::size_t j = 0; j < dim; ++j)
      prog.add_free_column();
  }
  auto trade = [&](std::size_t n, const Vector &g) {
    std::vector<lp::Term> out;
    if (x[n] >= 0)
      for (std::size_t j = 0; j < dim; ++j)
        if (g[j] != 0.0)
          out.push_back({x[n] + static_cast<int>(j), g[j]});
    const int p = tree.parent(n);
    if (p >= 0 && x[static_cast<std::size_t>(p)] >= 0)
      for (std::size_t j = 0; j < dim; ++j)
        if (g[j] != 0.0)
          out.push_back({x[static_cast<std::size_t>(p)] + static_cast<int>(j),
                         -g[j] * red.carry[n][j]});
    return out;
  };
  // Node cost S~_n(dx~_n) as terms plus offset.
  std::vector<std::vector<lp::Term>> node_cost(tree.size());
  std::vector<double> node_offset(tree.size(), 0.0);
  for (std::size_t n = 0; n < tree.size(); ++n)
    for (const auto &term : red.terms[n]) {
      if (term.size() == 1) {
        auto tt = trade(n, term.front().a);
        node_cost[n].insert(node_cost[n].end(), tt.begin(), tt.end());
        node_offset[n] += term.front().b;
        continue;
      }
      const int t = prog.add_free_column();
      node_cost[n].push_back({t, 1.0});
      for (const auto &piece : term) {
        auto row = trade(n, piece.a);
        row.push_back({t, -1.0});
        prog.add_row(std::move(row), lp::Relation::LessEqual, -piece.b);
      }
    }
  const auto extra = add_extra(prog);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    for (const auto &r : red.domain[n])
      prog.add_row(trade(n, r.g), lp::Relation::LessEqual, r.h);
    if (x[n] >= 0)
      for (const auto &r : red.constraint[n]) {
        std::vector<lp::Term> row;
        for (std::size_t j = 0; j < dim; ++j)
          if (r.g[j] != 0.0)
            row.push_back({x[n] + static_cast<int>(j), r.g[j]});
        prog.add_row(std::move(row), lp::Relation::LessEqual, r.h);
      }
  }
  for (int leaf : tree.nodes_at(tree.horizon())) {
    std::vector<lp::Term> row;
    double rhs = 0.0;
    for (int n = leaf; n >= 0; n = tree.parent(static_cast<std::size_t>(n))) {
      const auto u = static_cast<std::size_t>(n);
      row.insert(row.end(), node_cost[u].begin(), node_cost[u].end());
      if (!extra.empty())
        row.insert(row.end(), extra[u].begin(), extra[u].end());
      rhs -= c[u] + node_offset[u];
    }
    prog.add_row(std::move(row), lp::Relation::LessEqual, rhs);
  }
  return prog;
}

} // namespace detail

/// Membership in C using the numeraire-reduced formulation.
inline Membership membership_reduced(const NumeraireReduction &red,
                                     const ClaimProcess &c,
                                     const Tolerances &tol = default_tolerances()) {
  std::vector<int> x;
  const auto prog = detail::assemble_reduced(
      red, c, [](lp::LinearProgram &) { return std::vector<std::vector<lp::Term>>{}; },
      x);
  return lp::solve(prog, tol).status == lp::Status::Infeasible
             ? Membership::NotMember
             : Membership::Member;
}

/// pi(c) using the numeraire-reduced formulation (value only).
inline PriceResult superhedge_cost_reduced(const NumeraireReduction &red,
                                           const ClaimProcess &c,
                                           const ClaimProcess &p,
                                           const Tolerances &tol = default_tolerances()) {
  if (p.size() != red.tree.size())
    throw ShapeMismatch("premium does not match reduced model");
  if (p.is_zero())
    throw ZeroPremium("premium process is identically zero");
  int alpha = -1;
  std::vector<int> x;
  const auto prog = detail::assemble_reduced(
      red, c,
      [&](lp::LinearProgram &lp) {
        alpha = lp.add_free_column(1.0, "alpha");
        std::vector<std::vector<lp::Term>> extra(p.size());
        for (std::size_t n = 0; n < p.size(); ++n)
          if (p[n] != 0.0)
            extra[n].push_back({alpha, -p[n]});
        return extra;
      },
      x);
  const auto sol = lp::solve(prog, tol);
  PriceResult out;
  switch (sol.status) {
  case lp::Status::Optimal:
    out.status = PriceStatus::Finite;
    out.value = sol.primal[static_cast<std::size_t>(alpha)];
    break;
  case lp::Status::Unbounded:
    out.status = PriceStatus::MinusInfinity;
    out.value = -kInf;
    out.diagnosis = kMinusInfinityDiagnosis;
    break;
  case lp::Status::Infeasible:
    out.status = PriceStatus::PlusInfinity;
    out.value = kInf;
    break;
  }
  return out;
}

} // namespace superhedge
