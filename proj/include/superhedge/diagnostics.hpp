#pragma once

// Checks of the sufficient conditions for C to be closed: trivial
// intersection of the recession cone of D with the sublevel set of the
// recession cost, and the existence of a strictly positive market price
// process. Plus a harness comparing membership under inner and outer
// approximations of the constraints.

#include "superhedge/hedging.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/market_model.hpp"
#include "superhedge/scenario_tree.hpp"
#include "superhedge/tolerances.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace superhedge {

struct NodeClosedness {
  bool satisfied = true;
  std::optional<Vector> direction; // nonzero x in the cone when violated
};

struct ClosednessReport {
  std::vector<NodeClosedness> nodes;
  bool satisfied = true;
  int first_violation_time = -1;
};

namespace detail {

inline std::vector<lp::Term> dense_terms(int first, const Vector &g) {
  std::vector<lp::Term> out;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g[j] != 0.0)
      out.push_back({first + static_cast<int>(j), g[j]});
  return out;
}

/// K = D^inf cap {x | S^inf(x) <= 0} cap [-1, 1]^J, with one epigraph
/// variable per cost term. Returns the LP and the first x column.
inline lp::LinearProgram closedness_lp(const PolyhedralCost &cost,
                                       const PolyhedralConstraint &d, int &x) {
  const std::size_t dim = cost.dim();
  lp::LinearProgram prog(lp::Sense::Maximize);
  x = 0;
  for (std::size_t j = 0; j < dim; ++j)
    prog.add_column(-1.0, 1.0);
  std::vector<lp::Term> total;
  for (const auto &term : cost.terms()) {
    const int t = prog.add_free_column();
    total.push_back({t, 1.0});
    for (const auto &piece : term) {
      auto row = dense_terms(x, piece.a);
      row.push_back({t, -1.0});
      prog.add_row(std::move(row), lp::Relation::LessEqual, 0.0);
    }
  }
  if (!total.empty())
    prog.add_row(std::move(total), lp::Relation::LessEqual, 0.0);
  for (const auto &r : cost.domain())
    prog.add_row(dense_terms(x, r.g), lp::Relation::LessEqual, 0.0);
  for (const auto &r : d.rows())
    prog.add_row(dense_terms(x, r.g), lp::Relation::LessEqual, 0.0);
  return prog;
}

} // namespace detail

/// Per node, whether D^inf_n cap {x | S^inf_n(x) <= 0} = {0}, decided by
/// maximizing +-x_j over the cone cut to the unit box. Terminal holdings are
/// fixed to 0, so terminal nodes hold trivially.
inline ClosednessReport closedness_condition(const MarketModel &model,
                                             const Tolerances &tol = default_tolerances()) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  ClosednessReport out;
  out.nodes.resize(tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (tree.is_terminal(n))
      continue;
    int x = 0;
    auto prog = detail::closedness_lp(model.cost(n), model.constraint(n), x);
    for (std::size_t j = 0; j < dim && out.nodes[n].satisfied; ++j)
      for (double sign : {1.0, -1.0}) {
        for (std::size_t k = 0; k < dim; ++k)
          prog.set_cost(x + static_cast<int>(k), k == j ? sign : 0.0);
        const auto sol = lp::solve(prog, tol);
        if (sol.status != lp::Status::Optimal)
          throw NumericalFailure("closedness LP is feasible at 0 and bounded");
        if (sol.objective > tol.positivity) {
          out.nodes[n].satisfied = false;
          out.nodes[n].direction =
              Vector(sol.primal.begin() + x, sol.primal.begin() + x + static_cast<int>(dim));
          break;
        }
      }
    if (!out.nodes[n].satisfied && out.satisfied) {
      out.satisfied = false;
      out.first_violation_time = tree.time(n);
    }
  }
  return out;
}

struct PositivePriceReport {
  bool exists = false;               // every node has epsilon > threshold
  std::vector<double> epsilon;       // per node, capped at 1
  PortfolioProcess prices;           // maximizing s_n in dS_n(0)
  bool recession_nonnegative = true; // D^inf_n in R^J_+ at non-terminal nodes
  std::vector<bool> recession_by_node;
};

/// Per node, max epsilon <= 1 with s in dS_n(0) and s >= epsilon; and per
/// non-terminal node whether D^inf_n lies in the nonnegative orthant.
inline PositivePriceReport positive_price_exists(const MarketModel &model,
                                                 const Tolerances &tol = default_tolerances(),
                                                 double threshold = 1e-9) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  PositivePriceReport out;
  out.epsilon.assign(tree.size(), 0.0);
  out.prices = PortfolioProcess(tree.size(), dim);
  out.recession_by_node.assign(tree.size(), true);
  out.exists = true;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const auto &cost = model.cost(n);
    lp::LinearProgram prog(lp::Sense::Maximize);
    const int eps = prog.add_column(-kInf, 1.0, 1.0, "eps");
    const int s = prog.num_columns();
    for (std::size_t j = 0; j < dim; ++j)
      prog.add_free_column();
    // s = sum lambda a + sum mu g over pieces and domain rows active at 0.
    std::vector<std::vector<lp::Term>> srow(dim);
    for (std::size_t j = 0; j < dim; ++j)
      srow[j].push_back({s + static_cast<int>(j), 1.0});
    for (const auto &term : cost.terms()) {
      double top = -kInf;
      for (const auto &piece : term)
        top = std::max(top, piece.b);
      std::vector<lp::Term> mass;
      for (const auto &piece : term) {
        if (piece.b < top)
          continue;
        const int l = prog.add_column(0.0, kInf);
        mass.push_back({l, 1.0});
        for (std::size_t j = 0; j < dim; ++j)
          if (piece.a[j] != 0.0)
            srow[j].push_back({l, -piece.a[j]});
      }
      prog.add_row(std::move(mass), lp::Relation::Equal, 1.0);
    }
    for (const auto &r : cost.domain()) {
      if (r.h > 0.0)
        continue;
      const int m = prog.add_column(0.0, kInf);
      for (std::size_t j = 0; j < dim; ++j)
        if (r.g[j] != 0.0)
          srow[j].push_back({m, -r.g[j]});
    }
    for (std::size_t j = 0; j < dim; ++j) {
      prog.add_row(std::move(srow[j]), lp::Relation::Equal, 0.0);
      prog.add_row({{eps, 1.0}, {s + static_cast<int>(j), -1.0}},
                   lp::Relation::LessEqual, 0.0);
    }
    const auto sol = lp::solve(prog, tol);
    if (sol.status != lp::Status::Optimal)
      throw NumericalFailure("positive price LP at node '" + tree.id(n) + "'");
    out.epsilon[n] = sol.objective;
    for (std::size_t j = 0; j < dim; ++j)
      out.prices[n][j] = sol.primal[static_cast<std::size_t>(s) + j];
    if (!(sol.objective > threshold))
      out.exists = false;

    if (tree.is_terminal(n))
      continue;
    // min x_j over D^inf cap [-1, 1]^J must be 0 for every j.
    lp::LinearProgram cone;
    for (std::size_t j = 0; j < dim; ++j)
      cone.add_column(-1.0, 1.0);
    for (const auto &r : model.constraint(n).rows())
      cone.add_row(detail::dense_terms(0, r.g), lp::Relation::LessEqual, 0.0);
    for (std::size_t j = 0; j < dim && out.recession_by_node[n]; ++j) {
      for (std::size_t k = 0; k < dim; ++k)
        cone.set_cost(static_cast<int>(k), k == j ? 1.0 : 0.0);
      const auto c = lp::solve(cone, tol);
      if (c.status != lp::Status::Optimal)
        throw NumericalFailure("recession cone LP is feasible at 0 and bounded");
      if (c.objective < -tol.positivity)
        out.recession_by_node[n] = false;
    }
    out.recession_nonnegative = out.recession_nonnegative && out.recession_by_node[n];
  }
  return out;
}

/// Inner (subset) and outer (superset) polyhedral versions of the same
/// constrained model; `inner` is a refinement schedule labelled by its
/// approximation parameter.
struct ApproximationFamily {
  MarketModel outer;
  std::vector<std::pair<double, MarketModel>> inner;
};

struct NonclosednessReport {
  Membership outer = Membership::NotMember;
  std::vector<std::pair<double, Membership>> inner;
  // Outer accepts and every inner rejects: c sits on the boundary of C but
  // only in the closure of the inner sets.
  bool persistent_gap = false;
};

inline NonclosednessReport nonclosedness_witness(const ApproximationFamily &family,
                                                 const ClaimProcess &c,
                                                 const Tolerances &tol = default_tolerances()) {
  NonclosednessReport out;
  out.outer = membership(family.outer, c, tol).status;
  bool all_reject = !family.inner.empty();
  for (const auto &[param, m] : family.inner) {
    const auto r = membership(m, c, tol).status;
    out.inner.emplace_back(param, r);
    all_reject = all_reject && r == Membership::NotMember;
  }
  out.persistent_gap = out.outer == Membership::Member && all_reject;
  return out;
}

} // namespace superhedge
