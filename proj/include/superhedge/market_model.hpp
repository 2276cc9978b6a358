#pragma once

// Per-node polyhedral cost functions S_n and constraint sets D_n together
// with their convex-analytic derived objects.

#include "superhedge/errors.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace superhedge {

inline constexpr double kInf = lp::kInf;

/// a.x + b
struct AffinePiece {
  Vector a;
  double b = 0.0;
};

/// g.x <= h
struct Halfspace {
  Vector g;
  double h = 0.0;
};

namespace detail {

inline double dot(const Vector &a, const Vector &b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    s += a[j] * b[j];
  return s;
}

inline double inf_norm(const Vector &a) {
  double s = 0.0;
  for (double v : a)
    s = std::max(s, std::abs(v));
  return s;
}

inline void require_finite(const Vector &v, const char *what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw InvalidModel(std::string("non-finite entry in ") + what);
}

inline bool satisfies(const std::vector<Halfspace> &rows, const Vector &x,
                      bool homogeneous) {
  for (const auto &r : rows) {
    const double rhs = homogeneous ? 0.0 : r.h;
    const double tol =
        1e-12 * (1.0 + std::abs(rhs) + inf_norm(r.g) * inf_norm(x));
    if (dot(r.g, x) > rhs + tol)
      return false;
  }
  return true;
}

} // namespace detail

/// S(x) = sum over terms of max_k (a_k.x + b_k), +inf outside the domain
/// halfspaces. One term is the plain max-of-affine form; separable order
/// book costs use one term per asset.
class PolyhedralCost {
public:
  using Term = std::vector<AffinePiece>;

  PolyhedralCost(std::size_t dim, std::vector<Term> terms,
                 std::vector<Halfspace> domain = {})
      : dim_(dim), terms_(std::move(terms)), domain_(std::move(domain)) {
    validate();
  }

  static PolyhedralCost from_pieces(std::vector<AffinePiece> pieces,
                                    std::vector<Halfspace> domain = {}) {
    if (pieces.empty())
      throw InvalidModel("cost needs at least one affine piece");
    const std::size_t dim = pieces.front().a.size();
    return PolyhedralCost(dim, {std::move(pieces)}, std::move(domain));
  }

  /// S(x) = s.x
  static PolyhedralCost linear(const Vector &s) {
    return from_pieces({AffinePiece{s, 0.0}});
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Term> &terms() const { return terms_; }
  const std::vector<Halfspace> &domain() const { return domain_; }

  std::size_t num_pieces() const {
    std::size_t n = 0;
    for (const auto &t : terms_)
      n += t.size();
    return n;
  }

  /// Sublinear: every piece passes through the origin and the domain is a
  /// cone.
  bool positively_homogeneous() const {
    for (const auto &t : terms_)
      for (const auto &p : t)
        if (p.b != 0.0)
          return false;
    for (const auto &r : domain_)
      if (r.h != 0.0)
        return false;
    return true;
  }

  /// alpha * S(x / alpha); alpha > 1 deepens every ladder level.
  PolyhedralCost scaled(double alpha) const {
    if (!(alpha > 0.0))
      throw InvalidModel("cost scaling factor must be positive");
    auto terms = terms_;
    for (auto &t : terms)
      for (auto &p : t)
        p.b *= alpha;
    auto domain = domain_;
    for (auto &r : domain)
      r.h *= alpha;
    return PolyhedralCost(dim_, std::move(terms), std::move(domain));
  }

  friend bool operator==(const PolyhedralCost &x, const PolyhedralCost &y) {
    auto same_pieces = [](const Term &a, const Term &b) {
      if (a.size() != b.size())
        return false;
      for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].a != b[k].a || a[k].b != b[k].b)
          return false;
      return true;
    };
    if (x.dim_ != y.dim_ || x.terms_.size() != y.terms_.size() ||
        x.domain_.size() != y.domain_.size())
      return false;
    for (std::size_t t = 0; t < x.terms_.size(); ++t)
      if (!same_pieces(x.terms_[t], y.terms_[t]))
        return false;
    for (std::size_t i = 0; i < x.domain_.size(); ++i)
      if (x.domain_[i].g != y.domain_[i].g || x.domain_[i].h != y.domain_[i].h)
        return false;
    return true;
  }

private:
  void validate() {
    if (dim_ == 0)
      throw InvalidModel("cost over zero assets");
    if (terms_.empty())
      throw InvalidModel("cost without terms");
    for (auto &t : terms_) {
      if (t.empty())
        throw InvalidModel("cost term without pieces");
      double top = -kInf;
      for (auto &p : t) {
        if (p.a.size() != dim_)
          throw InvalidModel("piece dimension does not match asset count");
        detail::require_finite(p.a, "cost piece slope");
        if (!std::isfinite(p.b))
          throw InvalidModel("non-finite cost piece offset");
        const double tol = 1e-12 * (1.0 + detail::inf_norm(p.a));
        if (p.b > tol)
          throw InvalidModel("cost piece with positive offset: S(0) would exceed 0");
        if (p.b > 0.0)
          p.b = 0.0;
        top = std::max(top, p.b);
      }
      if (top < -1e-12)
        throw InvalidModel("cost term does not vanish at the origin");
      for (auto &p : t)
        if (p.b == top)
          p.b = 0.0;
    }
    for (const auto &r : domain_) {
      if (r.g.size() != dim_)
        throw InvalidModel("domain row dimension does not match asset count");
      detail::require_finite(r.g, "cost domain row");
      if (!(r.h >= 0.0) || !std::isfinite(r.h))
        throw InvalidModel("cost domain must contain the origin (h >= 0)");
    }
  }

  std::size_t dim_;
  std::vector<Term> terms_;
  std::vector<Halfspace> domain_;
};

/// D = {x | g_i.x <= h_i}, h_i >= 0.
class PolyhedralConstraint {
public:
  explicit PolyhedralConstraint(std::size_t dim, std::vector<Halfspace> rows = {})
      : dim_(dim), rows_(std::move(rows)) {
    for (const auto &r : rows_) {
      if (r.g.size() != dim_)
        throw InvalidModel("constraint row dimension does not match asset count");
      detail::require_finite(r.g, "constraint row");
      if (!(r.h >= 0.0) || !std::isfinite(r.h))
        throw InvalidModel("constraint set must contain the origin (h >= 0)");
    }
  }

  static PolyhedralConstraint unconstrained(std::size_t dim) {
    return PolyhedralConstraint(dim);
  }

  /// lower <= x <= upper componentwise; infinite entries drop the row.
  static PolyhedralConstraint box(const Vector &lower, const Vector &upper) {
    std::vector<Halfspace> rows;
    const std::size_t dim = lower.size();
    for (std::size_t j = 0; j < dim; ++j) {
      Vector e(dim, 0.0);
      if (std::isfinite(upper[j])) {
        e[j] = 1.0;
        rows.push_back({e, upper[j]});
      }
      if (std::isfinite(lower[j])) {
        e[j] = -1.0;
        rows.push_back({e, -lower[j]});
      }
    }
    return PolyhedralConstraint(dim, std::move(rows));
  }

  /// {x | x >= floor}
  static PolyhedralConstraint lower_bounds(const Vector &floor) {
    return box(floor, Vector(floor.size(), kInf));
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Halfspace> &rows() const { return rows_; }

  bool conical() const {
    for (const auto &r : rows_)
      if (r.h != 0.0)
        return false;
    return true;
  }

  bool contains(const Vector &x) const {
    return detail::satisfies(rows_, x, false);
  }

  friend bool operator==(const PolyhedralConstraint &x,
                         const PolyhedralConstraint &y) {
    if (x.dim_ != y.dim_ || x.rows_.size() != y.rows_.size())
      return false;
    for (std::size_t i = 0; i < x.rows_.size(); ++i)
      if (x.rows_[i].g != y.rows_[i].g || x.rows_[i].h != y.rows_[i].h)
        return false;
    return true;
  }

private:
  std::size_t dim_;
  std::vector<Halfspace> rows_;
};

/// Tree + assets + per-node cost and constraint. `carry` optionally
/// revalues holdings between dates: the trade at node n is
/// x_n - carry_n * x_parent (componentwise); it is 1 unless the model was
/// rewritten in market values.
class MarketModel {
public:
  MarketModel(ScenarioTree tree, std::vector<std::string> assets,
              std::vector<PolyhedralCost> costs,
              std::vector<PolyhedralConstraint> constraints,
              std::vector<Vector> carry = {})
      : tree_(std::move(tree)), assets_(std::move(assets)),
        costs_(std::move(costs)), constraints_(std::move(constraints)),
        carry_(std::move(carry)) {
    const std::size_t n = tree_.size();
    const std::size_t dim = assets_.size();
    if (dim == 0)
      throw InvalidModel("model without assets");
    if (costs_.size() != n || constraints_.size() != n)
      throw InvalidModel("cost and constraint must be given at every node");
    for (std::size_t i = 0; i < n; ++i) {
      if (costs_[i].dim() != dim || constraints_[i].dim() != dim)
        throw InvalidModel("dimension mismatch at node '" + tree_.id(i) + "'");
    }
    if (!carry_.empty()) {
      if (carry_.size() != n)
        throw InvalidModel("carry factors must be given at every node");
      for (const auto &c : carry_) {
        if (c.size() != dim)
          throw InvalidModel("carry factor dimension mismatch");
        for (double v : c)
          if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidModel("carry factors must be positive");
      }
    }
    ones_.assign(dim, 1.0);
  }

  const ScenarioTree &tree() const { return tree_; }
  const std::vector<std::string> &assets() const { return assets_; }
  std::size_t dim() const { return assets_.size(); }
  const PolyhedralCost &cost(std::size_t n) const { return costs_[n]; }
  const PolyhedralConstraint &constraint(std::size_t n) const {
    return constraints_[n];
  }
  const std::vector<PolyhedralCost> &costs() const { return costs_; }
  const std::vector<PolyhedralConstraint> &constraints() const {
    return constraints_;
  }
  bool has_carry() const { return !carry_.empty(); }
  const Vector &carry(std::size_t n) const {
    return carry_.empty() ? ones_ : carry_[n];
  }
  const std::vector<Vector> &carry_factors() const { return carry_; }

  /// Every cost positively homogeneous.
  bool sublinear() const {
    return std::all_of(costs_.begin(), costs_.end(),
                       [](const auto &c) { return c.positively_homogeneous(); });
  }
  /// Every constraint a cone.
  bool conical() const {
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [](const auto &d) { return d.conical(); });
  }

  /// alpha * S(x / alpha) at every node; constraints unchanged.
  MarketModel with_scaled_costs(double alpha) const {
    std::vector<PolyhedralCost> costs;
    for (const auto &c : costs_)
      costs.push_back(c.scaled(alpha));
    return MarketModel(tree_, assets_, std::move(costs), constraints_, carry_);
  }

private:
  ScenarioTree tree_;
  std::vector<std::string> assets_;
  std::vector<PolyhedralCost> costs_;
  std::vector<PolyhedralConstraint> constraints_;
  std::vector<Vector> carry_;
  Vector ones_;
};

// ---------------------------------------------------------------------------
// Order books.

struct LadderLevel {
  double price;
  double depth; // may be +inf
};

struct AssetLadder {
  std::vector<LadderLevel> asks; // best first
  std::vector<LadderLevel> bids; // best first
};

/// Separable cost of executing market orders against the given books:
/// buying walks up the asks, selling walks down the bids, and trading
/// beyond the quoted depth is impossible.
inline PolyhedralCost cost_from_ladder(std::span<const AssetLadder> books) {
  const std::size_t dim = books.size();
  if (dim == 0)
    throw InvalidModel("ladder cost needs at least one asset");
  std::vector<PolyhedralCost::Term> terms;
  std::vector<Halfspace> domain;
  for (std::size_t j = 0; j < dim; ++j) {
    const auto &book = books[j];
    auto check_side = [&](const std::vector<LadderLevel> &side, bool ask) {
      for (std::size_t l = 0; l < side.size(); ++l) {
        if (!(side[l].price > 0.0) || !std::isfinite(side[l].price))
          throw InvalidModel("ladder price must be positive and finite");
        if (!(side[l].depth > 0.0))
          throw InvalidModel("ladder depth must be positive");
        if (std::isinf(side[l].depth) && l + 1 < side.size())
          throw NonMonotoneLadder("level with unlimited depth must be last");
        if (l > 0) {
          const bool worse = ask ? side[l].price >= side[l - 1].price
                                 : side[l].price <= side[l - 1].price;
          if (!worse)
            throw NonMonotoneLadder(std::string(ask ? "ask" : "bid") +
                                    " prices must worsen with depth for asset " +
                                    std::to_string(j));
        }
      }
    };
    check_side(book.asks, true);
    check_side(book.bids, false);
    if (!book.asks.empty() && !book.bids.empty() &&
        book.bids.front().price > book.asks.front().price)
      throw CrossedBook("best bid " + std::to_string(book.bids.front().price) +
                        " above best ask " +
                        std::to_string(book.asks.front().price) + " for asset " +
                        std::to_string(j));
    PolyhedralCost::Term term;
    Vector e(dim, 0.0);
    // Buying: piece l supports the cost on [B_{l-1}, B_l].
    double filled = 0.0, spent = 0.0;
    for (const auto &lvl : book.asks) {
      e[j] = lvl.price;
      term.push_back({e, spent - lvl.price * filled});
      filled += lvl.depth;
      spent += lvl.price * lvl.depth;
    }
    if (book.asks.empty()) {
      e[j] = 1.0;
      domain.push_back({e, 0.0});
    } else if (std::isfinite(filled)) {
      e[j] = 1.0;
      domain.push_back({e, filled});
    }
    // Selling |z|: proceeds are negative cost.
    double sold = 0.0, received = 0.0;
    for (const auto &lvl : book.bids) {
      e[j] = lvl.price;
      term.push_back({e, lvl.price * sold - received});
      sold += lvl.depth;
      received += lvl.price * lvl.depth;
    }
    if (book.bids.empty()) {
      e[j] = -1.0;
      domain.push_back({e, 0.0});
    } else if (std::isfinite(sold)) {
      e[j] = -1.0;
      domain.push_back({e, sold});
    }
    if (term.empty()) {
      e[j] = 0.0;
      term.push_back({e, 0.0});
    }
    terms.push_back(std::move(term));
  }
  return PolyhedralCost(dim, std::move(terms), std::move(domain));
}

// ---------------------------------------------------------------------------
// Evaluation and derived objects.

inline double eval_cost(const PolyhedralCost &s, const Vector &x) {
  if (x.size() != s.dim())
    throw ShapeMismatch("cost argument has wrong dimension");
  if (!detail::satisfies(s.domain(), x, false))
    return kInf;
  double total = 0.0;
  for (const auto &t : s.terms()) {
    double best = -kInf;
    for (const auto &p : t)
      best = std::max(best, detail::dot(p.a, x) + p.b);
    total += best;
  }
  return total;
}

/// S^inf(x) = sup_{alpha > 0} alpha S(x / alpha).
inline double recession_cost(const PolyhedralCost &s, const Vector &x) {
  if (x.size() != s.dim())
    throw ShapeMismatch("cost argument has wrong dimension");
  if (!detail::satisfies(s.domain(), x, true))
    return kInf;
  double total = 0.0;
  for (const auto &t : s.terms()) {
    double best = -kInf;
    for (const auto &p : t)
      best = std::max(best, detail::dot(p.a, x));
    total += best;
  }
  return total;
}

/// The subdifferential of S at the origin, written as
/// conv(generators) + cone(normal_rays). The generators are the sums of
/// one active piece slope (b = 0) per term; the rays are the normals of
/// domain rows active at the origin.
struct MarginalPriceSet {
  std::vector<Vector> generators;
  std::vector<Vector> normal_rays;
};

inline MarginalPriceSet marginal_price_set(const PolyhedralCost &s) {
  auto dedup = [](std::vector<Vector> pts) {
    std::vector<Vector> out;
    for (auto &p : pts) {
      bool dup = false;
      for (const auto &q : out) {
        double d = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
          d = std::max(d, std::abs(p[j] - q[j]));
        if (d <= 1e-12) {
          dup = true;
          break;
        }
      }
      if (!dup)
        out.push_back(std::move(p));
    }
    return out;
  };
  std::vector<Vector> sums{Vector(s.dim(), 0.0)};
  for (const auto &t : s.terms()) {
    std::vector<Vector> active;
    for (const auto &p : t)
      if (p.b == 0.0)
        active.push_back(p.a);
    active = dedup(std::move(active));
    std::vector<Vector> next;
    for (const auto &base : sums)
      for (const auto &a : active) {
        Vector v = base;
        for (std::size_t j = 0; j < v.size(); ++j)
          v[j] += a[j];
        next.push_back(std::move(v));
      }
    sums = dedup(std::move(next));
  }
  MarginalPriceSet out;
  out.generators = std::move(sums);
  for (const auto &r : s.domain())
    if (r.h == 0.0)
      out.normal_rays.push_back(r.g);
  return out;
}

/// (yS)^*(v) = sup_x { x.v - y S(x) }, as an LP over the epigraph of yS.
inline double conjugate_cost(const PolyhedralCost &s, double y, const Vector &v,
                             const Tolerances &tol = default_tolerances()) {
  if (y < 0.0)
    throw NegativeDeflator("conjugate needs y >= 0, got " + std::to_string(y));
  if (v.size() != s.dim())
    throw ShapeMismatch("conjugate argument has wrong dimension");
  lp::LinearProgram prog(lp::Sense::Maximize);
  std::vector<int> x;
  for (std::size_t j = 0; j < s.dim(); ++j)
    x.push_back(prog.add_free_column(v[j]));
  for (const auto &term : s.terms()) {
    const int t = prog.add_free_column(-y);
    for (const auto &p : term) {
      std::vector<lp::Term> row{{t, -1.0}};
      for (std::size_t j = 0; j < s.dim(); ++j)
        if (p.a[j] != 0.0)
          row.push_back({x[j], p.a[j]});
      prog.add_row(std::move(row), lp::Relation::LessEqual, -p.b);
    }
  }
  for (const auto &r : s.domain()) {
    std::vector<lp::Term> row;
    for (std::size_t j = 0; j < s.dim(); ++j)
      if (r.g[j] != 0.0)
        row.push_back({x[j], r.g[j]});
    prog.add_row(std::move(row), lp::Relation::LessEqual, r.h);
  }
  const auto sol = lp::solve(prog, tol);
  if (sol.status == lp::Status::Unbounded)
    return kInf;
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("conjugate LP infeasible although x = 0 is feasible");
  return std::max(sol.objective, 0.0);
}

/// sigma_D(v) = sup { v.x | x in D }.
inline double constraint_support(const PolyhedralConstraint &d, const Vector &v,
                                 const Tolerances &tol = default_tolerances()) {
  if (v.size() != d.dim())
    throw ShapeMismatch("support argument has wrong dimension");
  lp::LinearProgram prog(lp::Sense::Maximize);
  std::vector<int> x;
  for (std::size_t j = 0; j < d.dim(); ++j)
    x.push_back(prog.add_free_column(v[j]));
  for (const auto &r : d.rows()) {
    std::vector<lp::Term> row;
    for (std::size_t j = 0; j < d.dim(); ++j)
      if (r.g[j] != 0.0)
        row.push_back({x[j], r.g[j]});
    prog.add_row(std::move(row), lp::Relation::LessEqual, r.h);
  }
  const auto sol = lp::solve(prog, tol);
  if (sol.status == lp::Status::Unbounded)
    return kInf;
  if (sol.status != lp::Status::Optimal)
    throw NumericalFailure("support LP infeasible although 0 is in D");
  return std::max(sol.objective, 0.0);
}

/// D^inf = {x | g_i.x <= 0}.
inline PolyhedralConstraint recession_cone(const PolyhedralConstraint &d) {
  auto rows = d.rows();
  for (auto &r : rows)
    r.h = 0.0;
  return PolyhedralConstraint(d.dim(), std::move(rows));
}

/// Generators of the polar cone D* = cone{g_i} of a conical D. An empty
/// list is the cone {0}.
inline std::vector<Vector> polar_cone(const PolyhedralConstraint &d) {
  if (!d.conical())
    throw PolarOfNonCone("constraint has rows with h > 0; use constraint_support");
  std::vector<Vector> gens;
  for (const auto &r : d.rows())
    gens.push_back(r.g);
  return gens;
}

// ---------------------------------------------------------------------------
// Model transforms.

namespace detail {

inline PolyhedralCost rescale_cost(const PolyhedralCost &s, const Vector &f) {
  auto terms = s.terms();
  for (auto &t : terms)
    for (auto &p : t)
      for (std::size_t j = 0; j < f.size(); ++j)
        p.a[j] *= f[j];
  auto domain = s.domain();
  for (auto &r : domain)
    for (std::size_t j = 0; j < f.size(); ++j)
      r.g[j] *= f[j];
  return PolyhedralCost(s.dim(), std::move(terms), std::move(domain));
}

inline PolyhedralConstraint rescale_constraint(const PolyhedralConstraint &d,
                                               const Vector &f) {
  auto rows = d.rows();
  for (auto &r : rows)
    for (std::size_t j = 0; j < f.size(); ++j)
      r.g[j] *= f[j];
  return PolyhedralConstraint(d.dim(), std::move(rows));
}

inline MarketModel change_units(const MarketModel &model,
                                const PortfolioProcess &s, bool forward) {
  const auto &tree = model.tree();
  if (s.size() != tree.size() || s.dim() != model.dim())
    throw ShapeMismatch("price process does not match model");
  for (std::size_t n = 0; n < tree.size(); ++n)
    for (double v : s[n])
      if (!(v > 0.0) || !std::isfinite(v))
        throw NonpositivePrice("price " + std::to_string(v) + " at node '" +
                               tree.id(n) + "'");
  std::vector<PolyhedralCost> costs;
  std::vector<PolyhedralConstraint> constraints;
  std::vector<Vector> carry;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    Vector f(model.dim());
    for (std::size_t j = 0; j < f.size(); ++j)
      f[j] = forward ? 1.0 / s[n][j] : s[n][j];
    costs.push_back(rescale_cost(model.cost(n), f));
    constraints.push_back(rescale_constraint(model.constraint(n), f));
    Vector r = model.carry(n);
    const int p = tree.parent(n);
    if (p >= 0)
      for (std::size_t j = 0; j < r.size(); ++j)
        r[j] = forward ? r[j] * s[n][j] / s[static_cast<std::size_t>(p)][j]
                       : r[j] * s[static_cast<std::size_t>(p)][j] / s[n][j];
    carry.push_back(std::move(r));
  }
  bool trivial = true;
  for (const auto &r : carry)
    for (double v : r)
      trivial = trivial && v == 1.0;
  if (trivial)
    carry.clear();
  return MarketModel(tree, model.assets(), std::move(costs),
                     std::move(constraints), std::move(carry));
}

} // namespace detail

/// Rewrites the model in market values h = s * x (componentwise):
/// phi_n(u) = S_n(u / s_n), D'_n = s_n D_n, and holdings are revalued by
/// s_n / s_parent between dates. Superhedging values are unchanged.
inline MarketModel to_market_values(const MarketModel &model,
                                    const PortfolioProcess &s) {
  return detail::change_units(model, s, true);
}

/// Inverse of to_market_values for the same price process.
inline MarketModel from_market_values(const MarketModel &model,
                                      const PortfolioProcess &s) {
  return detail::change_units(model, s, false);
}

/// Hedging problem left after eliminating a perfectly liquid, unconstrained
/// numeraire asset: find x~ with x~_n in D~_n such that along every path
/// sum_t S~_t(dx~_t) + sum_t c_t <= 0.
struct NumeraireReduction {
  ScenarioTree tree;
  std::size_t numeraire = 0;
  std::vector<std::string> assets; // remaining assets
  std::vector<std::vector<PolyhedralCost::Term>> terms; // per node, reduced
  std::vector<std::vector<Halfspace>> domain;           // per node, reduced
  std::vector<std::vector<Halfspace>> constraint;       // per node, reduced
  std::vector<Vector> carry;                            // per node, reduced
  std::size_t dim() const { return assets.size(); }
};

inline NumeraireReduction reduce_with_numeraire(const MarketModel &model,
                                                std::size_t numeraire = 0) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  if (numeraire >= dim)
    throw NoNumeraire("numeraire index out of range");
  auto drop = [&](const Vector &v) {
    Vector out;
    for (std::size_t j = 0; j < dim; ++j)
      if (j != numeraire)
        out.push_back(v[j]);
    return out;
  };
  NumeraireReduction red;
  red.tree = tree;
  red.numeraire = numeraire;
  for (std::size_t j = 0; j < dim; ++j)
    if (j != numeraire)
      red.assets.push_back(model.assets()[j]);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const auto &cost = model.cost(n);
    double unit = 0.0;
    std::vector<PolyhedralCost::Term> terms;
    for (const auto &t : cost.terms()) {
      const double k = t.front().a[numeraire];
      PolyhedralCost::Term reduced;
      for (const auto &p : t) {
        if (p.a[numeraire] != k)
          throw NoNumeraire("numeraire enters a cost term nonlinearly at node '" +
                            tree.id(n) + "'");
        reduced.push_back({drop(p.a), p.b});
      }
      unit += k;
      terms.push_back(std::move(reduced));
    }
    if (std::abs(unit - 1.0) > 1e-12)
      throw NoNumeraire("numeraire unit cost is " + std::to_string(unit) +
                        " at node '" + tree.id(n) + "'");
    std::vector<Halfspace> dom, con;
    for (const auto &r : cost.domain()) {
      if (r.g[numeraire] != 0.0)
        throw NoNumeraire("cost domain restricts the numeraire");
      dom.push_back({drop(r.g), r.h});
    }
    for (const auto &r : model.constraint(n).rows()) {
      if (r.g[numeraire] != 0.0)
        throw NoNumeraire("portfolio constraint restricts the numeraire at node '" +
                          tree.id(n) + "'");
      con.push_back({drop(r.g), r.h});
    }
    if (model.carry(n)[numeraire] != 1.0)
      throw NoNumeraire("numeraire holdings are revalued between dates");
    red.terms.push_back(std::move(terms));
    red.domain.push_back(std::move(dom));
    red.constraint.push_back(std::move(con));
    red.carry.push_back(drop(model.carry(n)));
  }
  return red;
}

} // namespace superhedge
