#pragma once

// Dual side: the support function of C, deflators read off the pricing LP,
// the dual pricing LP, polar-cone membership in conical models and the
// martingale diagnostics built on them.
//
// For a deflator y >= 0 the support function is
//   sigma(y) = inf_v sum_n P_n (y_n S_n)^*(v_n)
//            + sum_{n non-terminal} P_n sigma_{D_n}(E[R v | n] - v_n),
// where E[R v | n] averages carry-adjusted child values. Both integrands are
// polyhedral, so the infimum is one LP in v and the multipliers that
// represent the conjugate and the support function.

#include "superhedge/errors.hpp"
#include "superhedge/hedging.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/market_model.hpp"
#include "superhedge/scenario_tree.hpp"
#include "superhedge/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace superhedge {

namespace detail {

/// Column layout of the sigma LP. When `y` is a variable block, `y_col[n]`
/// is its column; otherwise -1.
struct SigmaLayout {
  lp::LinearProgram lp{lp::Sense::Minimize};
  std::vector<int> v;     // first v column per node
  std::vector<int> y_col; // deflator column per node, -1 when fixed
};

/// Rows of the sigma LP. `y` fixes the deflator; when null the deflator is
/// a nonnegative variable block and the objective is left to the caller
/// (the sigma part is added with weight `sigma_weight`).
inline SigmaLayout assemble_sigma(const MarketModel &model, const ClaimProcess *y,
                                  double sigma_weight = 1.0) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  SigmaLayout s;
  s.v.assign(tree.size(), -1);
  s.y_col.assign(tree.size(), -1);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    s.v[n] = s.lp.num_columns();
    for (std::size_t j = 0; j < dim; ++j)
      s.lp.add_free_column(0.0, "v_" + tree.id(n) + "_" + model.assets()[j]);
    if (!y)
      s.y_col[n] = s.lp.add_column(0.0, kInf, 0.0, "y_" + tree.id(n));
  }
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const double w = sigma_weight * tree.prob(n);
    const auto &cost = model.cost(n);
    // v_n = sum lambda a + sum mu g, sum_q lambda_q = y_n per term.
    std::vector<std::vector<lp::Term>> vrow(dim);
    for (std::size_t j = 0; j < dim; ++j)
      vrow[j].push_back({s.v[n] + static_cast<int>(j), 1.0});
    for (std::size_t k = 0; k < cost.terms().size(); ++k) {
      std::vector<lp::Term> mass;
      for (const auto &piece : cost.terms()[k]) {
        const int l = s.lp.add_column(0.0, kInf, -w * piece.b);
        mass.push_back({l, 1.0});
        for (std::size_t j = 0; j < dim; ++j)
          if (piece.a[j] != 0.0)
            vrow[j].push_back({l, -piece.a[j]});
      }
      double rhs = 0.0;
      if (y)
        rhs = (*y)[n];
      else
        mass.push_back({s.y_col[n], -1.0});
      s.lp.add_row(std::move(mass), lp::Relation::Equal, rhs,
                   "mass_" + tree.id(n) + "_" + std::to_string(k));
    }
    for (const auto &r : cost.domain()) {
      const int m = s.lp.add_column(0.0, kInf, w * r.h);
      for (std::size_t j = 0; j < dim; ++j)
        if (r.g[j] != 0.0)
          vrow[j].push_back({m, -r.g[j]});
    }
    for (std::size_t j = 0; j < dim; ++j)
      s.lp.add_row(std::move(vrow[j]), lp::Relation::Equal, 0.0,
                   "conj_" + tree.id(n) + "_" + std::to_string(j));
    if (tree.is_terminal(n))
      continue;
    // E[R v | n] - v_n = sum rho g over the rows of D_n.
    std::vector<std::vector<lp::Term>> drow(dim);
    for (int m : tree.children(n)) {
      const auto u = static_cast<std::size_t>(m);
      const double q = tree.prob(u) / tree.prob(n);
      for (std::size_t j = 0; j < dim; ++j)
        drow[j].push_back({s.v[u] + static_cast<int>(j), q * model.carry(u)[j]});
    }
    for (std::size_t j = 0; j < dim; ++j)
      drow[j].push_back({s.v[n] + static_cast<int>(j), -1.0});
    for (const auto &r : model.constraint(n).rows()) {
      const int rho = s.lp.add_column(0.0, kInf, w * r.h);
      for (std::size_t j = 0; j < dim; ++j)
        if (r.g[j] != 0.0)
          drow[j].push_back({rho, -r.g[j]});
    }
    for (std::size_t j = 0; j < dim; ++j)
      s.lp.add_row(std::move(drow[j]), lp::Relation::Equal, 0.0,
                   "polar_" + tree.id(n) + "_" + std::to_string(j));
  }
  return s;
}

inline PortfolioProcess read_v(const SigmaLayout &s, std::size_t dim,
                               const std::vector<double> &primal) {
  PortfolioProcess v(s.v.size(), dim);
  for (std::size_t n = 0; n < s.v.size(); ++n)
    for (std::size_t j = 0; j < dim; ++j)
      v[n][j] = primal[static_cast<std::size_t>(s.v[n]) + j];
  return v;
}

inline void check_deflator(const MarketModel &model, const ClaimProcess &y) {
  check_claim(model, y, "deflator");
}

} // namespace detail

struct SupportResult {
  double value = kInf;
  PortfolioProcess v; // attaining dual process when finite
};

/// sigma_C(y) = sup { E sum c_n y_n | c in C }, computed through the dual
/// representation. +inf when y has a negative entry or the LP is
/// infeasible.
inline SupportResult support_function_C1(const MarketModel &model,
                                         const ClaimProcess &y,
                                         const Tolerances &tol = default_tolerances()) {
  detail::check_deflator(model, y);
  SupportResult out;
  for (double v : y.values())
    if (v < 0.0)
      return out;
  const auto s = detail::assemble_sigma(model, &y);
  const auto sol = lp::solve(s.lp, tol);
  if (sol.status == lp::Status::Infeasible)
    return out;
  if (sol.status == lp::Status::Unbounded)
    throw NumericalFailure("support LP unbounded below although sigma >= 0");
  out.value = std::max(sol.objective, 0.0);
  out.v = detail::read_v(s, model.dim(), sol.primal);
  return out;
}

/// Dual certificate for a finite price: deflator y, dual process v and the
/// support value sigma(y), with pairing(c, y) - sigma(y) = pi(c).
struct DualCertificate {
  ClaimProcess y;
  PortfolioProcess v;
  double sigma = 0.0;            // sigma(y) from the support LP
  double sigma_multipliers = 0.0; // the same value read off the multipliers
  double price = 0.0;            // pi(c) from the primal LP
  double value = 0.0;            // pairing(c, y) - sigma
  double normalization = 0.0;    // pairing(p, y)
  double gap = 0.0;              // |value - price|
  // v_n / y_n where y_n > 0: marginal prices consistent with y.
  std::vector<std::optional<Vector>> prices;
  std::optional<double> dual_lp_value; // independent dual LP, when requested
};

/// Value of the dual pricing problem
///   sup { pairing(c, y) - sigma(y) | y >= 0, pairing(p, y) = 1 },
/// solved as one LP in (y, v, multipliers).
inline PriceResult dual_price(const MarketModel &model, const ClaimProcess &c,
                              const ClaimProcess &p,
                              const Tolerances &tol = default_tolerances()) {
  detail::check_claim(model, c, "claim");
  detail::check_claim(model, p, "premium");
  if (p.is_zero())
    throw ZeroPremium("premium process is identically zero");
  const auto &tree = model.tree();
  auto s = detail::assemble_sigma(model, nullptr);
  std::vector<lp::Term> norm;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    s.lp.set_cost(s.y_col[n], -tree.prob(n) * c[n]);
    if (p[n] != 0.0)
      norm.push_back({s.y_col[n], tree.prob(n) * p[n]});
  }
  s.lp.add_row(std::move(norm), lp::Relation::Equal, 1.0, "normalization");
  const auto sol = lp::solve(s.lp, tol);
  PriceResult out;
  switch (sol.status) {
  case lp::Status::Optimal:
    out.status = PriceStatus::Finite;
    out.value = -sol.objective;
    break;
  case lp::Status::Unbounded:
    out.status = PriceStatus::PlusInfinity;
    out.value = kInf;
    out.diagnosis = "dual unbounded: claim outside dom pi";
    break;
  case lp::Status::Infeasible:
    out.status = PriceStatus::MinusInfinity;
    out.value = -kInf;
    out.diagnosis = "dual infeasible: no normalized deflator with finite sigma";
    break;
  }
  return out;
}

/// Reads the deflator off the optimal multipliers of the pricing LP and
/// verifies normalization and the zero duality gap. `verify_dual` also
/// solves the dual pricing LP and records its value.
inline DualCertificate extract_deflator(const MarketModel &model,
                                        const ClaimProcess &c,
                                        const ClaimProcess &p,
                                        const Tolerances &tol = default_tolerances(),
                                        bool verify_dual = false) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  int alpha = -1;
  const auto a = detail::assemble_pricing(model, c, p, alpha);
  const auto sol = lp::solve(a.lp, tol);
  const auto priced = detail::price_from_solution(model, c, p, a, alpha, sol);
  if (priced.status != PriceStatus::Finite)
    throw UndefinedBase(std::string("no deflator for pi = ") +
                        (priced.status == PriceStatus::PlusInfinity ? "+inf" : "-inf"));
  // Row multipliers of the min problem are <= 0 on <= rows.
  auto mult = [&](int row) {
    return std::max(0.0, -sol.duals[static_cast<std::size_t>(row)]);
  };
  DualCertificate cert;
  cert.price = priced.value;
  cert.y = ClaimProcess(tree.size());
  cert.v = PortfolioProcess(tree.size(), dim);
  double sigma_mult = 0.0;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const double pn = tree.prob(n);
    const double mu = mult(a.budget[n]);
    cert.y[n] = mu / pn;
    Vector w(dim, 0.0);
    const auto &cost = model.cost(n);
    for (std::size_t k = 0; k < cost.terms().size(); ++k) {
      const auto &term = cost.terms()[k];
      const auto &layout = a.terms[n][k];
      for (std::size_t q = 0; q < term.size(); ++q) {
        const double lam = layout.t < 0 ? mu : mult(layout.rows[q]);
        sigma_mult -= lam * term[q].b;
        for (std::size_t j = 0; j < dim; ++j)
          w[j] += lam * term[q].a[j];
      }
    }
    for (std::size_t i = 0; i < cost.domain().size(); ++i) {
      const double rho = mult(a.domain_rows[n][i]);
      sigma_mult += rho * cost.domain()[i].h;
      for (std::size_t j = 0; j < dim; ++j)
        w[j] += rho * cost.domain()[i].g[j];
    }
    for (std::size_t i = 0; i < a.constraint_rows[n].size(); ++i)
      sigma_mult += mult(a.constraint_rows[n][i]) * model.constraint(n).rows()[i].h;
    for (std::size_t j = 0; j < dim; ++j)
      cert.v[n][j] = w[j] / pn;
  }
  cert.sigma_multipliers = sigma_mult;
  cert.normalization = pairing(tree, p, cert.y);
  if (std::abs(cert.normalization - 1.0) > tol.feasibility)
    throw GapTooLarge("deflator normalization pairing(p, y) = " +
                      std::to_string(cert.normalization));
  const auto sigma = support_function_C1(model, cert.y, tol);
  if (!std::isfinite(sigma.value))
    throw GapTooLarge("extracted deflator has sigma = +inf");
  cert.sigma = sigma.value;
  cert.value = pairing(tree, c, cert.y) - cert.sigma;
  cert.gap = std::abs(cert.value - cert.price);
  if (cert.gap > tol.duality_gap * std::max(1.0, std::abs(cert.price)))
    throw GapTooLarge("pairing(c, y) - sigma(y) = " + std::to_string(cert.value) +
                      " but pi(c) = " + std::to_string(cert.price));
  cert.prices.resize(tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n)
    if (cert.y[n] > tol.positivity) {
      Vector s = cert.v[n];
      for (auto &e : s)
        e /= cert.y[n];
      cert.prices[n] = std::move(s);
    }
  if (verify_dual) {
    const auto d = dual_price(model, c, p, tol);
    cert.dual_lp_value = d.value;
    if (d.status != PriceStatus::Finite ||
        std::abs(d.value - cert.price) >
            tol.duality_gap * std::max(1.0, std::abs(cert.price)))
      throw GapTooLarge("dual pricing LP gives " + std::to_string(d.value) +
                        " but pi(c) = " + std::to_string(cert.price));
  }
  return cert;
}

struct PolarResult {
  bool member = false;
  PortfolioProcess v; // y s, when member
  PortfolioProcess s; // witness s_n in Z_n, when member
};

/// y in the polar cone of C for a conical model: some s with s_n in Z_n
/// (the marginal price set of S_n) makes E[R y s | n] - y_n s_n a member
/// of D_n^* at every non-terminal node. Equivalent to sigma(y) = 0.
inline PolarResult polar_membership(const MarketModel &model, const ClaimProcess &y,
                                    const Tolerances &tol = default_tolerances()) {
  if (!model.conical())
    throw ConicalOnly("polar membership needs sublinear costs and conical "
                      "constraints");
  detail::check_deflator(model, y);
  PolarResult out;
  for (double v : y.values())
    if (v < 0.0)
      return out;
  const auto s = detail::assemble_sigma(model, &y);
  const auto sol = lp::solve(s.lp, tol);
  if (sol.status == lp::Status::Infeasible)
    return out;
  out.member = true;
  out.v = detail::read_v(s, model.dim(), sol.primal);
  out.s = PortfolioProcess(y.size(), model.dim());
  for (std::size_t n = 0; n < y.size(); ++n) {
    if (y[n] > 0.0) {
      for (std::size_t j = 0; j < model.dim(); ++j)
        out.s[n][j] = out.v[n][j] / y[n];
    } else {
      out.s[n] = marginal_price_set(model.cost(n)).generators.front();
    }
  }
  return out;
}

struct MartingaleReport {
  std::vector<double> residual; // per node, 0 at terminal nodes
  double max = 0.0;
};

/// Per non-terminal node n, the infinity-norm distance of
/// E[R y s | n] - y_n s_n to the polar cone of the recession cone of D_n.
/// Without constraints this is the plain martingale defect of (y s).
inline MartingaleReport martingale_residual(const MarketModel &model,
                                            const ClaimProcess &y,
                                            const PortfolioProcess &s,
                                            const Tolerances &tol = default_tolerances()) {
  const auto &tree = model.tree();
  const std::size_t dim = model.dim();
  detail::check_deflator(model, y);
  if (s.size() != tree.size() || s.dim() != dim)
    throw ShapeMismatch("price process does not match model");
  MartingaleReport out;
  out.residual.assign(tree.size(), 0.0);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (tree.is_terminal(n))
      continue;
    Vector w(dim, 0.0);
    for (int m : tree.children(n)) {
      const auto u = static_cast<std::size_t>(m);
      const double q = tree.prob(u) / tree.prob(n);
      for (std::size_t j = 0; j < dim; ++j)
        w[j] += q * model.carry(u)[j] * y[u] * s[u][j];
    }
    for (std::size_t j = 0; j < dim; ++j)
      w[j] -= y[n] * s[n][j];
    const auto gens = polar_cone(recession_cone(model.constraint(n)));
    double r = detail::inf_norm(w);
    if (!gens.empty()) {
      // min tau s.t. |w - sum kappa g|_inf <= tau, kappa >= 0.
      lp::LinearProgram prog;
      const int tau = prog.add_column(0.0, kInf, 1.0, "tau");
      std::vector<int> kappa;
      for (std::size_t i = 0; i < gens.size(); ++i)
        kappa.push_back(prog.add_column(0.0, kInf, 0.0));
      for (std::size_t j = 0; j < dim; ++j) {
        std::vector<lp::Term> up{{tau, -1.0}}, down{{tau, -1.0}};
        for (std::size_t i = 0; i < gens.size(); ++i)
          if (gens[i][j] != 0.0) {
            up.push_back({kappa[i], -gens[i][j]});
            down.push_back({kappa[i], gens[i][j]});
          }
        prog.add_row(std::move(up), lp::Relation::LessEqual, -w[j]);
        prog.add_row(std::move(down), lp::Relation::LessEqual, w[j]);
      }
      const auto sol = lp::solve(prog, tol);
      if (sol.status != lp::Status::Optimal)
        throw NumericalFailure("distance-to-cone LP is feasible and bounded");
      r = std::max(0.0, sol.objective);
    }
    out.residual[n] = r;
    out.max = std::max(out.max, r);
  }
  return out;
}

struct SeparationResult {
  bool inside = false;
  ClaimProcess y;       // separating deflator when outside
  double pairing = 0.0; // pairing(c, y)
  double sigma = 0.0;   // sigma(y)
};

/// c in C, or a deflator y with sigma(y) <= 1 < pairing(c, y) built from
/// the Farkas multipliers of the infeasible membership LP. In conical
/// models sigma(y) = 0.
inline SeparationResult bipolar_separation(const MarketModel &model,
                                           const ClaimProcess &c,
                                           const Tolerances &tol = default_tolerances()) {
  const auto &tree = model.tree();
  auto a = detail::assemble_hedge(model, c, false);
  const auto sol = lp::solve(a.lp, tol);
  SeparationResult out;
  if (sol.status != lp::Status::Infeasible) {
    out.inside = true;
    return out;
  }
  ClaimProcess y(tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n)
    y[n] = std::max(0.0, -sol.farkas[static_cast<std::size_t>(a.budget[n])]) /
           tree.prob(n);
  const double big = detail::inf_norm(y.values());
  if (!(big > 0.0))
    throw NumericalFailure("Farkas certificate has no budget multipliers");
  y = (1.0 / big) * y;
  const double pc = pairing(tree, c, y);
  const double s0 = support_function_C1(model, y, tol).value;
  if (!(pc > s0))
    throw GapTooLarge("Farkas deflator does not separate: pairing " +
                      std::to_string(pc) + ", sigma " + std::to_string(s0));
  const double k = 2.0 / (pc + s0);
  out.y = k * y;
  out.pairing = k * pc;
  out.sigma = k * s0;
  return out;
}

/// Smallest slack P(c; c') - pairing(c', y) over the samples; +inf samples
/// (c + c' outside dom pi) do not count.
inline double attainment_slack(const MarketModel &model, const ClaimProcess &c,
                               const ClaimProcess &p, const ClaimProcess &y,
                               const std::vector<ClaimProcess> &samples,
                               const Tolerances &tol = default_tolerances()) {
  const auto &tree = model.tree();
  const double base = detail::finite_price(model, c, p, tol, "base claim");
  double worst = kInf;
  for (const auto &cp : samples) {
    const double up = detail::extended_price(model, c + cp, p, tol);
    worst = std::min(worst, (up - base) - pairing(tree, cp, y));
  }
  return worst;
}

/// P(c; c') >= pairing(c', y) - 1e-7 for every sampled c'.
inline bool attainment_certificate(const MarketModel &model, const ClaimProcess &c,
                                   const ClaimProcess &p, const ClaimProcess &y,
                                   const std::vector<ClaimProcess> &samples,
                                   const Tolerances &tol = default_tolerances()) {
  return attainment_slack(model, c, p, y, samples, tol) >= -1e-7;
}

} // namespace superhedge
