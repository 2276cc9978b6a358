#pragma once

// Independent references for the dual side: the support function of C from
// its definition, small closed-form deflators and interval backward
// induction for one-asset bid-ask trees.

#include "superhedge/hedging.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace oracle {

using namespace superhedge;

/// sup { E sum c_n y_n | c in C } as one LP in (x, c); +inf when unbounded.
inline double support_by_definition(const MarketModel &model, const ClaimProcess &y) {
  const auto &tree = model.tree();
  auto a = detail::assemble_hedge(
      model, ClaimProcess::zero(tree), false, lp::Sense::Maximize,
      [&](lp::LinearProgram &prog) {
        std::vector<std::vector<lp::Term>> extra(tree.size());
        for (std::size_t n = 0; n < tree.size(); ++n)
          extra[n].push_back({prog.add_free_column(tree.prob(n) * y[n]), 1.0});
        return extra;
      });
  const auto sol = lp::solve(a.lp);
  if (sol.status == lp::Status::Unbounded)
    return kInf;
  return sol.objective;
}

/// Martingale deflator of a one-period cash + stock model with unit root
/// value: q u + (1 - q) d = s0 in risk-neutral form, y = q / P.
inline std::pair<double, double> one_period_deflator(double s0, double up, double down,
                                                     double p_up) {
  const double q = (s0 - down) / (up - down);
  return {q / p_up, (1.0 - q) / (1.0 - p_up)};
}

/// One risky asset with node-wise bid-ask interval plus frictionless cash.
/// y is in the polar cone iff y is a martingale and some selection
/// s_n in [bid_n, ask_n] makes y s a martingale. The feasible values of
/// y_n s_n form an interval computed leaf to root.
inline bool bid_ask_polar(const ScenarioTree &tree, const std::vector<double> &bid,
                          const std::vector<double> &ask, const std::vector<double> &y,
                          double tol = 1e-9) {
  std::vector<std::pair<double, double>> f(tree.size());
  for (std::size_t i = tree.size(); i-- > 0;) {
    double lo = y[i] * bid[i], hi = y[i] * ask[i];
    if (!tree.is_terminal(i)) {
      double elo = 0.0, ehi = 0.0, ey = 0.0;
      for (int m : tree.children(i)) {
        const double q = tree.prob(static_cast<std::size_t>(m)) / tree.prob(i);
        elo += q * f[static_cast<std::size_t>(m)].first;
        ehi += q * f[static_cast<std::size_t>(m)].second;
        ey += q * y[static_cast<std::size_t>(m)];
      }
      if (std::abs(ey - y[i]) > tol)
        return false;
      lo = std::max(lo, elo);
      hi = std::min(hi, ehi);
    }
    if (lo > hi + tol)
      return false;
    f[i] = {lo, hi};
  }
  return true;
}

} // namespace oracle
