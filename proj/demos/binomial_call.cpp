// Cash and one stock on a single binomial step: price a call-like claim,
// read off the replicating hedge and the martingale deflator.

#include "superhedge/duality.hpp"

#include <cstdio>

using namespace superhedge;

int main() {
  const auto tree = ScenarioTree::build({{"root", std::nullopt, 1.0},
                                         {"up", "root", 0.5},
                                         {"down", "root", 0.5}});
  // s0 = 4, s1 in {8, 2}; cash is worth 1 everywhere.
  const MarketModel model(tree, {"cash", "stock"},
                          {PolyhedralCost::linear({1.0, 4.0}),
                           PolyhedralCost::linear({1.0, 8.0}),
                           PolyhedralCost::linear({1.0, 2.0})},
                          std::vector<PolyhedralConstraint>(
                              3, PolyhedralConstraint::unconstrained(2)));
  const ClaimProcess claim(Vector{0.0, 3.0, 0.0});
  const auto premium = ClaimProcess::initial_unit(tree);

  const auto price = superhedge_cost(model, claim, premium);
  std::printf("superhedging cost: %.10g\n", price.value);
  std::printf("hedge at root: cash %.10g, stock %.10g\n", price.portfolio[0][0],
              price.portfolio[0][1]);

  const auto cert = extract_deflator(model, claim, premium);
  std::printf("deflator: root %.10g, up %.10g, down %.10g\n", cert.y[0], cert.y[1],
              cert.y[2]);
  std::printf("dual value %.10g, gap %.2e\n", cert.value, cert.gap);
  return 0;
}
