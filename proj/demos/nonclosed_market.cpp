// Two risky assets whose root holdings are tied by a hyperbolic constraint.
// No arbitrage, yet the set of hedgeable claims is not closed: a boundary
// claim is accepted by the outer polyhedral model and rejected by every
// inner one.

#include "superhedge/approximation.hpp"
#include "superhedge/diagnostics.hpp"

#include <cstdio>

using namespace superhedge;

namespace {

MarketModel model_with_root(const ScenarioTree &tree, const PolyhedralConstraint &d0) {
  std::vector<PolyhedralConstraint> cons(3, PolyhedralConstraint::unconstrained(3));
  cons[0] = d0;
  return MarketModel(tree, {"cash", "x1", "x2"},
                     {PolyhedralCost::linear({1, 1, 1}), PolyhedralCost::linear({1, 1, 2}),
                      PolyhedralCost::linear({1, 1, 0})},
                     std::move(cons));
}

} // namespace

int main() {
  const auto tree = ScenarioTree::build(
      {{"root", std::nullopt, 1.0}, {"w1", "root", 0.5}, {"w2", "root", 0.5}});
  // x1 >= 1 / (x2 + 1) - 1: tangent at 0 plus x1, x2 >= -1 outside, chords inside.
  const auto curve = hyperbola_curve(3, 1, 2);
  auto outer_rows = epigraph_outer(curve, {0.0}, -1.0).rows();
  outer_rows.push_back({{0.0, -1.0, 0.0}, 1.0});
  ApproximationFamily family{model_with_root(tree, PolyhedralConstraint(3, outer_rows)), {}};
  for (double delta : {0.1, 0.01, 0.001})
    family.inner.emplace_back(
        delta, model_with_root(tree, epigraph_inner(curve, hyperbola_samples(delta, 50.0))));

  std::printf("arbitrage: %s\n", arbitrage_check(family.outer).found ? "found" : "none");
  const auto closed = closedness_condition(family.outer);
  std::printf("closedness condition: %s\n", closed.satisfied ? "satisfied" : "violated at t=0");

  for (const auto &c : {ClaimProcess(Vector{0.0, -1.0, 1.0}),
                        ClaimProcess(Vector{0.0, -1.0, 0.5})}) {
    const auto r = nonclosedness_witness(family, c);
    std::printf("claim (%g, (%g, %g)): outer %s", c[0], c[1], c[2], to_string(r.outer));
    for (const auto &[delta, m] : r.inner)
      std::printf(", delta %g %s", delta, to_string(m));
    std::printf("\n");
  }
  return 0;
}
