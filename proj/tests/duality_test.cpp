#include "superhedge/duality.hpp"
#include "support/duality_oracle.hpp"
#include "support/models.hpp"
#include "support/random_model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace superhedge;
using namespace testing_support;

namespace {

ClaimProcess p0(const ScenarioTree &tree) { return ClaimProcess::initial_unit(tree); }

// Cash + one asset on a binary tree of horizon 2 with equal branching and
// node-wise (ask, bid) quotes.
struct BidAskTree {
  MarketModel model;
  std::vector<double> bid, ask;
};

BidAskTree bid_ask_tree(std::mt19937_64 &rng) {
  const auto tree = ScenarioTree::build({{"r", std::nullopt, 1.0},
                                         {"u", "r", 0.5},
                                         {"d", "r", 0.5},
                                         {"uu", "u", 0.25},
                                         {"ud", "u", 0.25},
                                         {"du", "d", 0.25},
                                         {"dd", "d", 0.25}});
  std::uniform_real_distribution<double> mid(1.0, 3.0), half(0.0, 0.3), u(0.0, 1.0);
  BidAskTree out{MarketModel(tree, {"cash", "stock"},
                             std::vector<PolyhedralCost>(7, PolyhedralCost::linear({1.0, 1.0})),
                             std::vector<PolyhedralConstraint>(
                                 7, PolyhedralConstraint::unconstrained(2))),
                 {}, {}};
  std::vector<double> mids(tree.size());
  std::vector<PolyhedralCost> costs;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const int parent = tree.parent(n);
    mids[n] = parent < 0 ? mid(rng)
                         : mids[static_cast<std::size_t>(parent)] * (0.8 + 0.4 * u(rng));
    const double m = mids[n], h = half(rng);
    out.bid.push_back(m - h);
    out.ask.push_back(m + h);
    std::vector<AssetLadder> books{AssetLadder{{{1.0, kInf}}, {{1.0, kInf}}},
                                   AssetLadder{{{m + h, kInf}}, {{m - h, kInf}}}};
    costs.push_back(cost_from_ladder(books));
  }
  out.model = MarketModel(tree, {"cash", "stock"}, std::move(costs),
                          std::vector<PolyhedralConstraint>(
                              7, PolyhedralConstraint::unconstrained(2)));
  return out;
}

// Deflator that is a martingale (cash condition) with random branching.
ClaimProcess random_martingale_deflator(std::mt19937_64 &rng, const ScenarioTree &tree,
                                        double spread = 0.8) {
  std::uniform_real_distribution<double> u(1.0 - spread, 1.0 + spread);
  ClaimProcess y(tree.size());
  y[0] = 1.0;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (tree.is_terminal(n))
      continue;
    const auto kids = tree.children(n);
    std::vector<double> w;
    double e = 0.0;
    for (int m : kids) {
      w.push_back(u(rng));
      e += tree.prob(static_cast<std::size_t>(m)) / tree.prob(n) * w.back();
    }
    for (std::size_t k = 0; k < kids.size(); ++k)
      y[static_cast<std::size_t>(kids[k])] = y[n] * w[k] / e;
  }
  return y;
}

} // namespace

TEST(SupportFunction, ZeroDeflator) {
  const auto m = binomial_model();
  const auto r = support_function_C1(m, ClaimProcess::zero(m.tree()));
  EXPECT_EQ(r.value, 0.0);
  for (const auto &v : r.v.values())
    for (double e : v)
      EXPECT_EQ(e, 0.0);
}

TEST(SupportFunction, MartingaleDeflatorIsZeroOtherwiseInfinite) {
  const auto m = binomial_model();
  const auto [yu, yd] = oracle::one_period_deflator(4.0, 8.0, 2.0, 0.5);
  EXPECT_NEAR(support_function_C1(m, claim3(1.0, yu, yd)).value, 0.0, 1e-12);
  EXPECT_EQ(support_function_C1(m, claim3(1.0, 1.0, 1.0)).value, kInf);
  EXPECT_EQ(support_function_C1(m, claim3(1.0, -0.5, 2.5)).value, kInf);
}

TEST(SupportFunction, MatchesDefinitionOnLadderModels) {
  std::mt19937_64 rng(11);
  int finite = 0;
  for (int it = 0; it < 40; ++it) {
    RandomModelOptions opt;
    opt.max_nodes = 20;
    const auto rm = random_model(rng, opt);
    const auto &tree = rm.model.tree();
    std::vector<ClaimProcess> ys{random_martingale_deflator(rng, tree)};
    ys.push_back(extract_deflator(rm.model, random_claim(rng, tree), p0(tree)).y);
    for (const auto &y : ys) {
      const double direct = oracle::support_by_definition(rm.model, y);
      const double dual = support_function_C1(rm.model, y).value;
      if (std::isinf(direct)) {
        EXPECT_EQ(dual, kInf);
        continue;
      }
      ++finite;
      EXPECT_NEAR(dual, direct, 1e-6 * std::max(1.0, std::abs(direct)));
      EXPECT_GE(dual, 0.0);
    }
  }
  EXPECT_GT(finite, 40);
}

TEST(SupportFunction, SublinearAndNonnegative) {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 20; ++it) {
    const auto rm = random_model(rng);
    const auto &tree = rm.model.tree();
    const auto y1 = extract_deflator(rm.model, random_claim(rng, tree), p0(tree)).y;
    const auto y2 = extract_deflator(rm.model, random_claim(rng, tree), p0(tree)).y;
    const double s1 = support_function_C1(rm.model, y1).value;
    const double s2 = support_function_C1(rm.model, y2).value;
    const double s12 = support_function_C1(rm.model, y1 + y2).value;
    EXPECT_GE(s1, 0.0);
    EXPECT_LE(s12, s1 + s2 + 1e-7);
    EXPECT_NEAR(support_function_C1(rm.model, 3.0 * y1).value, 3.0 * s1,
                1e-7 * std::max(1.0, s1));
  }
}

TEST(ExtractDeflator, BinomialMatchesMartingaleConditions) {
  const auto m = binomial_model();
  const auto cert = extract_deflator(m, claim3(0.0, 3.0, 0.0), p0(m.tree()), {}, true);
  const auto [yu, yd] = oracle::one_period_deflator(4.0, 8.0, 2.0, 0.5);
  EXPECT_NEAR(cert.y[0], 1.0, 1e-8);
  EXPECT_NEAR(cert.y[1], yu, 1e-8);
  EXPECT_NEAR(cert.y[2], yd, 1e-8);
  EXPECT_NEAR(cert.value, 1.0, 1e-8);
  EXPECT_NEAR(cert.sigma, 0.0, 1e-8);
  ASSERT_TRUE(cert.dual_lp_value.has_value());
  EXPECT_NEAR(*cert.dual_lp_value, 1.0, 1e-8);
}

TEST(ExtractDeflator, TranslatedPremium) {
  std::mt19937_64 rng(3);
  for (double alpha : {-2.0, 0.5, 3.0}) {
    RandomModelOptions opt;
    opt.sublinear = true;
    opt.conical = true;
    const auto rm = random_model(rng, opt);
    const auto p = p0(rm.model.tree());
    const auto cert = extract_deflator(rm.model, alpha * p, p);
    EXPECT_NEAR(cert.value, alpha, 1e-8);
    EXPECT_NEAR(cert.sigma, 0.0, 1e-8);
  }
}

TEST(ExtractDeflator, BidAskPricesLieInSpread) {
  const auto m = bid_ask_model({2.0, 1.0}, {2.5, 1.5}, {1.2, 0.6});
  const std::vector<std::pair<double, double>> quotes{{2.0, 1.0}, {2.5, 1.5}, {1.2, 0.6}};
  for (const auto &c : {claim3(0.0, 1.0, 0.0), claim3(0.0, -1.0, 2.0), claim3(1.0, 0.3, -0.4)}) {
    const auto cert = extract_deflator(m, c, p0(m.tree()));
    ASSERT_TRUE(cert.prices[0].has_value());
    for (std::size_t n = 0; n < 3; ++n) {
      // Prices are only pinned down where the deflator charges the node.
      if (!cert.prices[n])
        continue;
      EXPECT_NEAR((*cert.prices[n])[0], 1.0, 1e-9);
      EXPECT_GE((*cert.prices[n])[1], quotes[n].second - 1e-9);
      EXPECT_LE((*cert.prices[n])[1], quotes[n].first + 1e-9);
    }
  }
}

TEST(ExtractDeflator, ZeroGapAndNormalizationOnRandomModels) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 40; ++it) {
    RandomModelOptions opt;
    opt.bounded = it % 2 == 0;
    const auto rm = random_model(rng, opt);
    const auto &tree = rm.model.tree();
    const auto cert = extract_deflator(rm.model, random_claim(rng, tree, 2.0), p0(tree), {},
                                       it % 4 == 0);
    EXPECT_LE(cert.gap, 1e-7 * std::max(1.0, std::abs(cert.price)));
    EXPECT_NEAR(cert.normalization, 1.0, 1e-8);
    EXPECT_NEAR(cert.sigma, cert.sigma_multipliers, 1e-7 * std::max(1.0, cert.sigma));
    for (double v : cert.y.values())
      EXPECT_GE(v, 0.0);
  }
}

TEST(DualPrice, AgreesWithPrimal) {
  std::mt19937_64 rng(6);
  for (int it = 0; it < 30; ++it) {
    const auto rm = random_model(rng);
    const auto &tree = rm.model.tree();
    const auto c = random_claim(rng, tree);
    const auto primal = superhedge_cost(rm.model, c, p0(tree));
    const auto dual = dual_price(rm.model, c, p0(tree));
    ASSERT_EQ(primal.status, dual.status);
    EXPECT_NEAR(primal.value, dual.value, 1e-7 * std::max(1.0, std::abs(primal.value)));
  }
}

TEST(PolarMembership, LinearModelNeedsMartingale) {
  const auto m = binomial_model();
  const auto [yu, yd] = oracle::one_period_deflator(4.0, 8.0, 2.0, 0.5);
  const auto in = polar_membership(m, claim3(1.0, yu, yd));
  ASSERT_TRUE(in.member);
  EXPECT_NEAR(in.s[1][1], 8.0, 1e-12);
  EXPECT_FALSE(polar_membership(m, claim3(1.0, 1.0, 1.0)).member);
  EXPECT_THROW(polar_membership(counterexample_model(counterexample_outer()),
                                claim3(1, 1, 1)),
               ConicalOnly);
}

TEST(PolarMembership, ZeroDeflatorIsMember) {
  const auto m = bid_ask_model({2.0, 1.0}, {2.5, 1.5}, {1.2, 0.6});
  const auto r = polar_membership(m, ClaimProcess::zero(m.tree()));
  ASSERT_TRUE(r.member);
  for (std::size_t n = 0; n < 3; ++n)
    EXPECT_TRUE(detail::inf_norm(r.v[n]) == 0.0);
}

TEST(PolarMembership, BidAskIntervalOracle) {
  std::mt19937_64 rng(8);
  int members = 0, others = 0;
  for (int it = 0; it < 60; ++it) {
    const auto b = bid_ask_tree(rng);
    const auto &tree = b.model.tree();
    const auto y = random_martingale_deflator(rng, tree, it % 2 == 0 ? 0.1 : 0.6);
    const bool expected = oracle::bid_ask_polar(tree, b.bid, b.ask, y.values());
    const auto r = polar_membership(b.model, y);
    EXPECT_EQ(r.member, expected) << "instance " << it;
    EXPECT_EQ(support_function_C1(b.model, y).value == 0.0, expected);
    (expected ? members : others)++;
    if (r.member)
      for (std::size_t n = 0; n < tree.size(); ++n) {
        EXPECT_GE(r.s[n][1], b.bid[n] - 1e-9);
        EXPECT_LE(r.s[n][1], b.ask[n] + 1e-9);
      }
  }
  EXPECT_GT(members, 5);
  EXPECT_GT(others, 5);
}

TEST(PolarMembership, ConicalSupportIsZeroOrInfinite) {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 30; ++it) {
    RandomModelOptions opt;
    opt.sublinear = true;
    opt.conical = true;
    const auto rm = random_model(rng, opt);
    const auto &tree = rm.model.tree();
    for (const auto &y : {random_martingale_deflator(rng, tree),
                          extract_deflator(rm.model, random_claim(rng, tree), p0(tree)).y}) {
      const double s = support_function_C1(rm.model, y).value;
      EXPECT_TRUE(s == kInf || std::abs(s) <= 1e-9) << s;
      EXPECT_EQ(polar_membership(rm.model, y).member, s <= 1e-9);
    }
  }
}

TEST(MartingaleResidual, BinomialDeflatorWithMarketPrices) {
  const auto m = binomial_model();
  const auto [yu, yd] = oracle::one_period_deflator(4.0, 8.0, 2.0, 0.5);
  const PortfolioProcess s(2, {{1.0, 4.0}, {1.0, 8.0}, {1.0, 2.0}});
  const auto r = martingale_residual(m, claim3(1.0, yu, yd), s);
  EXPECT_NEAR(r.max, 0.0, 1e-12);
}

TEST(MartingaleResidual, DriftIsReported) {
  const auto m = binomial_model();
  const PortfolioProcess s(2, {{1.0, 4.0}, {1.0, 8.0}, {1.0, 2.0}});
  // E[s_1] - s_0 = 5 - 4.
  const auto r = martingale_residual(m, ClaimProcess::constant(m.tree(), 1.0), s);
  EXPECT_NEAR(r.residual[0], 1.0, 1e-12);
  EXPECT_EQ(r.residual[1], 0.0);
}

TEST(MartingaleResidual, PolarContainmentNotEquality) {
  // D = R x R_+^2, so D* = {0} x R_-^2.
  std::vector<PolyhedralConstraint> cons(3, PolyhedralConstraint::unconstrained(3));
  cons[0] = PolyhedralConstraint::lower_bounds({-kInf, 0.0, 0.0});
  const auto m = linear_model(two_state_tree(), {"cash", "x1", "x2"},
                              {{1, 1, 1}, {1, 0.5, 1}, {1, 0.5, 0.5}}, cons);
  const PortfolioProcess s(3, {{1, 1, 1}, {1, 0.5, 1}, {1, 0.5, 0.5}});
  const auto one = ClaimProcess::constant(m.tree(), 1.0);
  EXPECT_NEAR(martingale_residual(m, one, s).max, 0.0, 1e-12);
  const auto free_model = linear_model(two_state_tree(), {"cash", "x1", "x2"},
                                       {{1, 1, 1}, {1, 0.5, 1}, {1, 0.5, 0.5}});
  EXPECT_NEAR(martingale_residual(free_model, one, s).max, 0.5, 1e-12);
}

TEST(BipolarSeparation, MemberIsInside) {
  const auto m = binomial_model();
  EXPECT_TRUE(bipolar_separation(m, claim3(-1.0, 0.0, 0.0)).inside);
}

TEST(BipolarSeparation, UnderpricedClaimIsSeparated) {
  const auto m = binomial_model();
  const auto c = claim3(0.0, 3.0, 0.0) - 0.9 * p0(m.tree());
  const auto r = bipolar_separation(m, c);
  ASSERT_FALSE(r.inside);
  EXPECT_LE(r.sigma, 1e-9);
  EXPECT_GT(r.pairing, 1.0 + 1e-9);
  EXPECT_NEAR(pairing(m.tree(), c, r.y), r.pairing, 1e-12);
  // The separating direction is the martingale deflator up to scale.
  const auto [yu, yd] = oracle::one_period_deflator(4.0, 8.0, 2.0, 0.5);
  EXPECT_NEAR(r.y[1] / r.y[0], yu, 1e-8);
  EXPECT_NEAR(r.y[2] / r.y[0], yd, 1e-8);
}

TEST(BipolarSeparation, LargeConstantLeavesC) {
  std::mt19937_64 rng(10);
  for (int it = 0; it < 20; ++it) {
    const auto rm = random_model(rng);
    const auto &tree = rm.model.tree();
    const auto c = random_claim(rng, tree) + ClaimProcess::constant(tree, 50.0);
    const auto r = bipolar_separation(rm.model, c);
    ASSERT_FALSE(r.inside);
    EXPECT_LE(r.sigma, 1.0 + 1e-9);
    EXPECT_GT(r.pairing, 1.0 + 1e-9);
    EXPECT_NEAR(support_function_C1(rm.model, r.y).value, r.sigma, 1e-9);
  }
}

TEST(Attainment, PremiumAndNonpositiveDirections) {
  const auto m = bid_ask_model({2.0, 1.0}, {2.5, 1.5}, {1.2, 0.6});
  const auto p = p0(m.tree());
  const auto c = claim3(0.0, 1.0, -0.5);
  const auto cert = extract_deflator(m, c, p);
  EXPECT_NEAR(attainment_slack(m, c, p, cert.y, {p}), 0.0, 1e-8);
  EXPECT_TRUE(attainment_certificate(m, c, p, cert.y,
                                     {claim3(-1.0, 0.0, 0.0), claim3(0.0, -0.3, -2.0)}));
}

TEST(Attainment, CompleteMarketIsLinear) {
  const auto m = binomial_model();
  const auto p = p0(m.tree());
  const auto c = claim3(0.0, 3.0, 0.0);
  const auto cert = extract_deflator(m, c, p);
  std::mt19937_64 rng(4);
  std::vector<ClaimProcess> samples;
  for (int i = 0; i < 100; ++i)
    samples.push_back(random_claim(rng, m.tree(), 3.0));
  for (const auto &cp : samples) {
    const double slack = attainment_slack(m, c, p, cert.y, {cp});
    EXPECT_NEAR(slack, 0.0, 1e-8);
  }
}

TEST(Attainment, RandomModels) {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 10; ++it) {
    const auto rm = random_model(rng);
    const auto &tree = rm.model.tree();
    const auto p = p0(tree);
    const auto c = random_claim(rng, tree);
    const auto cert = extract_deflator(rm.model, c, p);
    std::vector<ClaimProcess> samples;
    for (int i = 0; i < 20; ++i)
      samples.push_back(random_claim(rng, tree));
    EXPECT_GE(attainment_slack(rm.model, c, p, cert.y, samples), -1e-7);
  }
}
