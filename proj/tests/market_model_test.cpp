#include "superhedge/market_model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace superhedge;

namespace {

std::vector<AssetLadder> one_asset(std::vector<LadderLevel> asks,
                                   std::vector<LadderLevel> bids) {
  return {AssetLadder{std::move(asks), std::move(bids)}};
}

// Direct walk through a book: cost of buying q > 0 or selling -q.
double walk(const AssetLadder &book, double q) {
  const auto &side = q >= 0 ? book.asks : book.bids;
  double left = std::abs(q), total = 0.0;
  for (const auto &lvl : side) {
    const double take = std::min(left, lvl.depth);
    total += take * lvl.price;
    left -= take;
  }
  if (left > 1e-12)
    return kInf;
  return q >= 0 ? total : -total;
}

ScenarioTree two_state() {
  return ScenarioTree::build({{"root", std::nullopt, 1.0},
                              {"w1", "root", 0.5},
                              {"w2", "root", 0.5}});
}

PolyhedralCost random_cost(std::mt19937_64 &rng, std::size_t dim) {
  std::uniform_real_distribution<double> price(0.5, 3.0), depth(0.5, 4.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<AssetLadder> books;
  for (std::size_t j = 0; j < dim; ++j) {
    AssetLadder b;
    double ask = price(rng), bid = ask * 0.9;
    const int levels = coin(rng) ? 1 : 2;
    for (int l = 0; l < levels; ++l) {
      const bool last = l + 1 == levels;
      const double d = last && coin(rng) ? kInf : depth(rng);
      b.asks.push_back({ask, d});
      b.bids.push_back({bid, last ? d : depth(rng)});
      ask *= 1.2;
      bid *= 0.8;
    }
    books.push_back(b);
  }
  return cost_from_ladder(books);
}

} // namespace

TEST(Ladder, FrictionlessIsLinear) {
  const auto s = cost_from_ladder(one_asset({{1, kInf}}, {{1, kInf}}));
  for (double x : {-3.0, 0.0, 2.5})
    EXPECT_DOUBLE_EQ(eval_cost(s, {x}), x);
  EXPECT_TRUE(s.positively_homogeneous());
}

TEST(Ladder, BidAskSpread) {
  const auto s = cost_from_ladder(one_asset({{2, kInf}}, {{1, kInf}}));
  EXPECT_DOUBLE_EQ(eval_cost(s, {3.0}), 6.0);
  EXPECT_DOUBLE_EQ(eval_cost(s, {-3.0}), -3.0);
  const auto mp = marginal_price_set(s);
  ASSERT_EQ(mp.generators.size(), 2u);
  EXPECT_DOUBLE_EQ(std::min(mp.generators[0][0], mp.generators[1][0]), 1.0);
  EXPECT_DOUBLE_EQ(std::max(mp.generators[0][0], mp.generators[1][0]), 2.0);
  EXPECT_TRUE(mp.normal_rays.empty());
  // Sublinear: S infinity is S itself.
  for (double x : {-2.0, 0.5, 4.0})
    EXPECT_DOUBLE_EQ(recession_cost(s, {x}), eval_cost(s, {x}));
}

TEST(Ladder, TwoLevelBook) {
  const std::vector<AssetLadder> books =
      one_asset({{10, 5}, {11, 5}}, {{9, 5}, {8, 5}});
  const auto s = cost_from_ladder(books);
  EXPECT_DOUBLE_EQ(eval_cost(s, {7.0}), 72.0);
  EXPECT_DOUBLE_EQ(eval_cost(s, {-7.0}), -61.0);
  EXPECT_DOUBLE_EQ(eval_cost(s, {0.0}), 0.0);
  EXPECT_EQ(eval_cost(s, {10.5}), kInf);
  EXPECT_EQ(eval_cost(s, {-10.5}), kInf);
  for (double q = -10.0; q <= 10.0; q += 0.25)
    EXPECT_NEAR(eval_cost(s, {q}), walk(books[0], q), 1e-12) << q;
  EXPECT_EQ(recession_cost(s, {1.0}), kInf);
  EXPECT_DOUBLE_EQ(recession_cost(s, {0.0}), 0.0);
}

TEST(Ladder, RejectsBadBooks) {
  EXPECT_THROW(cost_from_ladder(one_asset({{1, kInf}}, {{2, kInf}})), CrossedBook);
  EXPECT_THROW(cost_from_ladder(one_asset({{2, 1}, {1, 1}}, {})), NonMonotoneLadder);
  EXPECT_THROW(cost_from_ladder(one_asset({}, {{1, 1}, {2, 1}})), NonMonotoneLadder);
  EXPECT_THROW(cost_from_ladder(one_asset({{1, kInf}, {2, 1}}, {})), NonMonotoneLadder);
  EXPECT_THROW(cost_from_ladder(one_asset({{-1, 1}}, {})), InvalidModel);
}

TEST(Ladder, MissingSideForbidsTrade) {
  const auto s = cost_from_ladder(one_asset({{3, kInf}}, {}));
  EXPECT_DOUBLE_EQ(eval_cost(s, {2.0}), 6.0);
  EXPECT_EQ(eval_cost(s, {-1.0}), kInf);
  const auto mp = marginal_price_set(s);
  EXPECT_EQ(mp.normal_rays.size(), 1u);
}

TEST(Cost, LinearEvaluation) {
  const auto s = PolyhedralCost::linear({1.0, 1.0});
  EXPECT_DOUBLE_EQ(eval_cost(s, {0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(eval_cost(s, {2.0, -1.0}), 1.0);
  EXPECT_DOUBLE_EQ(recession_cost(s, {2.0, -1.0}), 1.0);
  const auto mp = marginal_price_set(s);
  ASSERT_EQ(mp.generators.size(), 1u);
  EXPECT_EQ(mp.generators[0], (Vector{1.0, 1.0}));
  EXPECT_THROW(eval_cost(s, {1.0}), ShapeMismatch);
}

TEST(Cost, ValidatesNormalization) {
  EXPECT_THROW(PolyhedralCost::from_pieces({{{1.0}, 0.5}}), InvalidModel);
  EXPECT_THROW(PolyhedralCost::from_pieces({{{1.0}, -0.5}}), InvalidModel);
  EXPECT_THROW(PolyhedralCost::from_pieces({{{1.0}, 0.0}}, {{{1.0}, -1.0}}),
               InvalidModel);
  EXPECT_THROW(PolyhedralCost::from_pieces({{{1.0, 2.0}, 0.0}, {{1.0}, 0.0}}),
               InvalidModel);
  // Offsets within 1e-12 of zero are snapped.
  const auto s = PolyhedralCost::from_pieces({{{1.0}, 1e-14}, {{2.0}, -3.0}});
  EXPECT_EQ(s.terms()[0][0].b, 0.0);
}

TEST(Cost, ProductOfIntervals) {
  std::vector<AssetLadder> books{AssetLadder{{{2, kInf}}, {{1, kInf}}},
                                 AssetLadder{{{4, kInf}}, {{3, kInf}}}};
  const auto mp = marginal_price_set(cost_from_ladder(books));
  ASSERT_EQ(mp.generators.size(), 4u);
  for (double a : {1.0, 2.0})
    for (double b : {3.0, 4.0}) {
      bool found = false;
      for (const auto &g : mp.generators)
        found = found || (g[0] == a && g[1] == b);
      EXPECT_TRUE(found) << a << "," << b;
    }
}

TEST(Cost, ScaledDeepensBook) {
  const auto s = cost_from_ladder(one_asset({{10, 5}, {11, 5}}, {{9, 5}, {8, 5}}));
  const auto s2 = s.scaled(2.0);
  // 2 * S(x / 2) buys 10 at the best price.
  EXPECT_DOUBLE_EQ(eval_cost(s2, {10.0}), 100.0);
  EXPECT_DOUBLE_EQ(eval_cost(s2, {14.0}), 144.0);
  EXPECT_EQ(eval_cost(s2, {21.0}), kInf);
}

TEST(Conjugate, Examples) {
  const auto lin = PolyhedralCost::linear({1.0, 3.0});
  // v = 0 gives sup_x -S(x): zero exactly when 0 is a marginal price.
  const auto absval = PolyhedralCost::from_pieces({{{1.0}, 0.0}, {{-1.0}, 0.0}});
  EXPECT_DOUBLE_EQ(conjugate_cost(absval, 1.0, {0.0}), 0.0);
  EXPECT_EQ(conjugate_cost(lin, 1.0, {0.0, 0.0}), kInf);
  EXPECT_DOUBLE_EQ(conjugate_cost(lin, 2.0, {2.0, 6.0}), 0.0);
  EXPECT_EQ(conjugate_cost(lin, 2.0, {2.0, 6.5}), kInf);
  const auto spread = cost_from_ladder(one_asset({{2, kInf}}, {{1, kInf}}));
  EXPECT_DOUBLE_EQ(conjugate_cost(spread, 1.0, {1.5}), 0.0);
  EXPECT_EQ(conjugate_cost(spread, 1.0, {3.0}), kInf);
  EXPECT_THROW(conjugate_cost(spread, -1.0, {0.0}), NegativeDeflator);
  // y = 0: conjugate of the domain indicator.
  EXPECT_DOUBLE_EQ(conjugate_cost(lin, 0.0, {0.0, 0.0}), 0.0);
  EXPECT_EQ(conjugate_cost(lin, 0.0, {1.0, 0.0}), kInf);
}

TEST(Conjugate, FiniteDepthAgainstBreakpoints) {
  // In one dimension the sup of x v - y S(x) over the bounded domain sits at
  // a breakpoint of S.
  const std::vector<AssetLadder> books =
      one_asset({{10, 5}, {11, 5}}, {{9, 5}, {8, 5}});
  const auto s = cost_from_ladder(books);
  const std::vector<double> kinks{-10, -5, 0, 5, 10};
  for (double y : {0.0, 0.5, 1.0, 2.0})
    for (double v = -30.0; v <= 30.0; v += 2.5) {
      double best = -kInf;
      for (double q : kinks)
        best = std::max(best, q * v - y * walk(books[0], q));
      EXPECT_NEAR(conjugate_cost(s, y, {v}), best, 1e-9) << y << " " << v;
    }
}

TEST(Support, Examples) {
  const auto free3 = PolyhedralConstraint::unconstrained(3);
  EXPECT_DOUBLE_EQ(constraint_support(free3, {0, 0, 0}), 0.0);
  EXPECT_EQ(constraint_support(free3, {0, 1e-3, 0}), kInf);
  const auto box = PolyhedralConstraint::box({-1, -1, -1}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(constraint_support(box, {2, -3, 0.5}), 5.5);
  const auto floor = PolyhedralConstraint::lower_bounds({-1, -2});
  EXPECT_DOUBLE_EQ(constraint_support(floor, {-1, -1}), 3.0);
  EXPECT_EQ(constraint_support(floor, {1, -1}), kInf);
}

TEST(Cones, RecessionAndPolar) {
  // R x R_+^2 written as -x2 <= 0, -x3 <= 0.
  const PolyhedralConstraint d(3, {{{0, -1, 0}, 0.0}, {{0, 0, -1}, 0.0}});
  EXPECT_EQ(recession_cone(d), d);
  const auto gens = polar_cone(d);
  ASSERT_EQ(gens.size(), 2u);
  for (const auto &g : gens) {
    EXPECT_EQ(g[0], 0.0);
    EXPECT_LE(g[1], 0.0);
    EXPECT_LE(g[2], 0.0);
  }
  const auto box = PolyhedralConstraint::box({-1, -1}, {1, 1});
  const auto rc = recession_cone(box);
  EXPECT_TRUE(rc.conical());
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 0.0, 1.0})
      if (a != 0.0 || b != 0.0) {
        EXPECT_FALSE(rc.contains({a * 1e-3, b}));
      }
  EXPECT_THROW(polar_cone(box), PolarOfNonCone);
  const auto floor = PolyhedralConstraint::lower_bounds({-1.0, -0.5});
  const auto rf = recession_cone(floor);
  EXPECT_TRUE(rf.contains({0.0, 7.0}));
  EXPECT_FALSE(rf.contains({-1e-6, 7.0}));
  EXPECT_TRUE(PolyhedralConstraint::unconstrained(2).conical());
  EXPECT_TRUE(polar_cone(PolyhedralConstraint::unconstrained(2)).empty());
}

TEST(Constraint, RejectsSetsWithoutOrigin) {
  EXPECT_THROW(PolyhedralConstraint(1, {{{1.0}, -0.1}}), InvalidModel);
  EXPECT_THROW(PolyhedralConstraint(2, {{{1.0}, 0.1}}), InvalidModel);
}

TEST(Properties, ConvexityHomogeneityFenchelYoung) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-4, 4), yd(0, 2);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t dim = 1 + rep % 3;
    const auto s = random_cost(rng, dim);
    const auto mp = marginal_price_set(s);
    for (int k = 0; k < 20; ++k) {
      Vector x(dim), x2(dim), v(dim), mid(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = u(rng);
        x2[j] = u(rng);
        v[j] = u(rng);
        mid[j] = 0.5 * (x[j] + x2[j]);
      }
      const double sx = eval_cost(s, x), sx2 = eval_cost(s, x2);
      if (std::isfinite(sx) && std::isfinite(sx2)) {
        EXPECT_LE(eval_cost(s, mid), 0.5 * (sx + sx2) + 1e-10);
      }
      const double r = recession_cost(s, x);
      for (double lam : {2.0, 10.0}) {
        Vector lx = x;
        for (auto &e : lx)
          e *= lam;
        if (std::isfinite(r)) {
          EXPECT_NEAR(recession_cost(s, lx), lam * r, 1e-12 * lam * (1 + std::abs(r)));
        } else {
          EXPECT_EQ(recession_cost(s, lx), kInf);
        }
        if (std::isfinite(sx)) {
          Vector xl = x;
          for (auto &e : xl)
            e /= lam;
          EXPECT_LE(lam * eval_cost(s, xl), r + 1e-9);
        }
      }
      const double y = yd(rng);
      const double conj = conjugate_cost(s, y, v);
      if (std::isfinite(sx) && std::isfinite(conj)) {
        EXPECT_LE(detail::dot(x, v), y * sx + conj + 1e-9);
      }
      for (const auto &g : mp.generators)
        if (std::isfinite(sx)) {
          EXPECT_LE(detail::dot(g, x), sx + 1e-9);
        }
    }
  }
}

TEST(Properties, SupportIsSublinear) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2, 2), h(0, 3);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t dim = 1 + rep % 3;
    std::vector<Halfspace> rows;
    for (int i = 0; i < 4; ++i) {
      Vector g(dim);
      for (auto &e : g)
        e = u(rng);
      rows.push_back({g, h(rng)});
    }
    const PolyhedralConstraint d(dim, rows);
    for (int k = 0; k < 10; ++k) {
      Vector v(dim), w(dim), vw(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        v[j] = u(rng);
        w[j] = u(rng);
        vw[j] = v[j] + w[j];
      }
      const double sv = constraint_support(d, v), sw = constraint_support(d, w);
      EXPECT_GE(sv, 0.0);
      if (std::isfinite(sv) && std::isfinite(sw)) {
        EXPECT_LE(constraint_support(d, vw), sv + sw + 1e-9);
      }
      Vector v3 = v;
      for (auto &e : v3)
        e *= 3.0;
      if (std::isfinite(sv)) {
        EXPECT_NEAR(constraint_support(d, v3), 3.0 * sv, 1e-9 * (1 + sv));
      } else {
        EXPECT_EQ(constraint_support(d, v3), kInf);
      }
    }
  }
}

TEST(Transforms, MarketValues) {
  const auto tree = two_state();
  std::vector<PolyhedralCost> costs{PolyhedralCost::linear({1.0, 4.0}),
                                    PolyhedralCost::linear({1.0, 8.0}),
                                    PolyhedralCost::linear({1.0, 2.0})};
  std::vector<PolyhedralConstraint> cons(3, PolyhedralConstraint::unconstrained(2));
  cons[0] = PolyhedralConstraint::lower_bounds({-1.0, -2.0});
  const MarketModel model(tree, {"cash", "stock"}, costs, cons);
  PortfolioProcess s(2, {{1.0, 4.0}, {1.0, 8.0}, {1.0, 2.0}});
  const auto mv = to_market_values(model, s);
  for (std::size_t n = 0; n < 3; ++n)
    EXPECT_EQ(mv.cost(n), PolyhedralCost::linear({1.0, 1.0}));
  EXPECT_EQ(mv.constraint(0).rows()[1].g, (Vector{0.0, -0.25}));
  EXPECT_EQ(mv.carry(1), (Vector{1.0, 2.0}));
  EXPECT_EQ(mv.carry(2), (Vector{1.0, 0.5}));
  const auto back = from_market_values(mv, s);
  EXPECT_FALSE(back.has_carry());
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(back.cost(n), model.cost(n));
    EXPECT_EQ(back.constraint(n), model.constraint(n));
  }
  PortfolioProcess ones(2, {{1, 1}, {1, 1}, {1, 1}});
  const auto same = to_market_values(model, ones);
  EXPECT_FALSE(same.has_carry());
  EXPECT_EQ(same.cost(1), model.cost(1));
  PortfolioProcess bad(2, {{1, 1}, {1, 0}, {1, 1}});
  EXPECT_THROW(to_market_values(model, bad), NonpositivePrice);
}

TEST(Transforms, MarketValuesInverseIsExactOnPowersOfTwo) {
  std::mt19937_64 rng(5);
  const auto tree = two_state();
  std::uniform_int_distribution<int> e(-3, 3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<PolyhedralCost> costs;
    for (int n = 0; n < 3; ++n)
      costs.push_back(random_cost(rng, 2));
    const MarketModel model(tree, {"a", "b"}, costs,
                            std::vector<PolyhedralConstraint>(
                                3, PolyhedralConstraint::box({-1, -2}, {3, 4})));
    PortfolioProcess s(3, 2);
    for (std::size_t n = 0; n < 3; ++n)
      s[n] = {std::ldexp(1.0, e(rng)), std::ldexp(1.0, e(rng))};
    const auto back = from_market_values(to_market_values(model, s), s);
    for (std::size_t n = 0; n < 3; ++n) {
      EXPECT_EQ(back.cost(n), model.cost(n));
      EXPECT_EQ(back.constraint(n), model.constraint(n));
    }
  }
}

TEST(Numeraire, Reduction) {
  const auto tree = two_state();
  std::vector<PolyhedralCost> costs{PolyhedralCost::linear({1.0, 4.0}),
                                    PolyhedralCost::linear({1.0, 8.0}),
                                    PolyhedralCost::linear({1.0, 2.0})};
  std::vector<PolyhedralConstraint> cons(3, PolyhedralConstraint::unconstrained(2));
  const MarketModel model(tree, {"cash", "stock"}, costs, cons);
  const auto red = reduce_with_numeraire(model);
  EXPECT_EQ(red.dim(), 1u);
  EXPECT_EQ(red.assets, (std::vector<std::string>{"stock"}));
  EXPECT_EQ(red.terms[1][0][0].a, (Vector{8.0}));

  auto bad_costs = costs;
  bad_costs[1] = PolyhedralCost::linear({2.0, 8.0});
  EXPECT_THROW(reduce_with_numeraire(MarketModel(tree, {"c", "s"}, bad_costs, cons)),
               NoNumeraire);
  auto bad_cons = cons;
  bad_cons[0] = PolyhedralConstraint::lower_bounds({-1.0, -1.0});
  EXPECT_THROW(reduce_with_numeraire(MarketModel(tree, {"c", "s"}, costs, bad_cons)),
               NoNumeraire);
  // A spread on cash is not a numeraire.
  auto spread = costs;
  spread[0] = PolyhedralCost::from_pieces({{{1.0, 4.0}, 0.0}, {{1.1, 4.0}, 0.0}});
  EXPECT_THROW(reduce_with_numeraire(MarketModel(tree, {"c", "s"}, spread, cons)),
               NoNumeraire);
}

TEST(Model, Validation) {
  const auto tree = two_state();
  std::vector<PolyhedralCost> costs(3, PolyhedralCost::linear({1.0}));
  std::vector<PolyhedralConstraint> cons(3, PolyhedralConstraint::unconstrained(1));
  EXPECT_NO_THROW(MarketModel(tree, {"a"}, costs, cons));
  EXPECT_THROW(MarketModel(tree, {"a"}, {costs[0]}, cons), InvalidModel);
  EXPECT_THROW(MarketModel(tree, {"a", "b"}, costs, cons), InvalidModel);
  EXPECT_THROW(MarketModel(tree, {"a"}, costs, cons, {{1.0}, {0.0}, {1.0}}),
               InvalidModel);
  const MarketModel m(tree, {"a"}, costs, cons);
  EXPECT_TRUE(m.sublinear());
  EXPECT_TRUE(m.conical());
  const auto deep = m.with_scaled_costs(3.0);
  EXPECT_EQ(deep.cost(0), m.cost(0));
}
