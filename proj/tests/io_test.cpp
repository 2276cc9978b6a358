#include "superhedge/io.hpp"
#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>

using namespace superhedge;
using namespace testing_support;
using io::Json;

namespace {

std::string data(const std::string &name) {
  return std::string(SUPERHEDGE_DATA_DIR) + "/" + name;
}

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("superhedge_io_" + name)).string();
}

} // namespace

TEST(IoTree, RoundTrip) {
  const auto tree = two_state_tree();
  const auto again = io::tree_from_json(io::tree_to_json(tree));
  ASSERT_EQ(again.size(), tree.size());
  for (std::size_t n = 0; n < tree.size(); ++n) {
    EXPECT_EQ(again.id(n), tree.id(n));
    EXPECT_EQ(again.parent(n), tree.parent(n));
    EXPECT_EQ(again.prob(n), tree.prob(n));
  }
}

TEST(IoTree, RejectsBadProbabilities) {
  const Json j = Json::parse(R"({"nodes": [{"id": "r", "parent": null, "prob": 1},
                                          {"id": "a", "parent": "r", "prob": 0.7},
                                          {"id": "b", "parent": "r", "prob": 0.2}]})");
  EXPECT_THROW(io::tree_from_json(j), MalformedTree);
}

TEST(IoProcess, ClaimAndPortfolioRoundTrip) {
  const auto tree = two_state_tree();
  const auto c = claim3(0.25, -1.0 / 3.0, 7.0);
  const auto back = io::claim_from_json(tree, io::claim_to_json(tree, c));
  for (std::size_t n = 0; n < 3; ++n)
    EXPECT_EQ(back[n], c[n]);
  const PortfolioProcess x(2, {{1.0 / 7.0, -2.0}, {0.0, 0.0}, {0.0, 0.0}});
  const auto xb = io::portfolio_from_json(tree, 2, io::portfolio_to_json(tree, x));
  EXPECT_EQ(xb[0], x[0]);
}

TEST(IoProcess, MissingNodeAndDefault) {
  const auto tree = two_state_tree();
  EXPECT_THROW(io::claim_from_json(tree, Json::parse(R"({"values": {"root": 1}})")),
               ShapeMismatch);
  const auto c =
      io::claim_from_json(tree, Json::parse(R"({"values": {"root": 1}, "default": 0.5})"));
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(c[2], 0.5);
  EXPECT_THROW(io::claim_from_json(tree, Json::parse(R"({"values": {"nowhere": 1}})")),
               std::exception);
}

TEST(IoProcess, InfinityIsWrittenAsString) {
  EXPECT_EQ(io::number(kInf), Json("inf"));
  EXPECT_EQ(io::to_number(Json("-inf"), "x"), -kInf);
  EXPECT_THROW(io::to_number(Json("abc"), "x"), InvalidModel);
}

TEST(IoModel, BinomialFileMatchesBuiltModel) {
  const auto m = io::model_from_json(io::read_json(data("binomial.json")));
  const auto ref = binomial_model();
  ASSERT_EQ(m.tree().size(), 3u);
  for (std::size_t n = 0; n < 3; ++n)
    EXPECT_TRUE(m.cost(n) == ref.cost(n));
  EXPECT_FALSE(m.has_carry());
}

TEST(IoModel, LadderBoundsAndDefaults) {
  const auto m = io::model_from_json(io::read_json(data("orderbook.json")));
  EXPECT_EQ(m.tree().size(), 7u);
  for (std::size_t n = 0; n < 7; ++n) {
    EXPECT_TRUE(m.constraint(n).contains({-1000.0, 5.0}));
    EXPECT_FALSE(m.constraint(n).contains({0.0, 5.5}));
    // Two ask levels: 2 shares at 100.5, then 102 at the root.
    if (n == 0) {
      EXPECT_NEAR(eval_cost(m.cost(n), {0.0, 3.0}), 2 * 100.5 + 102.0, 1e-9);
    }
  }
}

TEST(IoModel, RoundTripKeepsCostsConstraintsAndCarry) {
  const auto tree = two_state_tree();
  std::vector<AssetLadder> books{AssetLadder{{{1.0, kInf}}, {{1.0, kInf}}},
                                 AssetLadder{{{2.0, 1.0}, {2.5, kInf}}, {{1.5, 2.0}}}};
  const auto cost = cost_from_ladder(books);
  const MarketModel m(tree, {"cash", "stock"}, {cost, cost, cost},
                      {PolyhedralConstraint::box({-5, -1}, {5, 1}),
                       PolyhedralConstraint::unconstrained(2),
                       PolyhedralConstraint::unconstrained(2)},
                      {{1.0, 1.0}, {1.05, 1.0}, {1.05, 0.9}});
  const auto path = temp_path("model.json");
  io::write_json(path, io::model_to_json(m));
  const auto back = io::model_from_json(io::read_json(path));
  std::remove(path.c_str());
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_TRUE(back.cost(n) == m.cost(n));
    EXPECT_EQ(back.constraint(n).rows().size(), m.constraint(n).rows().size());
    EXPECT_EQ(back.carry(n), m.carry(n));
  }
  EXPECT_TRUE(back.has_carry());
}

TEST(IoModel, ErrorsCarryCategories) {
  EXPECT_THROW(io::read_json("/nonexistent/model.json"), IoError);
  const auto path = temp_path("broken.json");
  {
    std::FILE *f = std::fopen(path.c_str(), "w");
    std::fputs("{ not json", f);
    std::fclose(f);
  }
  EXPECT_THROW(io::read_json(path), IoError);
  std::remove(path.c_str());
  const Json no_cost = Json::parse(
      R"({"tree": {"nodes": [{"id": "r", "parent": null, "prob": 1}]}, "assets": ["a"]})");
  EXPECT_THROW(io::model_from_json(no_cost), InvalidModel);
  const Json wrong_dim = Json::parse(
      R"({"tree": {"nodes": [{"id": "r", "parent": null, "prob": 1}]}, "assets": ["a"],
          "default": {"cost": {"linear": [1, 2]}}})");
  EXPECT_THROW(io::model_from_json(wrong_dim), ShapeMismatch);
  const Json crossed = Json::parse(
      R"({"tree": {"nodes": [{"id": "r", "parent": null, "prob": 1}]}, "assets": ["a"],
          "default": {"cost": {"ladder": [{"asks": [{"price": 1}], "bids": [{"price": 2}]}]}}})");
  EXPECT_THROW(io::model_from_json(crossed), CrossedBook);
}
