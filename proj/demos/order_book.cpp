// Two-period limit order book read from JSON: ask and bid prices of a claim,
// its marginal price and the market prices implied by the dual deflator.

#include "superhedge/duality.hpp"
#include "superhedge/io.hpp"

#include <cstdio>
#include <string>

using namespace superhedge;

int main(int argc, char **argv) {
  const std::string dir = argc > 1 ? argv[1] : SUPERHEDGE_DATA_DIR;
  const auto model = io::model_from_json(io::read_json(dir + "/orderbook.json"));
  const auto &tree = model.tree();
  const auto claim = io::claim_from_json(tree, io::read_json(dir + "/orderbook_call.json"));
  const auto premium = ClaimProcess::initial_unit(tree);
  const auto none = ClaimProcess::zero(tree);

  std::printf("ask (seller's price): %.6f\n", selling_price(model, none, claim, premium));
  std::printf("bid (buyer's price):  %.6f\n", buying_price(model, none, claim, premium));
  std::printf("marginal price:       %.6f\n", marginal_price(model, none, claim, premium));

  const auto cert = extract_deflator(model, claim, premium);
  for (std::size_t n = 0; n < tree.size(); ++n) {
    std::printf("%-3s y = %.6f", tree.id(n).c_str(), cert.y[n]);
    if (cert.prices[n])
      std::printf("  stock price %.6f", (*cert.prices[n])[1]);
    std::printf("\n");
  }
  return 0;
}
