// Cooperation thresholds and exact cooperation rates for the four social dilemmas
// under uniformly distributed relative tolerance and belief.
#include <iostream>

#include "toleq/toleq.hpp"

int main() {
  using namespace toleq;
  const RelativeTypeDistribution uniform_types;
  const DilemmaSpec specs[] = {PrisonersDilemma{5, 2}, TravelersDilemma{2, 100, 2}, PublicGoods{4, 0.5, 1},
                               Bertrand{2, 2, 100}};
  for (const auto& spec : specs) {
    std::cout << io::to_json(spec).dump() << "  threshold(beta=0.5) = " << cooperation_threshold(spec, 0.5)
              << "  exact rate = " << exact_cooperation_rate(spec, uniform_types) << '\n';
  }
}
