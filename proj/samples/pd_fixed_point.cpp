// Symmetric particularly cooperative equilibria of a tolerant Prisoner's Dilemma
// for a uniform tolerance distribution and a multi-root piecewise-linear one.
#include <iostream>

#include "toleq/toleq.hpp"

int main() {
  using namespace toleq;
  const PdPayoffs unique_case(3, -1, 5, 0);  // dC = 2 > dD = 1
  const auto r = solve_symmetric(unique_case, ToleranceCdf::uniform(0, 4));
  std::cout << "uniform(0,4): " << to_string(r.classification) << ", alpha* = " << r.roots.front().alpha << '\n';

  const PdPayoffs multi_case(3, -1, 4, 2);  // dC = 1 < dD = 3
  const auto F = ToleranceCdf::piecewise_linear({{0, 0}, {1, 0.05}, {1.5, 0.1}, {1.7, 0.5}, {2.5, 0.55},
                                                 {2.7, 0.95}, {3, 0.96}, {4, 1}});
  const auto m = solve_symmetric(multi_case, F);
  std::cout << "piecewise-linear: " << m.roots.size() << " roots:";
  for (const auto& root : m.roots) std::cout << ' ' << root.alpha;
  std::cout << '\n';

  const auto none = solve_discrete(unique_case, DiscreteToleranceDist::point_mass(1.5));
  std::cout << "point mass at 1.5: " << (none.empty() ? "no particularly cooperative equilibrium" : "solved") << '\n';
}
