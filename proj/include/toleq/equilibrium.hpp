#pragma once

// Verification of pi-tolerant equilibria.
//
// A profile sigma is a pi-tolerant equilibrium when every player's mixture can
// be split across tolerance types so that each type t only plays strategies
// whose regret is at most t (E1) and the type-weighted split reproduces
// sigma_i (E2). Consistency sets grow with t, so the split exists iff, for
// every atom t, the mass of types with tolerance <= t fits inside the sigma-mass
// of strategies with regret <= t. The witness is built greedily from that.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "toleq/game.hpp"
#include "toleq/numeric.hpp"
#include "toleq/tolerance.hpp"

namespace toleq {

struct Violation {
  enum class Kind { Threshold, UnsupportedStrategy };
  Kind kind = Kind::Threshold;
  std::size_t player = 0;
  double threshold = 0.0;  // tolerance atom at which the inequality fails
  double excess = 0.0;     // F(t) minus the sigma-mass available to types <= t
  std::optional<std::size_t> strategy;  // set for UnsupportedStrategy

  std::string describe() const {
    std::ostringstream os;
    os << "player " << player << ": ";
    if (kind == Kind::UnsupportedStrategy) {
      os << "strategy " << *strategy << " has regret above every tolerance (max atom " << threshold << ")";
    } else {
      os << "types with tolerance <= " << threshold << " need " << excess
         << " more mass than the strategies they may play";
    }
    return os.str();
  }
};

struct EquilibriumVerdict {
  bool is_equilibrium = false;
  std::optional<std::vector<TypeStrategyMap>> witness;
  std::optional<Violation> violation;
};

namespace detail {

inline void check_tolerance_profile(const Game& game, const DiscreteToleranceProfile& pi) {
  if (pi.size() != game.num_players()) {
    throw std::invalid_argument("tolerance profile has " + std::to_string(pi.size()) + " entries for a " +
                                std::to_string(game.num_players()) + "-player game");
  }
}

// Hall check plus greedy split for one player. Returns the violation or fills `witness`.
inline std::optional<Violation> split_player(const std::vector<double>& sigma, const std::vector<double>& regret,
                                             const DiscreteToleranceDist& pi, std::size_t player,
                                             TypeStrategyMap& witness, const Tolerance& tol) {
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < sigma.size(); ++s) {
    if (sigma[s] > tol.eps) support.push_back(s);
  }
  std::stable_sort(support.begin(), support.end(),
                   [&](std::size_t x, std::size_t y) { return regret[x] < regret[y]; });

  const auto& atoms = pi.support();
  const std::vector<double> cum = pi.cumulative();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    double available = 0.0;
    for (std::size_t s : support) {
      if (approx_le(regret[s], atoms[k], tol)) available += sigma[s];
    }
    if (!approx_le(cum[k], available, tol)) {
      Violation v;
      v.player = player;
      v.threshold = atoms[k];
      v.excess = cum[k] - available;
      if (k + 1 == atoms.size()) {
        for (std::size_t s : support) {
          if (!approx_le(regret[s], atoms[k], tol)) {
            v.kind = Violation::Kind::UnsupportedStrategy;
            v.strategy = s;
            break;
          }
        }
      }
      return v;
    }
  }

  std::vector<double> remaining(sigma.size(), 0.0);
  for (std::size_t s : support) remaining[s] = sigma[s];
  witness.atoms = atoms;
  witness.strategies.clear();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const bool last = k + 1 == atoms.size();
    double need = pi.probs()[k];
    std::vector<double> take(sigma.size(), 0.0);
    for (std::size_t s : support) {
      if (!approx_le(regret[s], atoms[k], tol)) break;  // support is sorted by regret
      const double amount = last ? remaining[s] : std::min(need, remaining[s]);
      take[s] = amount;
      remaining[s] -= amount;
      need -= amount;
      if (!last && need <= 0.0) break;
    }
    const double total = std::accumulate(take.begin(), take.end(), 0.0);
    if (!(total > 0.0)) {
      // Only reachable through rounding when pi(t) <= eps; fall back to the cheapest strategy.
      take[support.front()] = 1.0;
    }
    const double norm = total > 0.0 ? total : 1.0;
    for (double& p : take) p /= norm;
    witness.strategies.emplace_back(std::move(take), tol);
  }
  return std::nullopt;
}

}  // namespace detail

inline EquilibriumVerdict verify_tolerant_equilibrium(const Game& game, const MixedProfile& profile,
                                                      const DiscreteToleranceProfile& pi,
                                                      const Tolerance& tol = {}) {
  check_profile(game, profile);
  detail::check_tolerance_profile(game, pi);
  EquilibriumVerdict verdict;
  std::vector<TypeStrategyMap> witness(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const std::vector<double> r = regrets(game, profile, i);
    if (auto v = detail::split_player(profile[i].probs(), r, pi[i], i, witness[i], tol)) {
      verdict.violation = *v;
      return verdict;
    }
  }
  verdict.is_equilibrium = true;
  verdict.witness = std::move(witness);
  return verdict;
}

inline bool verify_nash(const Game& game, const MixedProfile& profile, const Tolerance& tol = {}) {
  const DiscreteToleranceProfile zero(game.num_players(), DiscreteToleranceDist::point_mass(0.0));
  return verify_tolerant_equilibrium(game, profile, zero, tol).is_equilibrium;
}

// Every strategy in each player's support is an epsilon-best response.
inline bool verify_gp_epsilon_nash(const Game& game, const MixedProfile& profile, double epsilon,
                                   const Tolerance& tol = {}) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  check_profile(game, profile);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const std::vector<double> r = regrets(game, profile, i);
    for (std::size_t s = 0; s < r.size(); ++s) {
      if (profile[i][s] > tol.eps && !approx_le(r[s], epsilon, tol)) return false;
    }
  }
  return true;
}

// Checks E1 and E2 for a proposed witness. Returns an empty string when valid,
// otherwise a description of the first failure.
inline std::string check_witness(const Game& game, const MixedProfile& profile, const DiscreteToleranceProfile& pi,
                                 const std::vector<TypeStrategyMap>& witness, double mixture_tol = 1e-9,
                                 const Tolerance& tol = {}) {
  check_profile(game, profile);
  detail::check_tolerance_profile(game, pi);
  if (witness.size() != game.num_players()) return "witness has wrong player count";
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    try {
      witness[i].check_domain(pi[i], tol);
    } catch (const std::invalid_argument& e) {
      return "player " + std::to_string(i) + ": " + e.what();
    }
    const std::vector<double> r = regrets(game, profile, i);
    for (std::size_t k = 0; k < witness[i].atoms.size(); ++k) {
      const auto& g = witness[i].strategies[k];
      if (g.size() != r.size()) return "player " + std::to_string(i) + ": witness strategy has wrong length";
      for (std::size_t s = 0; s < r.size(); ++s) {
        if (g[s] > 0.0 && !approx_le(r[s], witness[i].atoms[k], tol)) {
          return "player " + std::to_string(i) + ": E1 fails for strategy " + std::to_string(s) + " at type " +
                 std::to_string(witness[i].atoms[k]);
        }
      }
    }
    const std::vector<double> mix = witness[i].mixture(pi[i]);
    for (std::size_t s = 0; s < mix.size(); ++s) {
      if (std::abs(mix[s] - profile[i][s]) > mixture_tol) {
        return "player " + std::to_string(i) + ": E2 fails for strategy " + std::to_string(s);
      }
    }
  }
  return {};
}

// Closed interval of cooperation probabilities alpha (mass on strategy 0) such
// that the symmetric profile (alpha, 1 - alpha) for both players is an equilibrium.
struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline MixedProfile symmetric_2x2_profile(double alpha) {
  const MixedStrategy s({alpha, 1.0 - alpha});
  return {s, s};
}

inline std::vector<AlphaInterval> find_symmetric_2x2_equilibria(const Game& game, const DiscreteToleranceProfile& pi,
                                                                std::size_t grid, const Tolerance& tol = {}) {
  if (game.num_players() != 2 || game.num_strategies(0) != 2 || game.num_strategies(1) != 2) {
    throw std::invalid_argument("symmetric search needs a 2-player 2-strategy game");
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t t = 0; t < 2; ++t) {
      if (!approx_eq(game.payoff({s, t}, 0), game.payoff({t, s}, 1), tol)) {
        throw std::invalid_argument("symmetric search needs a symmetric game");
      }
    }
  }
  if (grid < 2) throw std::invalid_argument("grid needs at least two points");
  const std::vector<double> alphas = linspace(0.0, 1.0, grid - 1);
  std::vector<AlphaInterval> out;
  bool open = false;
  for (double a : alphas) {
    const bool ok = verify_tolerant_equilibrium(game, symmetric_2x2_profile(a), pi, tol).is_equilibrium;
    if (ok && open) {
      out.back().hi = a;
    } else if (ok) {
      out.push_back({a, a});
    }
    open = ok;
  }
  return out;
}

}  // namespace toleq
