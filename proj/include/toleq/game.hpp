#pragma once

// Finite normal-form games, mixed strategies, expected utilities and regrets.
//
// Payoff layout: pure profiles are enumerated row-major over players in index
// order (player 0 is the slowest-varying index). Entry k of the flat payoff
// array holds the payoff vector of profile k, one value per player.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toleq/numeric.hpp"

namespace toleq {

class Game {
 public:
  Game(std::vector<std::vector<std::string>> strategy_labels, std::vector<double> payoffs)
      : labels_(std::move(strategy_labels)), payoffs_(std::move(payoffs)) {
    if (labels_.empty()) throw std::invalid_argument("game needs at least one player");
    strides_.assign(labels_.size(), 1);
    std::size_t profiles = 1;
    for (std::size_t i = labels_.size(); i-- > 0;) {
      if (labels_[i].empty()) {
        throw std::invalid_argument("player " + std::to_string(i) + " has no strategies");
      }
      strides_[i] = profiles;
      profiles *= labels_[i].size();
    }
    num_profiles_ = profiles;
    if (payoffs_.size() != num_profiles_ * labels_.size()) {
      throw std::invalid_argument("payoff tensor has " + std::to_string(payoffs_.size()) +
                                  " entries, expected " +
                                  std::to_string(num_profiles_ * labels_.size()));
    }
    for (double v : payoffs_) {
      if (!std::isfinite(v)) throw std::invalid_argument("payoffs must be finite");
    }
  }

  // Builds a game by calling payoff(profile) -> vector<double> for every pure profile.
  template <class PayoffFn>
  static Game from_function(std::vector<std::vector<std::string>> labels, PayoffFn&& payoff) {
    std::vector<std::size_t> counts;
    for (const auto& l : labels) counts.push_back(l.size());
    std::size_t total = 1;
    for (auto c : counts) {
      if (c == 0) throw std::invalid_argument("player has no strategies");
      total *= c;
    }
    std::vector<double> flat;
    flat.reserve(total * counts.size());
    std::vector<std::size_t> profile(counts.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
      const std::vector<double> u = payoff(static_cast<const std::vector<std::size_t>&>(profile));
      if (u.size() != counts.size()) throw std::invalid_argument("payoff vector has wrong length");
      flat.insert(flat.end(), u.begin(), u.end());
      for (std::size_t i = counts.size(); i-- > 0;) {
        if (++profile[i] < counts[i]) break;
        profile[i] = 0;
      }
    }
    return Game(std::move(labels), std::move(flat));
  }

  std::size_t num_players() const { return labels_.size(); }
  std::size_t num_strategies(std::size_t player) const { return labels_.at(player).size(); }
  std::size_t num_profiles() const { return num_profiles_; }
  const std::vector<std::vector<std::string>>& strategy_labels() const { return labels_; }
  const std::vector<double>& flat_payoffs() const { return payoffs_; }
  std::size_t stride(std::size_t player) const { return strides_[player]; }

  std::size_t profile_index(const std::vector<std::size_t>& pure) const {
    if (pure.size() != num_players()) throw std::invalid_argument("pure profile length mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < pure.size(); ++i) {
      if (pure[i] >= labels_[i].size()) throw std::out_of_range("strategy index out of range");
      idx += pure[i] * strides_[i];
    }
    return idx;
  }

  double payoff(std::size_t profile, std::size_t player) const {
    return payoffs_[profile * num_players() + player];
  }
  double payoff(const std::vector<std::size_t>& pure, std::size_t player) const {
    return payoff(profile_index(pure), player);
  }

  friend bool operator==(const Game&, const Game&) = default;

 private:
  std::vector<std::vector<std::string>> labels_;
  std::vector<double> payoffs_;
  std::vector<std::size_t> strides_;
  std::size_t num_profiles_ = 0;
};

class MixedStrategy {
 public:
  explicit MixedStrategy(std::vector<double> probs, const Tolerance& tol = {})
      : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("mixed strategy must be non-empty");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < -tol.eps || p > 1.0 + tol.eps) {
        throw std::invalid_argument("mixed strategy entry outside [0,1]");
      }
      sum += p;
    }
    if (!approx_eq(sum, 1.0, tol)) {
      throw std::invalid_argument("mixed strategy sums to " + std::to_string(sum) + ", not 1");
    }
    for (double& p : probs_) p = std::clamp(p, 0.0, 1.0);
  }

  static MixedStrategy pure(std::size_t num_strategies, std::size_t which) {
    if (which >= num_strategies) throw std::out_of_range("pure strategy index out of range");
    std::vector<double> p(num_strategies, 0.0);
    p[which] = 1.0;
    return MixedStrategy(std::move(p));
  }
  static MixedStrategy uniform(std::size_t num_strategies) {
    return MixedStrategy(std::vector<double>(num_strategies, 1.0 / static_cast<double>(num_strategies)));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t s) const { return probs_[s]; }
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> probs_;
};

using MixedProfile = std::vector<MixedStrategy>;

inline void check_profile(const Game& game, const MixedProfile& profile) {
  if (profile.size() != game.num_players()) {
    throw std::invalid_argument("profile has " + std::to_string(profile.size()) +
                                " components for a " + std::to_string(game.num_players()) +
                                "-player game");
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].size() != game.num_strategies(i)) {
      throw std::invalid_argument("player " + std::to_string(i) + " strategy has " +
                                  std::to_string(profile[i].size()) + " entries, game has " +
                                  std::to_string(game.num_strategies(i)));
    }
  }
}

namespace detail {

// Visits every pure profile of the players in `who` restricted to positive-probability
// strategies; fn(base_index, weight) receives the partial profile index and its probability.
template <class Fn>
void for_each_support_profile(const Game& game, const MixedProfile& profile,
                              const std::vector<std::size_t>& who, Fn&& fn) {
  std::vector<std::vector<std::pair<std::size_t, double>>> supports(who.size());
  for (std::size_t k = 0; k < who.size(); ++k) {
    const auto& sigma = profile[who[k]];
    for (std::size_t s = 0; s < sigma.size(); ++s) {
      if (sigma[s] > 0.0) supports[k].emplace_back(s, sigma[s]);
    }
  }
  std::vector<std::size_t> cursor(who.size(), 0);
  while (true) {
    std::size_t index = 0;
    double weight = 1.0;
    for (std::size_t k = 0; k < who.size(); ++k) {
      const auto& [s, p] = supports[k][cursor[k]];
      index += s * game.stride(who[k]);
      weight *= p;
    }
    fn(index, weight);
    std::size_t k = who.size();
    while (k > 0) {
      --k;
      if (++cursor[k] < supports[k].size()) break;
      cursor[k] = 0;
      if (k == 0) return;
    }
    if (who.empty()) return;
  }
}

}  // namespace detail

inline double expected_utility(const Game& game, const MixedProfile& profile, std::size_t player) {
  check_profile(game, profile);
  if (player >= game.num_players()) throw std::out_of_range("player index out of range");
  std::vector<std::size_t> everyone(game.num_players());
  std::iota(everyone.begin(), everyone.end(), 0);
  double total = 0.0;
  detail::for_each_support_profile(game, profile, everyone, [&](std::size_t idx, double w) {
    total += w * game.payoff(idx, player);
  });
  return total;
}

// u_i(s', sigma_{-i}) for every pure strategy s' of `player`. The player's own
// component of `profile` is ignored.
inline std::vector<double> pure_strategy_utilities(const Game& game, const MixedProfile& profile,
                                                   std::size_t player) {
  check_profile(game, profile);
  if (player >= game.num_players()) throw std::out_of_range("player index out of range");
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < game.num_players(); ++j) {
    if (j != player) others.push_back(j);
  }
  std::vector<double> utils(game.num_strategies(player), 0.0);
  const std::size_t stride = game.stride(player);
  detail::for_each_support_profile(game, profile, others, [&](std::size_t base, double w) {
    for (std::size_t s = 0; s < utils.size(); ++s) {
      utils[s] += w * game.payoff(base + s * stride, player);
    }
  });
  return utils;
}

// Best-response payoff minus each strategy's payoff against sigma_{-i}; never negative.
inline std::vector<double> regrets(const Game& game, const MixedProfile& profile, std::size_t player) {
  std::vector<double> r = pure_strategy_utilities(game, profile, player);
  const double best = *std::max_element(r.begin(), r.end());
  for (double& v : r) v = std::max(0.0, best - v);
  return r;
}

inline double regret(const Game& game, const MixedProfile& profile, std::size_t player,
                     std::size_t strategy) {
  const auto r = regrets(game, profile, player);
  if (strategy >= r.size()) throw std::out_of_range("strategy index out of range");
  return r[strategy];
}

// Whether `strategy` is a t-best response to the other players' part of `profile`.
inline bool is_consistent(const Game& game, const MixedProfile& profile, std::size_t player,
                          std::size_t strategy, double t, const Tolerance& tol = {}) {
  if (!(t >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  return approx_le(regret(game, profile, player, strategy), t, tol);
}

}  // namespace toleq
