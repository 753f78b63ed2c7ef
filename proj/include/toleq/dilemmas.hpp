#pragma once

// The four social dilemmas: game builders, closed-form tolerance thresholds for
// cooperating, relative tolerances and cooperation rates over relative types.
//
// "Cooperate" is a player's part of the welfare-maximizing profile and
// "defect" their part of the Nash profile. Thresholds taking a belief beta
// assume every opponent independently cooperates with probability beta and
// defects otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "toleq/game.hpp"
#include "toleq/numeric.hpp"

namespace toleq {

struct PrisonersDilemma {
  double b = 0.0;  // benefit given to the other player
  double c = 0.0;  // cost paid by the cooperator
  friend bool operator==(const PrisonersDilemma&, const PrisonersDilemma&) = default;
};

struct TravelersDilemma {
  int L = 0;
  int H = 0;
  int bonus = 0;
  friend bool operator==(const TravelersDilemma&, const TravelersDilemma&) = default;
};

// Contributions are multiples of 1/levels of the unit endowment.
struct PublicGoods {
  int N = 0;
  double rho = 0.0;
  int levels = 1;
  friend bool operator==(const PublicGoods&, const PublicGoods&) = default;
};

struct Bertrand {
  int n = 0;
  int L = 0;
  int H = 0;
  friend bool operator==(const Bertrand&, const Bertrand&) = default;
};

using DilemmaSpec = std::variant<PrisonersDilemma, TravelersDilemma, PublicGoods, Bertrand>;

inline void validate(const DilemmaSpec& spec) {
  struct {
    void operator()(const PrisonersDilemma& g) const {
      if (!(g.c > 0.0 && g.b > g.c && std::isfinite(g.b))) throw std::invalid_argument("prisoner's dilemma needs b > c > 0");
    }
    void operator()(const TravelersDilemma& g) const {
      if (!(g.H > g.L && g.L >= 1 && g.bonus >= 1)) throw std::invalid_argument("traveler's dilemma needs H > L >= 1 and bonus >= 1");
    }
    void operator()(const PublicGoods& g) const {
      if (g.N < 2) throw std::invalid_argument("public goods needs N >= 2");
      if (!(g.rho > 1.0 / g.N && g.rho < 1.0)) throw std::invalid_argument("public goods needs 1/N < rho < 1");
      if (g.levels < 1) throw std::invalid_argument("public goods needs at least one contribution level");
    }
    void operator()(const Bertrand& g) const {
      if (!(g.n >= 2 && g.H > g.L && g.L >= 2)) throw std::invalid_argument("bertrand needs n >= 2 and H > L >= 2");
    }
  } check;
  std::visit(check, spec);
}

inline std::size_t num_players(const DilemmaSpec& spec) {
  struct {
    std::size_t operator()(const PrisonersDilemma&) const { return 2; }
    std::size_t operator()(const TravelersDilemma&) const { return 2; }
    std::size_t operator()(const PublicGoods& g) const { return static_cast<std::size_t>(g.N); }
    std::size_t operator()(const Bertrand& g) const { return static_cast<std::size_t>(g.n); }
  } count;
  return std::visit(count, spec);
}

inline bool requires_belief(const DilemmaSpec& spec) {
  return std::holds_alternative<TravelersDilemma>(spec) || std::holds_alternative<Bertrand>(spec);
}

// A built dilemma with the cooperate (welfare) and defect (Nash) strategy of each player.
struct DilemmaGame {
  Game game;
  std::vector<std::size_t> cooperate;
  std::vector<std::size_t> defect;

  // Each opponent of `player` plays beta*cooperate + (1-beta)*defect; the
  // player's own slot holds its cooperate strategy.
  MixedProfile belief_profile(std::size_t player, double beta) const {
    MixedProfile profile;
    for (std::size_t j = 0; j < game.num_players(); ++j) {
      std::vector<double> p(game.num_strategies(j), 0.0);
      if (j == player) {
        p[cooperate[j]] = 1.0;
      } else {
        p[cooperate[j]] += beta;
        p[defect[j]] += 1.0 - beta;
      }
      profile.emplace_back(std::move(p));
    }
    return profile;
  }
};

namespace detail {

inline std::vector<std::string> integer_labels(int lo, int hi) {
  std::vector<std::string> labels;
  for (int v = lo; v <= hi; ++v) labels.push_back(std::to_string(v));
  return labels;
}

}  // namespace detail

inline DilemmaGame build_game(const DilemmaSpec& spec) {
  validate(spec);
  struct {
    DilemmaGame operator()(const PrisonersDilemma& g) const {
      const double b = g.b, c = g.c;
      Game game({{"C", "D"}, {"C", "D"}}, {b - c, b - c, -c, b, b, -c, 0.0, 0.0});
      return {std::move(game), {0, 0}, {1, 1}};
    }
    DilemmaGame operator()(const TravelersDilemma& g) const {
      const auto labels = detail::integer_labels(g.L, g.H);
      const int L = g.L, bonus = g.bonus;
      Game game = Game::from_function({labels, labels}, [&](const std::vector<std::size_t>& s) {
        const double m0 = L + static_cast<int>(s[0]);
        const double m1 = L + static_cast<int>(s[1]);
        if (m0 == m1) return std::vector<double>{m0, m1};
        const double low = std::min(m0, m1);
        return m0 < m1 ? std::vector<double>{low + bonus, low - bonus} : std::vector<double>{low - bonus, low + bonus};
      });
      const auto top = static_cast<std::size_t>(g.H - g.L);
      return {std::move(game), {top, top}, {0, 0}};
    }
    DilemmaGame operator()(const PublicGoods& g) const {
      std::vector<std::string> labels;
      for (int k = 0; k <= g.levels; ++k) labels.push_back(std::to_string(static_cast<double>(k) / g.levels));
      const std::vector<std::vector<std::string>> all(static_cast<std::size_t>(g.N), labels);
      const double rho = g.rho;
      const double levels = g.levels;
      Game game = Game::from_function(all, [&](const std::vector<std::size_t>& s) {
        double pool = 0.0;
        for (auto x : s) pool += static_cast<double>(x) / levels;
        std::vector<double> u(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) u[i] = 1.0 - static_cast<double>(s[i]) / levels + rho * pool;
        return u;
      });
      const auto n = static_cast<std::size_t>(g.N);
      return {std::move(game), std::vector<std::size_t>(n, static_cast<std::size_t>(g.levels)),
              std::vector<std::size_t>(n, 0)};
    }
    DilemmaGame operator()(const Bertrand& g) const {
      const auto labels = detail::integer_labels(g.L, g.H);
      const std::vector<std::vector<std::string>> all(static_cast<std::size_t>(g.n), labels);
      const int L = g.L;
      Game game = Game::from_function(all, [&](const std::vector<std::size_t>& s) {
        const std::size_t lowest = *std::min_element(s.begin(), s.end());
        const auto winners = static_cast<double>(std::count(s.begin(), s.end(), lowest));
        std::vector<double> u(s.size(), 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s[i] == lowest) u[i] = (L + static_cast<double>(lowest)) / winners;
        }
        return u;
      });
      const auto n = static_cast<std::size_t>(g.n);
      return {std::move(game), std::vector<std::size_t>(n, static_cast<std::size_t>(g.H - g.L)),
              std::vector<std::size_t>(n, 0)};
    }
  } build;
  return std::visit(build, spec);
}

// f(n) = sum_k beta^k (1-beta)^(n-1-k) C(n-1,k) / (n-k): the expected share of a
// firm pricing at the floor when each of the n-1 rivals prices at H with probability beta.
inline double bertrand_f(int n, double beta) {
  if (n < 2) throw std::invalid_argument("bertrand_f needs n >= 2");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
  const int m = n - 1;
  if (beta == 0.0) return 1.0 / n;
  if (beta == 1.0) return 1.0;
  const double lb = std::log(beta);
  const double lq = std::log1p(-beta);
  const double lgm = std::lgamma(m + 1.0);
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double log_term = lgm - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * lb + (m - k) * lq;
    sum += std::exp(log_term) / (n - k);
  }
  return sum;
}

// Minimal absolute tolerance at which cooperating is consistent. PD and public
// goods ignore beta; the traveler's dilemma falls back to the belief-free bound
// 2b-1 when beta is absent; Bertrand requires beta.
inline double cooperation_threshold(const DilemmaSpec& spec, std::optional<double> beta = std::nullopt) {
  validate(spec);
  if (beta && !(*beta >= 0.0 && *beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
  struct {
    std::optional<double> beta;
    double operator()(const PrisonersDilemma& g) const { return g.c; }
    double operator()(const PublicGoods& g) const { return 1.0 - g.rho; }
    double operator()(const TravelersDilemma& g) const {
      if (!beta) return 2.0 * g.bonus - 1.0;
      const double bt = *beta;
      return std::max(bt * (g.bonus - 1.0), g.bonus - bt * (g.H - g.L));
    }
    double operator()(const Bertrand& g) const {
      if (!beta) throw std::invalid_argument("bertrand threshold needs a belief beta");
      const double all_high = std::pow(*beta, g.n - 1);
      const double undercut = all_high * (g.H - 1.0);
      const double floor = bertrand_f(g.n, *beta) * g.L;
      return std::max(undercut, floor) - all_high * g.H / g.n;
    }
  } threshold{beta};
  return std::visit(threshold, spec);
}

// Payoff to each player when everyone cooperates; the scale of relative tolerance.
inline double all_cooperate_payoff(const DilemmaSpec& spec) {
  validate(spec);
  struct {
    double operator()(const PrisonersDilemma& g) const { return g.b - g.c; }
    double operator()(const TravelersDilemma& g) const { return g.H; }
    double operator()(const PublicGoods& g) const { return g.N * g.rho; }
    double operator()(const Bertrand& g) const { return static_cast<double>(g.H) / g.n; }
  } payoff;
  return std::visit(payoff, spec);
}

inline double relative_to_absolute(const DilemmaSpec& spec, double t_rel) {
  if (!(t_rel >= 0.0 && t_rel <= 1.0)) throw std::invalid_argument("relative tolerance must lie in [0,1]");
  return t_rel * all_cooperate_payoff(spec);
}

enum class Disposition { Cooperate, Defect };

struct RelativeType {
  double t_rel = 0.0;
  double beta = 0.0;
  Disposition disposition = Disposition::Cooperate;
};

inline bool will_cooperate(const DilemmaSpec& spec, const RelativeType& type, const Tolerance& tol = {}) {
  if (!(type.beta >= 0.0 && type.beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
  if (type.disposition == Disposition::Defect) return false;
  return relative_to_absolute(spec, type.t_rel) >= cooperation_threshold(spec, type.beta) - tol.eps;
}

// Distribution over relative types. The default draws t_rel and beta
// independently uniform on [0,1] and disposition C with probability q;
// fixed_beta pins the belief instead. A custom sampler replaces both.
struct RelativeTypeDistribution {
  double q = 1.0;
  std::optional<double> fixed_beta;
  std::function<RelativeType(std::mt19937_64&)> sampler;

  bool has_closed_form() const { return !sampler; }

  RelativeType draw(std::mt19937_64& rng) const {
    if (sampler) return sampler(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RelativeType t;
    t.t_rel = unit(rng);
    t.beta = fixed_beta ? *fixed_beta : unit(rng);
    t.disposition = unit(rng) < q ? Disposition::Cooperate : Disposition::Defect;
    return t;
  }
};

struct CooperationRate {
  double mc_rate = 0.0;
  double mc_stderr = 0.0;
  std::optional<double> exact_rate;
};

// Relative tolerance needed to cooperate at belief beta, clipped to [0,1];
// 1 - this is the cooperating share of uniformly distributed t_rel.
inline double relative_threshold(const DilemmaSpec& spec, double beta) {
  return std::clamp(cooperation_threshold(spec, beta) / all_cooperate_payoff(spec), 0.0, 1.0);
}

// Exact cooperation rate under the product-uniform default: q times the area of
// {(t_rel, beta) : t_rel * P >= threshold(beta)}. The integrand is smooth between
// kinks (where the two best-response candidates swap or the clip engages), which
// are located by scan and bisection before Gauss-Legendre integration per piece.
inline double exact_cooperation_rate(const DilemmaSpec& spec, const RelativeTypeDistribution& dist) {
  if (!dist.has_closed_form()) throw std::invalid_argument("exact rate needs the default type distribution");
  validate(spec);
  if (dist.q <= 0.0) return 0.0;
  if (!requires_belief(spec)) return dist.q * (1.0 - relative_threshold(spec, 0.0));
  if (dist.fixed_beta) return dist.q * (1.0 - relative_threshold(spec, *dist.fixed_beta));

  const double scale = all_cooperate_payoff(spec);
  std::vector<std::function<double(double)>> kinks;
  kinks.emplace_back([&](double b) { return cooperation_threshold(spec, b) / scale; });
  kinks.emplace_back([&](double b) { return cooperation_threshold(spec, b) / scale - 1.0; });
  if (const auto* td = std::get_if<TravelersDilemma>(&spec)) {
    kinks.emplace_back([td](double b) { return b * (td->bonus - 1.0) - (td->bonus - b * (td->H - td->L)); });
  } else if (const auto* bc = std::get_if<Bertrand>(&spec)) {
    kinks.emplace_back([bc](double b) { return std::pow(b, bc->n - 1) * (bc->H - 1.0) - bertrand_f(bc->n, b) * bc->L; });
  }

  constexpr std::size_t cells = 4096;
  const std::vector<double> xs = linspace(0.0, 1.0, cells);
  std::vector<double> breaks{0.0, 1.0};
  for (const auto& f : kinks) {
    double prev = f(xs[0]);
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double cur = f(xs[k]);
      if (cur == 0.0) {
        breaks.push_back(xs[k]);
      } else if (prev != 0.0 && (prev > 0.0) != (cur > 0.0)) {
        breaks.push_back(bisect(f, xs[k - 1], xs[k], 1e-16));
      }
      prev = cur;
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double b) { return 1.0 - relative_threshold(spec, b); };
  using Quadrature = boost::math::quadrature::gauss<double, 30>;
  double area = 0.0;
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    const double lo = breaks[k - 1], hi = breaks[k];
    if (!(hi > lo)) continue;
    // Subpanels keep high-degree Bertrand polynomials well resolved.
    constexpr int panels = 8;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + (hi - lo) * p / panels;
      const double z = lo + (hi - lo) * (p + 1) / panels;
      area += Quadrature::integrate(integrand, a, z);
    }
  }
  return dist.q * std::clamp(area, 0.0, 1.0);
}

// Monte Carlo estimate of P(will_cooperate), plus the exact rate when available.
inline CooperationRate cooperation_rate(const DilemmaSpec& spec, const RelativeTypeDistribution& dist,
                                        std::size_t samples, std::uint64_t seed, const Tolerance& tol = {}) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  validate(spec);
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    if (will_cooperate(spec, dist.draw(rng), tol)) ++hits;
  }
  CooperationRate out;
  out.mc_rate = static_cast<double>(hits) / static_cast<double>(samples);
  out.mc_stderr = std::sqrt(out.mc_rate * (1.0 - out.mc_rate) / static_cast<double>(samples));
  if (dist.has_closed_form()) out.exact_rate = exact_cooperation_rate(spec, dist);
  return out;
}

// Returns a copy of `base` with the named parameter replaced. Names: pd b,c;
// td L,H,bonus; pg N,rho; bertrand n,L,H.
inline DilemmaSpec with_parameter(const DilemmaSpec& base, const std::string& name, double value) {
  auto as_int = [&](double v) {
    if (v != std::floor(v)) throw std::invalid_argument("parameter " + name + " must be an integer");
    return static_cast<int>(v);
  };
  DilemmaSpec out = base;
  auto unknown = [&]() { throw std::invalid_argument("unknown parameter '" + name + "' for this dilemma"); };
  if (auto* g = std::get_if<PrisonersDilemma>(&out)) {
    if (name == "b") g->b = value; else if (name == "c") g->c = value; else unknown();
  } else if (auto* g = std::get_if<TravelersDilemma>(&out)) {
    if (name == "L") g->L = as_int(value); else if (name == "H") g->H = as_int(value);
    else if (name == "bonus" || name == "b") g->bonus = as_int(value); else unknown();
  } else if (auto* g = std::get_if<PublicGoods>(&out)) {
    if (name == "N") g->N = as_int(value); else if (name == "rho") g->rho = value; else unknown();
  } else if (auto* g = std::get_if<Bertrand>(&out)) {
    if (name == "n") g->n = as_int(value); else if (name == "L") g->L = as_int(value);
    else if (name == "H") g->H = as_int(value); else unknown();
  }
  validate(out);
  return out;
}

struct RateSweepRow {
  double value = 0.0;
  double exact_rate = 0.0;
  std::optional<CooperationRate> mc;
};

// Cooperation rate at each parameter value. Monte Carlo columns are filled only
// when samples > 0; every value reuses the same seed.
inline std::vector<RateSweepRow> sweep_cooperation_rate(const DilemmaSpec& base, const std::string& parameter,
                                                        const std::vector<double>& values,
                                                        const RelativeTypeDistribution& dist, std::size_t samples,
                                                        std::uint64_t seed, const Tolerance& tol = {}) {
  std::vector<RateSweepRow> rows;
  for (double v : values) {
    const DilemmaSpec spec = with_parameter(base, parameter, v);
    RateSweepRow row;
    row.value = v;
    row.exact_rate = exact_cooperation_rate(spec, dist);
    if (samples > 0) row.mc = cooperation_rate(spec, dist, samples, seed, tol);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace toleq
