#pragma once

// Tolerance distributions: finite-support distributions with their step CDFs,
// continuous CDF families, stochastic dominance, and the remapping that carries
// a type-to-strategy assignment from a distribution to one dominating it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "toleq/game.hpp"
#include "toleq/numeric.hpp"

namespace toleq {

// Raised when a remap is requested for a pair that is not in dominance order.
class DominanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DiscreteToleranceDist {
 public:
  DiscreteToleranceDist(std::vector<double> support, std::vector<double> probs, const Tolerance& tol = {})
      : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty()) throw std::invalid_argument("tolerance distribution needs at least one atom");
    if (support_.size() != probs_.size()) {
      throw std::invalid_argument("support and probs have different lengths");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      if (!std::isfinite(support_[k]) || support_[k] < 0.0) {
        throw std::invalid_argument("tolerance atoms must be finite and non-negative");
      }
      if (k > 0 && !(support_[k] > support_[k - 1])) {
        throw std::invalid_argument("tolerance support must be strictly increasing");
      }
      if (!std::isfinite(probs_[k]) || probs_[k] <= 0.0 || probs_[k] > 1.0 + tol.eps) {
        throw std::invalid_argument("atom probabilities must lie in (0,1]");
      }
      sum += probs_[k];
    }
    if (!approx_eq(sum, 1.0, tol)) {
      throw std::invalid_argument("atom probabilities sum to " + std::to_string(sum) + ", not 1");
    }
  }

  static DiscreteToleranceDist point_mass(double t) { return DiscreteToleranceDist({t}, {1.0}); }

  std::size_t size() const { return support_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  double max_atom() const { return support_.back(); }

  // F(t): total mass on atoms <= t.
  double cdf(double t) const {
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size() && support_[k] <= t; ++k) total += probs_[k];
    return std::min(total, 1.0);
  }

  // P(T < t); atoms within tol.eps of t count as not below t.
  double strict_cdf(double t, const Tolerance& tol = {}) const {
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size() && support_[k] < t - tol.eps; ++k) total += probs_[k];
    return std::min(total, 1.0);
  }

  // Cumulative sums at each atom; last entry pinned to exactly 1.
  std::vector<double> cumulative() const {
    std::vector<double> c(support_.size());
    double run = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) c[k] = (run += probs_[k]);
    c.back() = 1.0;
    return c;
  }

  friend bool operator==(const DiscreteToleranceDist&, const DiscreteToleranceDist&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

using DiscreteToleranceProfile = std::vector<DiscreteToleranceDist>;

inline double cdf_of_discrete(const DiscreteToleranceDist& dist, double t) { return dist.cdf(t); }

inline bool stochastically_dominates(const DiscreteToleranceDist& hi, const DiscreteToleranceDist& lo,
                                     const Tolerance& tol = {}) {
  // Both CDFs are right-continuous steps that only move at atoms.
  auto below = [&](double t) { return approx_le(hi.cdf(t), lo.cdf(t), tol); };
  return std::all_of(hi.support().begin(), hi.support().end(), below) &&
         std::all_of(lo.support().begin(), lo.support().end(), below);
}

inline bool stochastically_dominates(const DiscreteToleranceProfile& hi, const DiscreteToleranceProfile& lo,
                                     const Tolerance& tol = {}) {
  if (hi.size() != lo.size()) throw std::invalid_argument("tolerance profiles differ in player count");
  for (std::size_t i = 0; i < hi.size(); ++i) {
    if (!stochastically_dominates(hi[i], lo[i], tol)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Continuous CDF families.

struct UniformCdf {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const UniformCdf&, const UniformCdf&) = default;
};

// Linear interpolation through (x, F) knots; F(first) = 0 and F(last) = 1.
struct PiecewiseLinearCdf {
  std::vector<std::pair<double, double>> knots;
  friend bool operator==(const PiecewiseLinearCdf&, const PiecewiseLinearCdf&) = default;
};

// Exponential with the given rate, conditioned on [0, cap].
struct TruncatedExponentialCdf {
  double rate = 1.0;
  double cap = 1.0;
  friend bool operator==(const TruncatedExponentialCdf&, const TruncatedExponentialCdf&) = default;
};

class ToleranceCdf {
 public:
  using Family = std::variant<UniformCdf, PiecewiseLinearCdf, TruncatedExponentialCdf>;

  explicit ToleranceCdf(Family family, double shift = 0.0) : family_(std::move(family)), shift_(shift) {
    if (!std::isfinite(shift_) || shift_ < 0.0) throw std::invalid_argument("cdf shift must be >= 0");
    std::visit([](const auto& f) { validate(f); }, family_);
  }

  static ToleranceCdf uniform(double lo, double hi) { return ToleranceCdf(UniformCdf{lo, hi}); }
  static ToleranceCdf piecewise_linear(std::vector<std::pair<double, double>> knots) {
    return ToleranceCdf(PiecewiseLinearCdf{std::move(knots)});
  }
  static ToleranceCdf truncated_exponential(double rate, double cap) {
    return ToleranceCdf(TruncatedExponentialCdf{rate, cap});
  }

  double operator()(double x) const {
    const double y = x - shift_;
    return std::visit([y](const auto& f) { return eval(f, y); }, family_);
  }

  // Rigid rightward translation: x -> F(x - delta). The result dominates *this.
  ToleranceCdf shifted(double delta) const {
    if (!(delta >= 0.0)) throw std::invalid_argument("only rightward shifts keep the support non-negative");
    return ToleranceCdf(family_, shift_ + delta);
  }

  const Family& family() const { return family_; }
  double shift() const { return shift_; }

  friend bool operator==(const ToleranceCdf&, const ToleranceCdf&) = default;

 private:
  static void validate(const UniformCdf& f) {
    if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || f.lo < 0.0 || !(f.hi > f.lo)) {
      throw std::invalid_argument("uniform cdf needs 0 <= lo < hi");
    }
  }
  static void validate(const PiecewiseLinearCdf& f) {
    const auto& k = f.knots;
    if (k.size() < 2) throw std::invalid_argument("piecewise-linear cdf needs at least two knots");
    if (k.front().first < 0.0) throw std::invalid_argument("piecewise-linear cdf starts below 0");
    if (k.front().second != 0.0 || k.back().second != 1.0) {
      throw std::invalid_argument("piecewise-linear cdf must run from F=0 to F=1");
    }
    for (std::size_t i = 1; i < k.size(); ++i) {
      if (!(k[i].first > k[i - 1].first)) throw std::invalid_argument("cdf knots must be strictly increasing in x");
      if (k[i].second < k[i - 1].second) throw std::invalid_argument("cdf knots must be non-decreasing in F");
    }
  }
  static void validate(const TruncatedExponentialCdf& f) {
    if (!(f.rate > 0.0) || !(f.cap > 0.0) || !std::isfinite(f.rate) || !std::isfinite(f.cap)) {
      throw std::invalid_argument("truncated exponential needs rate > 0 and cap > 0");
    }
  }

  static double eval(const UniformCdf& f, double x) { return std::clamp((x - f.lo) / (f.hi - f.lo), 0.0, 1.0); }
  static double eval(const PiecewiseLinearCdf& f, double x) {
    const auto& k = f.knots;
    if (x <= k.front().first) return 0.0;
    if (x >= k.back().first) return 1.0;
    auto it = std::upper_bound(k.begin(), k.end(), x, [](double v, const auto& knot) { return v < knot.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  static double eval(const TruncatedExponentialCdf& f, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= f.cap) return 1.0;
    return std::clamp(std::expm1(-f.rate * x) / std::expm1(-f.rate * f.cap), 0.0, 1.0);
  }

  Family family_;
  double shift_ = 0.0;
};

// A tolerance distribution as read from a file: either finite-support or continuous.
using DistributionSpec = std::variant<DiscreteToleranceDist, ToleranceCdf>;

// ---------------------------------------------------------------------------
// Type-to-strategy assignments and the dominance remap.

struct TypeStrategyMap {
  std::vector<double> atoms;
  std::vector<MixedStrategy> strategies;

  // Rejects maps whose domain is not exactly dist's support.
  void check_domain(const DiscreteToleranceDist& dist, const Tolerance& tol = {}) const {
    if (atoms.size() != strategies.size()) throw std::invalid_argument("type map atoms/strategies length mismatch");
    if (atoms.size() != dist.size()) throw std::invalid_argument("type map domain differs from distribution support");
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (!approx_eq(atoms[k], dist.support()[k], tol)) {
        throw std::invalid_argument("type map atom " + std::to_string(atoms[k]) + " is not in the support");
      }
      if (strategies[k].size() != strategies.front().size()) {
        throw std::invalid_argument("type map strategies have different lengths");
      }
    }
  }

  // sum_t pi(t) g(t)
  std::vector<double> mixture(const DiscreteToleranceDist& dist) const {
    std::vector<double> out(strategies.front().size(), 0.0);
    for (std::size_t k = 0; k < strategies.size(); ++k) {
      for (std::size_t s = 0; s < out.size(); ++s) out[s] += dist.probs()[k] * strategies[k][s];
    }
    return out;
  }

  friend bool operator==(const TypeStrategyMap&, const TypeStrategyMap&) = default;
};

// Bookkeeping of the remap from lo (atoms t_1..t_n) to hi (atoms t'_1..t'_m).
// alpha[j] is the index of the least lo-atom whose cumulative mass reaches
// F_hi(t'_j); beta[j] is the part of pi'(t'_j) drawn from that atom.
// weights[j][h] is the mass of lo-atom h handed to hi-atom j, so each row sums
// to pi'(t'_j) and each column to pi(t_h).
struct RemapPlan {
  std::vector<std::size_t> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> weights;
};

inline RemapPlan dominance_remap_plan(const DiscreteToleranceDist& lo, const DiscreteToleranceDist& hi,
                                      const Tolerance& tol = {}) {
  if (!stochastically_dominates(hi, lo, tol)) {
    throw DominanceError("target distribution does not stochastically dominate the source");
  }
  const std::size_t n = lo.size();
  const std::size_t m = hi.size();
  const std::vector<double> lo_cum = lo.cumulative();
  const std::vector<double> hi_cum = hi.cumulative();
  auto lo_cdf_before = [&](std::size_t h) { return h == 0 ? 0.0 : lo_cum[h - 1]; };
  auto hi_cdf_before = [&](std::size_t j) { return j == 0 ? 0.0 : hi_cum[j - 1]; };

  RemapPlan plan;
  plan.alpha.resize(m);
  plan.beta.resize(m);
  plan.weights.assign(m, std::vector<double>(n, 0.0));

  auto checked = [&](double w, const char* what, std::size_t j) {
    if (w < -tol.eps) {
      throw DominanceError(std::string("negative ") + what + " at target atom " + std::to_string(j) +
                           " (inconsistent inputs)");
    }
    return std::max(w, 0.0);
  };

  for (std::size_t j = 0; j < m; ++j) {
    std::size_t a = 0;
    while (a + 1 < n && lo_cum[a] < hi_cum[j] - tol.eps) ++a;
    plan.alpha[j] = a;
    if (lo.support()[a] > hi.support()[j] + tol.eps) {
      throw DominanceError("remap would assign atom " + std::to_string(lo.support()[a]) + " to lower atom " +
                           std::to_string(hi.support()[j]));
    }
    if (j > 0 && a == plan.alpha[j - 1]) {
      // Whole of pi'(t'_j) comes from the atom already being drained.
      plan.beta[j] = hi.probs()[j];
      plan.weights[j][a] = plan.beta[j];
      continue;
    }
    std::size_t first_full = 0;
    if (j > 0) {
      const std::size_t prev = plan.alpha[j - 1];
      plan.weights[j][prev] = checked(lo_cum[prev] - hi_cdf_before(j), "residual", j);
      first_full = prev + 1;
    }
    for (std::size_t h = first_full; h < a; ++h) plan.weights[j][h] = lo.probs()[h];
    plan.beta[j] = checked(hi_cum[j] - lo_cdf_before(a), "beta", j);
    plan.weights[j][a] = plan.beta[j];
  }
  return plan;
}

// Carries g (defined on lo's atoms) to a map on hi's atoms that preserves the
// overall mixture and only reuses strategies of atoms no larger than the target.
inline TypeStrategyMap dominance_remap(const DiscreteToleranceDist& lo, const DiscreteToleranceDist& hi,
                                       const TypeStrategyMap& g, const Tolerance& tol = {}) {
  g.check_domain(lo, tol);
  const RemapPlan plan = dominance_remap_plan(lo, hi, tol);
  const std::size_t num_strategies = g.strategies.front().size();
  TypeStrategyMap out;
  out.atoms = hi.support();
  for (std::size_t j = 0; j < hi.size(); ++j) {
    std::vector<double> probs(num_strategies, 0.0);
    double row = 0.0;
    for (std::size_t h = 0; h < lo.size(); ++h) {
      const double w = plan.weights[j][h];
      if (w == 0.0) continue;
      row += w;
      for (std::size_t s = 0; s < num_strategies; ++s) probs[s] += w * g.strategies[h][s];
    }
    if (!(row > 0.0)) throw DominanceError("target atom received no mass");
    for (double& p : probs) p /= row;
    out.strategies.emplace_back(std::move(probs), tol);
  }
  return out;
}

}  // namespace toleq
