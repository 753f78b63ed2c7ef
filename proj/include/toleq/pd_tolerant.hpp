#pragma once

// Prisoner's Dilemma with tolerance: particularly cooperative equilibria.
//
// A player cooperates whenever the payoff lost by cooperating,
//   gap(alpha) = alpha * dC + (1 - alpha) * dD,
// is within their tolerance, where alpha is the opponent's cooperation
// probability, dC = c - a and dD = d - b. A symmetric particularly cooperative
// equilibrium is a root of
//   h(alpha) = 1 - alpha - F(gap(alpha)).
// h(0) >= 0 and h(1) <= 0, so a root always exists for continuous F; it is
// unique when dC > dD because F(gap) is then non-decreasing in alpha.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "toleq/game.hpp"
#include "toleq/numeric.hpp"
#include "toleq/tolerance.hpp"

namespace toleq {

// Row player's payoffs for (C,C), (C,D), (D,C), (D,D); requires c > a > d > b.
struct PdPayoffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  PdPayoffs() = default;
  PdPayoffs(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) { validate(); }

  void validate() const {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
      throw std::invalid_argument("PD payoffs must be finite");
    }
    if (!(c > a && a > d && d > b)) throw std::invalid_argument("PD payoffs need c > a > d > b");
  }

  double delta_c() const { return c - a; }
  double delta_d() const { return d - b; }

  // Symmetric 2x2 game with strategies C (index 0) and D (index 1).
  Game to_game() const { return Game({{"C", "D"}, {"C", "D"}}, {a, a, b, c, c, b, d, d}); }

  friend bool operator==(const PdPayoffs&, const PdPayoffs&) = default;
};

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("cooperation probability must lie in [0,1]");
}

// u_D - u_C against an opponent cooperating with probability alpha_other.
inline double willingness_gap(const PdPayoffs& p, double alpha_other) {
  check_alpha(alpha_other);
  return alpha_other * p.delta_c() + (1.0 - alpha_other) * p.delta_d();
}

inline double cooperation_probability(const PdPayoffs& p, const ToleranceCdf& F, double alpha_other) {
  return 1.0 - F(willingness_gap(p, alpha_other));
}

struct FixedPointRoot {
  double alpha = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
  bool marginal = false;  // tangential touch without a sign change
};

enum class RootStructure { Unique, PossiblyMultiple };

inline const char* to_string(RootStructure s) { return s == RootStructure::Unique ? "unique" : "possibly-multiple"; }

struct FixedPointReport {
  std::vector<FixedPointRoot> roots;
  bool has_zero_root = false;
  bool uniqueness_certified = false;
  RootStructure classification = RootStructure::PossiblyMultiple;
};

struct RootScanOptions {
  std::size_t grid = 10000;
  double tol_root = 1e-12;
};

// All roots of a continuous h on [0,1]: grid nodes with |h| <= tol_root, sign
// changes refined by bisection, and tangential minima of |h| below tol_root.
// Runs of consecutive zero nodes are reported by their two ends.
template <class H>
std::vector<FixedPointRoot> scan_roots(H&& h, const RootScanOptions& opt) {
  if (opt.grid < 2) throw std::invalid_argument("root scan needs a grid of at least 2 cells");
  if (!(opt.tol_root > 0.0)) throw std::invalid_argument("root tolerance must be positive");
  const std::vector<double> xs = linspace(0.0, 1.0, opt.grid);
  std::vector<double> hs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) hs[k] = h(xs[k]);
  auto zero = [&](std::size_t k) { return std::abs(hs[k]) <= opt.tol_root; };
  auto crosses = [&](std::size_t k) {  // cell [k, k+1]
    return !zero(k) && !zero(k + 1) && (hs[k] > 0.0) != (hs[k + 1] > 0.0);
  };

  std::vector<FixedPointRoot> roots;
  for (std::size_t k = 0; k < xs.size();) {
    if (!zero(k)) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < xs.size() && zero(end + 1)) ++end;
    roots.push_back({xs[k], xs[k], xs[k], hs[k], false});
    if (end != k) roots.push_back({xs[end], xs[end], xs[end], hs[end], false});
    k = end + 1;
  }
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (!crosses(k)) continue;
    const double x = bisect(h, xs[k], xs[k + 1], 4 * std::numeric_limits<double>::epsilon(), opt.tol_root);
    roots.push_back({x, xs[k], xs[k + 1], h(x), false});
  }
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
    if (zero(k) || zero(k - 1) || zero(k + 1) || crosses(k - 1) || crosses(k)) continue;
    const double here = std::abs(hs[k]);
    if (here > std::abs(hs[k - 1]) || here > std::abs(hs[k + 1])) continue;
    auto abs_h = [&](double x) { return std::abs(h(x)); };
    auto [x, fx] = boost::math::tools::brent_find_minima(abs_h, xs[k - 1], xs[k + 1],
                                                         std::numeric_limits<double>::digits);
    // Brent stops near sqrt(machine eps) in x, too coarse when h has a kink at
    // the touch point (piecewise-linear F). Shrink a bracket around it by thirds.
    double lo = std::max(xs[k - 1], x - 1e-6), hi = std::min(xs[k + 1], x + 1e-6);
    for (int it = 0; it < 120 && hi > lo; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (abs_h(m1) <= abs_h(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    if (const double polished = 0.5 * (lo + hi); abs_h(polished) < fx) {
      x = polished;
      fx = abs_h(polished);
    }
    if (fx <= opt.tol_root) roots.push_back({x, xs[k - 1], xs[k + 1], h(x), true});
  }
  std::sort(roots.begin(), roots.end(), [](const auto& l, const auto& r) { return l.alpha < r.alpha; });
  return roots;
}

inline double symmetric_residual(const PdPayoffs& p, const ToleranceCdf& F, double alpha) {
  return 1.0 - alpha - F(willingness_gap(p, alpha));
}

inline FixedPointReport solve_symmetric(const PdPayoffs& p, const ToleranceCdf& F,
                                        const RootScanOptions& opt = {}, const Tolerance& tol = {}) {
  p.validate();
  if (opt.grid < 1000) throw std::invalid_argument("fixed-point grid must have at least 1000 cells");
  FixedPointReport report;
  report.roots = scan_roots([&](double a) { return symmetric_residual(p, F, a); }, opt);
  report.has_zero_root = F(p.delta_d()) >= 1.0 - tol.eps;
  report.uniqueness_certified = p.delta_c() > p.delta_d();
  report.classification = report.uniqueness_certified ? RootStructure::Unique : RootStructure::PossiblyMultiple;
  return report;
}

// Dispatching overload: a finite-support distribution has no continuous CDF.
inline FixedPointReport solve_symmetric(const PdPayoffs& p, const DistributionSpec& dist,
                                        const RootScanOptions& opt = {}, const Tolerance& tol = {}) {
  if (std::holds_alternative<DiscreteToleranceDist>(dist)) {
    throw std::invalid_argument("discrete tolerance distribution: use solve_discrete");
  }
  return solve_symmetric(p, std::get<ToleranceCdf>(dist), opt, tol);
}

struct CurvePoint {
  double alpha = 0.0;
  double lhs = 0.0;  // 1 - alpha
  double rhs = 0.0;  // F(gap(alpha))
};

inline std::vector<CurvePoint> fixed_point_curve(const PdPayoffs& p, const ToleranceCdf& F, std::size_t intervals) {
  std::vector<CurvePoint> out;
  for (double a : linspace(0.0, 1.0, intervals)) out.push_back({a, 1.0 - a, F(willingness_gap(p, a))});
  return out;
}

// Solutions of alpha = 1 - P(T < gap(alpha)) for a finite-support tolerance
// distribution; an atom exactly at the gap cooperates. The right-hand side is
// constant between the alphas where gap(alpha) hits an atom, so each breakpoint
// and each open piece is checked directly. Empty result means no particularly
// cooperative equilibrium exists.
inline std::vector<double> solve_discrete(const PdPayoffs& p, const DiscreteToleranceDist& pi,
                                          const Tolerance& tol = {}) {
  p.validate();
  auto response = [&](double a) { return 1.0 - pi.strict_cdf(willingness_gap(p, a), tol); };
  const double dc = p.delta_c(), dd = p.delta_d();
  std::vector<double> solutions;
  if (dc == dd) {
    solutions.push_back(response(0.0));
    return solutions;
  }
  std::vector<double> breaks{0.0, 1.0};
  for (double t : pi.support()) {
    const double a = (t - dd) / (dc - dd);
    if (a > 0.0 && a < 1.0) breaks.push_back(a);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (approx_eq(response(breaks[k]), breaks[k], tol)) solutions.push_back(breaks[k]);
    if (k + 1 < breaks.size()) {
      const double lo = breaks[k], hi = breaks[k + 1];
      const double v = response(0.5 * (lo + hi));
      if (v > lo + tol.eps && v < hi - tol.eps) solutions.push_back(v);
    }
  }
  std::sort(solutions.begin(), solutions.end());
  solutions.erase(std::unique(solutions.begin(), solutions.end(),
                              [&](double x, double y) { return approx_eq(x, y, tol); }),
                  solutions.end());
  return solutions;
}

struct AsymmetricRoot {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double residual1 = 0.0;  // alpha1 - (1 - F1(gap1(alpha2)))
  double residual2 = 0.0;  // alpha2 - (1 - F2(gap2(alpha1)))
  bool marginal = false;
};

// Mutually consistent cooperation probabilities: player i cooperates with
// probability 1 - F_i of their own gap, evaluated at the other player's alpha.
// Substituting player 2's response into player 1's equation leaves a scalar
// root problem in alpha1.
inline std::vector<AsymmetricRoot> solve_asymmetric(const PdPayoffs& p1, const PdPayoffs& p2, const ToleranceCdf& F1,
                                                    const ToleranceCdf& F2, const RootScanOptions& opt = {}) {
  p1.validate();
  p2.validate();
  if (opt.grid < 1000) throw std::invalid_argument("fixed-point grid must have at least 1000 cells");
  auto response1 = [&](double a2) { return cooperation_probability(p1, F1, a2); };
  auto response2 = [&](double a1) { return cooperation_probability(p2, F2, a1); };
  auto h = [&](double a1) { return response1(response2(a1)) - a1; };
  std::vector<AsymmetricRoot> out;
  for (const auto& r : scan_roots(h, opt)) {
    const double a2 = response2(r.alpha);
    out.push_back({r.alpha, a2, r.alpha - response1(a2), 0.0, r.marginal});
  }
  return out;
}

enum class SweepParameter { A, B, C, D, DeltaC, DeltaD, Shift };

inline SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "a") return SweepParameter::A;
  if (name == "b") return SweepParameter::B;
  if (name == "c") return SweepParameter::C;
  if (name == "d") return SweepParameter::D;
  if (name == "dC" || name == "deltaC" || name == "delta_c") return SweepParameter::DeltaC;
  if (name == "dD" || name == "deltaD" || name == "delta_d") return SweepParameter::DeltaD;
  if (name == "shift") return SweepParameter::Shift;
  throw std::invalid_argument("unknown PD sweep parameter '" + name + "'");
}

struct SweepRow {
  double value = 0.0;
  double alpha_star = 0.0;
  std::size_t branch = 0;
  bool marginal = false;
};

// Re-solves at each value. dC moves c (a fixed), dD moves b (d fixed), shift
// translates F rightward. Roots are matched to the previous value's roots by
// nearest alpha so each branch keeps its id; unmatched roots open new branches.
inline std::vector<SweepRow> comparative_statics_sweep(const PdPayoffs& base, const ToleranceCdf& F,
                                                       SweepParameter parameter, const std::vector<double>& values,
                                                       const RootScanOptions& opt = {}, const Tolerance& tol = {}) {
  std::vector<SweepRow> rows;
  std::vector<std::pair<double, std::size_t>> previous;  // (alpha, branch)
  std::size_t next_branch = 0;
  for (double v : values) {
    PdPayoffs p = base;
    ToleranceCdf cdf = F;
    switch (parameter) {
      case SweepParameter::A: p.a = v; break;
      case SweepParameter::B: p.b = v; break;
      case SweepParameter::C: p.c = v; break;
      case SweepParameter::D: p.d = v; break;
      case SweepParameter::DeltaC: p.c = p.a + v; break;
      case SweepParameter::DeltaD: p.b = p.d - v; break;
      case SweepParameter::Shift: cdf = F.shifted(v); break;
    }
    try {
      p.validate();
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("sweep value " + std::to_string(v) + " violates c > a > d > b");
    }
    const FixedPointReport report = solve_symmetric(p, cdf, opt, tol);

    std::vector<std::pair<double, std::size_t>> current;
    std::vector<bool> taken(previous.size(), false);
    for (const auto& r : report.roots) {
      std::size_t best = previous.size();
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < previous.size(); ++k) {
        const double dist = std::abs(previous[k].first - r.alpha);
        if (!taken[k] && dist < best_dist) {
          best = k;
          best_dist = dist;
        }
      }
      std::size_t branch;
      if (best < previous.size()) {
        taken[best] = true;
        branch = previous[best].second;
      } else {
        branch = next_branch++;
      }
      next_branch = std::max(next_branch, branch + 1);
      current.emplace_back(r.alpha, branch);
      rows.push_back({v, r.alpha, branch, r.marginal});
    }
    previous = std::move(current);
  }
  return rows;
}

}  // namespace toleq
