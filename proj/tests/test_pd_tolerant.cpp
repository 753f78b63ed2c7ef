#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "toleq/pd_tolerant.hpp"

using namespace toleq;

namespace {

const PdPayoffs kExample(3, -1, 5, 0);  // dC = 2, dD = 1
const PdPayoffs kMulti(3, -1, 4, 2);    // dC = 1, dD = 3

ToleranceCdf multi_root_cdf() {
  return ToleranceCdf::piecewise_linear(
      {{0, 0}, {1, 0.05}, {1.5, 0.1}, {1.7, 0.5}, {2.5, 0.55}, {2.7, 0.95}, {3, 0.96}, {4, 1}});
}

PdPayoffs random_pd(std::mt19937_64& rng, bool dc_above_dd) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  double dc = u(rng), dd = u(rng);
  if ((dc > dd) != dc_above_dd) std::swap(dc, dd);
  if (dc == dd) dc += dc_above_dd ? 0.1 : -0.05;
  const double d = u(rng) - 1.5;
  const double a = d + u(rng);
  return PdPayoffs(a, d - dd, a + dc, d);
}

ToleranceCdf random_cdf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {
      const double lo = 3.0 * u(rng);
      return ToleranceCdf::uniform(lo, lo + 0.2 + 3.0 * u(rng));
    }
    case 1:
      return ToleranceCdf::truncated_exponential(0.2 + 3.0 * u(rng), 0.5 + 4.0 * u(rng));
    default: {
      std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
      double x = 0.0, y = 0.0;
      for (int k = 0; k < 5; ++k) {
        x += 0.05 + u(rng);
        y += (1.0 - y) * u(rng);
        knots.emplace_back(x, y);
      }
      knots.emplace_back(x + 0.5, 1.0);
      return ToleranceCdf::piecewise_linear(knots);
    }
  }
}

// h recomputed from expected utilities of the explicit game.
double residual_via_game(const PdPayoffs& p, const ToleranceCdf& F, double alpha) {
  const Game g = p.to_game();
  const MixedStrategy s({alpha, 1.0 - alpha});
  const auto u = pure_strategy_utilities(g, {s, s}, 0);
  return 1.0 - alpha - F(u[1] - u[0]);
}

std::vector<double> alphas(const FixedPointReport& r) {
  std::vector<double> out;
  for (const auto& root : r.roots) out.push_back(root.alpha);
  return out;
}

}  // namespace

TEST(Payoffs, ValidationAndDeltas) {
  EXPECT_THROW(PdPayoffs(3, 0, 2, 1), std::invalid_argument);
  EXPECT_THROW(PdPayoffs(3, 1, 5, 0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(kExample.delta_c(), 2.0);
  EXPECT_DOUBLE_EQ(kExample.delta_d(), 1.0);
}

TEST(Gap, Examples) {
  EXPECT_DOUBLE_EQ(willingness_gap(kExample, 0.0), 1.0);
  for (double a : {0.0, 0.25, 0.5, 0.9, 1.0}) EXPECT_NEAR(willingness_gap(kExample, a), a + 1.0, 1e-15);
  EXPECT_THROW(willingness_gap(kExample, 1.1), std::invalid_argument);
  EXPECT_THROW(willingness_gap(kExample, -0.1), std::invalid_argument);
}

TEST(Gap, MatchesGameUtilities) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const PdPayoffs p = random_pd(rng, k % 2 == 0);
    const double alpha = unit(rng);
    const MixedStrategy s({alpha, 1.0 - alpha});
    const Game g = p.to_game();
    const double direct = oracle::utility_of_pure(g, {s, s}, 0, 1) - oracle::utility_of_pure(g, {s, s}, 0, 0);
    EXPECT_NEAR(willingness_gap(p, alpha), direct, 1e-12);
  }
}

TEST(CooperationProbability, Examples) {
  for (double a : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(cooperation_probability(kExample, ToleranceCdf::uniform(0, 1), a), 0.0);
    EXPECT_DOUBLE_EQ(cooperation_probability(kExample, ToleranceCdf::uniform(2.5, 4), a), 1.0);
  }
  EXPECT_NEAR(cooperation_probability(kExample, ToleranceCdf::uniform(0, 4), 0.6), 0.6, 1e-15);
}

TEST(Symmetric, UniformExample) {
  const auto r = solve_symmetric(kExample, ToleranceCdf::uniform(0, 4));
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_NEAR(r.roots[0].alpha, 0.6, 1e-9);
  EXPECT_LE(std::abs(r.roots[0].residual), 1e-12);
  EXPECT_LE(r.roots[0].bracket_lo, r.roots[0].alpha);
  EXPECT_GE(r.roots[0].bracket_hi, r.roots[0].alpha);
  EXPECT_FALSE(r.has_zero_root);
  EXPECT_TRUE(r.uniqueness_certified);
  EXPECT_STREQ(to_string(r.classification), "unique");
}

TEST(Symmetric, ZeroRoot) {
  const auto r = solve_symmetric(kExample, ToleranceCdf::uniform(0, 1));
  EXPECT_TRUE(r.has_zero_root);
  ASSERT_FALSE(r.roots.empty());
  EXPECT_EQ(r.roots[0].alpha, 0.0);
}

TEST(Symmetric, FullCooperationEndpoint) {
  const auto r = solve_symmetric(kExample, ToleranceCdf::uniform(5, 10));
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0].alpha, 1.0);
  EXPECT_FALSE(r.has_zero_root);
}

TEST(Symmetric, MultipleRoots) {
  const auto r = solve_symmetric(kMulti, multi_root_cdf());
  EXPECT_FALSE(r.uniqueness_certified);
  EXPECT_STREQ(to_string(r.classification), "possibly-multiple");
  const std::vector<double> expected{0.3 / 7.0, 0.55 / 3.0, 3.35 / 7.0, 0.7, 0.9375};
  const auto got = alphas(r);
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(got[k], expected[k], 1e-9);
}

TEST(Symmetric, TangentialRootIsMarginal) {
  // With gap x = 3 - 2 alpha, h = (x - 1)/2 - F(x). F meets that line at x = 2
  // from below on both sides, so h touches zero at alpha = 0.5 without crossing.
  const auto F = ToleranceCdf::piecewise_linear({{0, 0}, {1.5, 0.2}, {2, 0.5}, {3, 0.9}, {4, 1}});
  const auto r = solve_symmetric(kMulti, F, {10001, 1e-12});
  bool found = false;
  for (const auto& root : r.roots) {
    EXPECT_LE(std::abs(symmetric_residual(kMulti, F, root.alpha)), 1e-12);
    if (std::abs(root.alpha - 0.5) < 1e-6) {
      found = true;
      EXPECT_TRUE(root.marginal);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Symmetric, Errors) {
  EXPECT_THROW(solve_symmetric(kExample, ToleranceCdf::uniform(0, 4), {999, 1e-12}), std::invalid_argument);
  EXPECT_THROW(solve_symmetric(kExample, ToleranceCdf::uniform(0, 4), {1000, 0.0}), std::invalid_argument);
  const DistributionSpec discrete = DiscreteToleranceDist::point_mass(1.5);
  EXPECT_THROW(solve_symmetric(kExample, discrete), std::invalid_argument);
  const DistributionSpec continuous = ToleranceCdf::uniform(0, 4);
  EXPECT_NEAR(solve_symmetric(kExample, continuous).roots.at(0).alpha, 0.6, 1e-9);
}

TEST(Curve, CrossingCounts) {
  auto crossings = [](const std::vector<CurvePoint>& c) {
    int n = 0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      if ((c[k - 1].lhs - c[k - 1].rhs > 0) != (c[k].lhs - c[k].rhs > 0)) ++n;
    }
    return n;
  };
  const auto one = fixed_point_curve(kExample, ToleranceCdf::uniform(0, 4), 1000);
  ASSERT_EQ(one.size(), 1001u);
  EXPECT_DOUBLE_EQ(one[0].lhs, 1.0);
  EXPECT_DOUBLE_EQ(one[0].rhs, 0.25);
  EXPECT_EQ(crossings(one), 1);
  EXPECT_GE(crossings(fixed_point_curve(kMulti, multi_root_cdf(), 1000)), 2);
}

TEST(Discrete, Examples) {
  EXPECT_EQ(solve_discrete(kExample, DiscreteToleranceDist::point_mass(2.0)), std::vector<double>{1.0});
  EXPECT_EQ(solve_discrete(kExample, DiscreteToleranceDist::point_mass(0.5)), std::vector<double>{0.0});
  EXPECT_TRUE(solve_discrete(kExample, DiscreteToleranceDist::point_mass(1.5)).empty());
  // gap = 1 + alpha; atom at 1 always below the gap except at alpha = 0.
  const auto two = solve_discrete(kExample, DiscreteToleranceDist({1.0, 3.0}, {0.5, 0.5}));
  ASSERT_EQ(two.size(), 1u);
  EXPECT_DOUBLE_EQ(two[0], 0.5);
}

TEST(Discrete, SolutionsAreSelfConsistent) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 300; ++trial) {
    const PdPayoffs p = random_pd(rng, trial % 2 == 0);
    const auto pi = oracle::random_dist(rng, 5, 3.5);
    for (double a : solve_discrete(p, pi)) {
      const double gap = willingness_gap(p, a);
      double cooperating = 0.0;  // mass with tolerance >= gap, by direct summation
      for (std::size_t k = 0; k < pi.size(); ++k) {
        if (pi.support()[k] >= gap - 1e-9) cooperating += pi.probs()[k];
      }
      EXPECT_NEAR(a, cooperating, 1e-9);
    }
  }
}

TEST(Discrete, ConvergesToContinuousSolution) {
  const std::size_t n = 10000;
  std::vector<double> atoms(n), probs(n, 1.0 / n);
  for (std::size_t k = 0; k < n; ++k) atoms[k] = 4.0 * (k + 0.5) / n;
  const auto sols = solve_discrete(kExample, DiscreteToleranceDist(atoms, probs));
  ASSERT_FALSE(sols.empty());
  for (double a : sols) EXPECT_NEAR(a, 0.6, 1e-3);
}

TEST(Asymmetric, Examples) {
  const auto F = ToleranceCdf::uniform(0, 4);
  const auto sym = solve_asymmetric(kExample, kExample, F, F);
  ASSERT_EQ(sym.size(), 1u);
  EXPECT_NEAR(sym[0].alpha1, 0.6, 1e-9);
  EXPECT_NEAR(sym[0].alpha2, 0.6, 1e-9);

  const auto never = solve_asymmetric(kExample, kExample, F, ToleranceCdf::uniform(0, 0.5));
  ASSERT_EQ(never.size(), 1u);
  EXPECT_NEAR(never[0].alpha2, 0.0, 1e-15);
  EXPECT_NEAR(never[0].alpha1, 0.75, 1e-9);
}

TEST(Asymmetric, RandomPairsSatisfyBothEquations) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const PdPayoffs p1 = random_pd(rng, trial % 2 == 0), p2 = random_pd(rng, trial % 3 == 0);
    const ToleranceCdf F1 = random_cdf(rng), F2 = random_cdf(rng);
    const auto roots = solve_asymmetric(p1, p2, F1, F2);
    EXPECT_FALSE(roots.empty());
    for (const auto& r : roots) {
      EXPECT_LE(std::abs(r.alpha1 - (1.0 - F1(willingness_gap(p1, r.alpha2)))), 1e-9);
      EXPECT_LE(std::abs(r.alpha2 - (1.0 - F2(willingness_gap(p2, r.alpha1)))), 1e-9);
    }
  }
}

TEST(Properties, ExistenceUniquenessZeroRootResidual) {
  std::mt19937_64 rng(73);
  const Tolerance tol;
  for (int trial = 0; trial < 400; ++trial) {
    const bool above = trial < 200;
    const PdPayoffs p = random_pd(rng, above);
    const ToleranceCdf F = random_cdf(rng);
    const auto r = solve_symmetric(p, F);
    ASSERT_FALSE(r.roots.empty());
    if (above) {
      EXPECT_EQ(r.roots.size(), 1u) << "trial " << trial;
    }
    EXPECT_EQ(r.uniqueness_certified, above);
    EXPECT_EQ(r.has_zero_root, F(p.delta_d()) >= 1.0 - tol.eps);
    if (r.has_zero_root) {
      EXPECT_EQ(r.roots.front().alpha, 0.0);
    }
    for (const auto& root : r.roots) {
      EXPECT_LE(std::abs(symmetric_residual(p, F, root.alpha)), 1e-12);
      EXPECT_LE(std::abs(residual_via_game(p, F, root.alpha)), 1e-9);
    }
  }
}

TEST(Properties, ConstructedZeroRootInstances) {
  for (double top : {0.5, 0.99, 1.0}) {
    EXPECT_TRUE(solve_symmetric(kExample, ToleranceCdf::uniform(0, top)).has_zero_root);
  }
  for (double top : {1.01, 2.0}) {
    const auto r = solve_symmetric(kExample, ToleranceCdf::uniform(0, top));
    EXPECT_FALSE(r.has_zero_root);
    EXPECT_GT(r.roots.front().alpha, 0.0);
  }
}

TEST(Sweep, ComparativeStatics) {
  const auto F = ToleranceCdf::uniform(0, 4);
  auto check = [&](SweepParameter param, std::vector<double> values, int direction) {
    const auto rows = comparative_statics_sweep(kExample, F, param, values);
    ASSERT_EQ(rows.size(), values.size());
    for (std::size_t k = 1; k < rows.size(); ++k) {
      EXPECT_EQ(rows[k].branch, 0u);
      EXPECT_GE(direction * (rows[k].alpha_star - rows[k - 1].alpha_star), -1e-9);
    }
    EXPECT_GT(direction * (rows.back().alpha_star - rows.front().alpha_star), 1e-3);
  };
  check(SweepParameter::DeltaC, linspace(1.5, 3.5, 20), -1);
  check(SweepParameter::DeltaD, linspace(0.5, 2.5, 20), -1);
  check(SweepParameter::A, linspace(0.5, 4.5, 20), +1);
  check(SweepParameter::B, linspace(-3.0, -0.5, 20), +1);
  check(SweepParameter::Shift, linspace(0.0, 2.0, 20), +1);
  EXPECT_THROW(comparative_statics_sweep(kExample, F, SweepParameter::A, {6.0}), std::invalid_argument);
  EXPECT_EQ(parse_sweep_parameter("deltaC"), SweepParameter::DeltaC);
  EXPECT_EQ(parse_sweep_parameter("dD"), SweepParameter::DeltaD);
  EXPECT_THROW(parse_sweep_parameter("e"), std::invalid_argument);
}

TEST(Sweep, BranchesAreTrackedAcrossMultipleRoots) {
  const auto rows = comparative_statics_sweep(kMulti, multi_root_cdf(), SweepParameter::Shift, {0.0, 0.001, 0.002});
  ASSERT_EQ(rows.size(), 15u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(rows[k].branch, k);
    EXPECT_EQ(rows[5 + k].branch, k);
    EXPECT_EQ(rows[10 + k].branch, k);
  }
}
