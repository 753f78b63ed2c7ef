#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "toleq/tolerance.hpp"

using namespace toleq;

namespace {

const MixedStrategy kC = MixedStrategy::pure(2, 0);
const MixedStrategy kD = MixedStrategy::pure(2, 1);

void expect_strategy(const MixedStrategy& s, std::vector<double> expected) {
  ASSERT_EQ(s.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(s[k], expected[k], 1e-12) << "entry " << k;
}

}  // namespace

TEST(DiscreteDist, Validation) {
  EXPECT_THROW(DiscreteToleranceDist({1, 0}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(DiscreteToleranceDist({0, 0}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(DiscreteToleranceDist({-1}, {1}), std::invalid_argument);
  EXPECT_THROW(DiscreteToleranceDist({0, 1}, {0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(DiscreteToleranceDist({0, 1}, {1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(DiscreteToleranceDist({}, {}), std::invalid_argument);
}

TEST(DiscreteDist, Cdf) {
  EXPECT_DOUBLE_EQ(cdf_of_discrete(DiscreteToleranceDist::point_mass(0), 0), 1.0);
  const DiscreteToleranceDist d({0, 3}, {0.7, 0.3});
  EXPECT_DOUBLE_EQ(cdf_of_discrete(d, 1), 0.7);
  EXPECT_DOUBLE_EQ(cdf_of_discrete(d, -1), 0.0);
  EXPECT_DOUBLE_EQ(cdf_of_discrete(d, 3), 1.0);
  EXPECT_DOUBLE_EQ(d.strict_cdf(3), 0.7);
}

TEST(Dominance, Examples) {
  const DiscreteToleranceDist d({0, 3}, {0.7, 0.3});
  EXPECT_TRUE(stochastically_dominates(d, d));
  EXPECT_TRUE(stochastically_dominates(DiscreteToleranceDist::point_mass(0.01), DiscreteToleranceDist::point_mass(0)));
  EXPECT_FALSE(stochastically_dominates(DiscreteToleranceDist::point_mass(0), DiscreteToleranceDist::point_mass(0.01)));
  const DiscreteToleranceDist lo({1, 4}, {0.5, 0.5});
  const DiscreteToleranceDist hi({0, 5}, {0.5, 0.5});
  EXPECT_FALSE(stochastically_dominates(hi, lo));
  EXPECT_THROW(stochastically_dominates(DiscreteToleranceProfile{d}, DiscreteToleranceProfile{d, d}),
               std::invalid_argument);
}

TEST(Dominance, ReflexiveAndTransitive) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::random_dist(rng, 4, 4.0);
    const auto b = oracle::random_dominating(rng, a);
    const auto c = oracle::random_dominating(rng, b);
    EXPECT_TRUE(stochastically_dominates(a, a));
    EXPECT_TRUE(stochastically_dominates(b, a));
    EXPECT_TRUE(stochastically_dominates(c, b));
    EXPECT_TRUE(stochastically_dominates(c, a));
    // Transitivity on arbitrary triples: whenever both links hold, so does the composite.
    const auto x = oracle::random_dist(rng, 3, 3.0);
    const auto y = oracle::random_dist(rng, 3, 3.0);
    const auto z = oracle::random_dist(rng, 3, 3.0);
    if (stochastically_dominates(y, x) && stochastically_dominates(z, y)) {
      EXPECT_TRUE(stochastically_dominates(z, x));
    }
  }
}

TEST(Remap, IdentityWhenDistributionsMatch) {
  const DiscreteToleranceDist d({0, 1, 2.5}, {0.2, 0.5, 0.3});
  const TypeStrategyMap g{{0, 1, 2.5}, {kD, MixedStrategy({0.4, 0.6}), kC}};
  const RemapPlan plan = dominance_remap_plan(d, d);
  EXPECT_EQ(plan.alpha, (std::vector<std::size_t>{0, 1, 2}));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(plan.beta[j], d.probs()[j], 1e-12);
  const TypeStrategyMap out = dominance_remap(d, d, g);
  for (std::size_t j = 0; j < 3; ++j) expect_strategy(out.strategies[j], g.strategies[j].probs());
}

TEST(Remap, ShiftedTwoAtoms) {
  const DiscreteToleranceDist lo({0, 3}, {0.5, 0.5});
  const DiscreteToleranceDist hi({1, 4}, {0.5, 0.5});
  const TypeStrategyMap g{{0, 3}, {kD, kC}};
  const RemapPlan plan = dominance_remap_plan(lo, hi);
  EXPECT_EQ(plan.alpha, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(plan.beta[0], 0.5, 1e-12);
  EXPECT_NEAR(plan.beta[1], 0.5, 1e-12);
  const TypeStrategyMap out = dominance_remap(lo, hi, g);
  EXPECT_EQ(out.atoms, (std::vector<double>{1, 4}));
  expect_strategy(out.strategies[0], {0, 1});
  expect_strategy(out.strategies[1], {1, 0});
}

TEST(Remap, SingleTypeAbsorbsEverything) {
  const DiscreteToleranceDist lo({0, 2}, {0.25, 0.75});
  const DiscreteToleranceDist hi = DiscreteToleranceDist::point_mass(2);
  const TypeStrategyMap out = dominance_remap(lo, hi, {{0, 2}, {kD, kC}});
  expect_strategy(out.strategies[0], {0.75, 0.25});
}

TEST(Remap, SplitsOneSourceAtomAcrossSeveralTargets) {
  // Every target atom draws on the same source atom.
  const DiscreteToleranceDist lo = DiscreteToleranceDist::point_mass(0);
  const DiscreteToleranceDist hi({1, 2, 3}, {0.3, 0.3, 0.4});
  const RemapPlan plan = dominance_remap_plan(lo, hi);
  EXPECT_EQ(plan.alpha, (std::vector<std::size_t>{0, 0, 0}));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_GE(plan.beta[j], 0.0);
    EXPECT_LE(plan.beta[j], hi.probs()[j] + 1e-12);
  }
  const TypeStrategyMap out = dominance_remap(lo, hi, {{0}, {MixedStrategy({0.2, 0.8})}});
  for (const auto& s : out.strategies) expect_strategy(s, {0.2, 0.8});
}

TEST(Remap, Errors) {
  const DiscreteToleranceDist lo({0, 3}, {0.5, 0.5});
  const DiscreteToleranceDist below = DiscreteToleranceDist::point_mass(1);
  EXPECT_THROW(dominance_remap(lo, below, {{0, 3}, {kD, kC}}), DominanceError);
  EXPECT_THROW(dominance_remap(lo, lo, {{0, 2}, {kD, kC}}), std::invalid_argument);
  EXPECT_THROW(dominance_remap(lo, lo, {{0}, {kD}}), std::invalid_argument);
}

TEST(RemapProperties, MassConservationOrderingAndWeights) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto lo = oracle::random_dist(rng, 5, 4.0);
    const auto hi = oracle::random_dominating(rng, lo);
    const std::size_t strategies = 1 + trial % 4;
    TypeStrategyMap g;
    g.atoms = lo.support();
    for (std::size_t k = 0; k < lo.size(); ++k) g.strategies.push_back(oracle::random_mixed(rng, strategies));

    const RemapPlan plan = dominance_remap_plan(lo, hi);
    for (std::size_t j = 0; j < hi.size(); ++j) {
      EXPECT_LE(lo.support()[plan.alpha[j]], hi.support()[j]);
      EXPECT_GE(plan.beta[j], 0.0);
      EXPECT_LE(plan.beta[j], hi.probs()[j] + 1e-12);
      double row = 0.0;
      for (std::size_t h = 0; h < lo.size(); ++h) {
        row += plan.weights[j][h];
        if (plan.weights[j][h] > 0.0) {
          EXPECT_LE(lo.support()[h], hi.support()[j]);
        }
      }
      EXPECT_NEAR(row, hi.probs()[j], 1e-12);
    }

    const TypeStrategyMap out = dominance_remap(lo, hi, g);
    const auto before = g.mixture(lo);
    const auto after = out.mixture(hi);
    for (std::size_t s = 0; s < strategies; ++s) EXPECT_NEAR(before[s], after[s], 1e-9);
    for (const auto& s : out.strategies) {
      double sum = 0.0;
      for (double p : s.probs()) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(ContinuousCdf, Families) {
  const auto u = ToleranceCdf::uniform(1, 3);
  EXPECT_DOUBLE_EQ(u(0), 0.0);
  EXPECT_DOUBLE_EQ(u(2), 0.5);
  EXPECT_DOUBLE_EQ(u(5), 1.0);
  const auto pl = ToleranceCdf::piecewise_linear({{0, 0}, {1, 0.8}, {2, 1}});
  EXPECT_DOUBLE_EQ(pl(0.5), 0.4);
  EXPECT_DOUBLE_EQ(pl(1.5), 0.9);
  const auto te = ToleranceCdf::truncated_exponential(2.0, 1.0);
  EXPECT_NEAR(te(0.5), (1 - std::exp(-1.0)) / (1 - std::exp(-2.0)), 1e-15);
  EXPECT_DOUBLE_EQ(te(1.0), 1.0);
  EXPECT_DOUBLE_EQ(te(-1.0), 0.0);

  EXPECT_THROW(ToleranceCdf::uniform(2, 1), std::invalid_argument);
  EXPECT_THROW(ToleranceCdf::uniform(-1, 1), std::invalid_argument);
  EXPECT_THROW(ToleranceCdf::piecewise_linear({{0, 0.1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(ToleranceCdf::piecewise_linear({{0, 0}, {1, 0.6}, {2, 0.5}, {3, 1}}), std::invalid_argument);
  EXPECT_THROW(ToleranceCdf::truncated_exponential(0, 1), std::invalid_argument);
  EXPECT_THROW(u.shifted(-0.5), std::invalid_argument);
}

TEST(ContinuousCdf, MonotoneContinuousAndShiftDominates) {
  const ToleranceCdf families[] = {ToleranceCdf::uniform(0.5, 2), ToleranceCdf::truncated_exponential(1.5, 3),
                                   ToleranceCdf::piecewise_linear({{0, 0}, {0.2, 0.7}, {3, 1}})};
  for (const auto& F : families) {
    const auto G = F.shifted(0.7);
    double prev = 0.0;
    for (int k = -100; k <= 500; ++k) {
      const double x = k * 0.01;
      const double fx = F(x);
      EXPECT_GE(fx, prev);
      EXPECT_LE(std::abs(F(x + 1e-9) - fx), 1e-6);  // no jumps
      EXPECT_LE(G(x), fx + 1e-15);
      prev = fx;
    }
    EXPECT_DOUBLE_EQ(F(-1), 0.0);
    EXPECT_DOUBLE_EQ(F(1e6), 1.0);
    EXPECT_NEAR(G(1.7), F(1.0), 1e-12);
  }
}
