#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "disdain/bonus.hpp"
#include "disdain/discriminator.hpp"
#include "oracles.hpp"

using namespace disdain;

namespace {

double total_variation(const Distribution& a, const Distribution& b) {
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
  return 0.5 * tv;
}

Distribution random_distribution(std::size_t n, Rng& rng) {
  std::gamma_distribution<double> g(0.5, 1.0);
  Distribution d(n);
  double sum = 0.0;
  for (double& x : d) sum += (x = g(rng) + 1e-300);
  for (double& x : d) x /= sum;
  return d;
}

}  // namespace

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(Distribution(128, 1.0 / 128.0)), 7.0, 1e-12);
  Distribution one_hot(10, 0.0);
  one_hot[4] = 1.0;
  EXPECT_EQ(entropy(one_hot), 0.0);
  EXPECT_NEAR(entropy(Distribution{0.75, 0.25}), 0.8112781244591328, 1e-12);
}

TEST(Entropy, MatchesDefinitionOracle) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_distribution(37, rng);
    EXPECT_NEAR(entropy(d), oracle::entropy_bits(d), 1e-12);
  }
}

TEST(Predict, ZeroLogitsGiveUniform) {
  const TabularDiscriminator d(3, 8);
  for (double p : d.predict(1)) EXPECT_DOUBLE_EQ(p, 0.125);
}

TEST(Predict, LnTwoVersusZero) {
  TabularDiscriminator d(1, 2);
  d.logits(0)[0] = std::log(2.0);
  const auto q = predict(d, 0);
  EXPECT_NEAR(q[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 1.0 / 3.0, 1e-15);
}

TEST(Predict, RowsAreNormalizedEvenForExtremeLogits) {
  Rng rng(11);
  auto d = TabularDiscriminator::random(20, 128, 1.0, rng);
  d.logits(3)[0] = 800.0;
  d.logits(4)[7] = -800.0;
  for (StateId s = 0; s < 20; ++s) {
    const auto q = d.predict(s);
    EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-9);
    for (double p : q) {
      EXPECT_GE(p, 0.0);
      EXPECT_TRUE(std::isfinite(p));
    }
  }
}

TEST(RandomInit, LogitsWithinScaleAndSeeded) {
  Rng a(17), b(17);
  const auto d1 = TabularDiscriminator::random(104, 128, 1.0, a);
  const auto d2 = TabularDiscriminator::random(104, 128, 1.0, b);
  EXPECT_EQ(d1.raw(), d2.raw());
  const auto [lo, hi] = std::minmax_element(d1.raw().begin(), d1.raw().end());
  EXPECT_GE(*lo, -1.0);
  EXPECT_LE(*hi, 1.0);
  EXPECT_LT(*lo, -0.9);
  EXPECT_GT(*hi, 0.9);
}

TEST(SlUpdate, ZeroLearningRateIsNoop) {
  Rng rng(1);
  auto d = TabularDiscriminator::random(5, 6, 1.0, rng);
  const auto before = d.raw();
  sl_update(d, 2, 3, 0.0);
  EXPECT_EQ(d.raw(), before);
}

TEST(SlUpdate, ClosedFormStepFromUniformRow) {
  const double lr = 2e-3;
  TabularDiscriminator d(4, 128);
  d.sl_update(2, 5, lr);
  for (int k = 0; k < 128; ++k) {
    const double expected = k == 5 ? lr * (1.0 - 1.0 / 128.0) : -lr / 128.0;
    EXPECT_NEAR(d.logits(2)[static_cast<std::size_t>(k)], expected, 1e-18);
  }
  for (StateId s : {0, 1, 3}) {
    for (double x : d.logits(s)) EXPECT_EQ(x, 0.0);
  }
}

TEST(SlUpdate, RepeatedUpdatesConverge) {
  TabularDiscriminator d(2, 128);
  for (int i = 0; i < 100'000; ++i) d.sl_update(1, 42, 2e-3);
  EXPECT_GT(d.predict(1)[42], 0.99);
}

TEST(SlUpdate, SmallStepDecreasesLoss) {
  Rng rng(23);
  std::uniform_int_distribution<int> skill(0, 127);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = TabularDiscriminator::random(3, 128, 3.0, rng);
    const SkillId z = skill(rng);
    const double before = d.loss(1, z);
    d.sl_update(1, z, 1e-4);
    EXPECT_LT(d.loss(1, z), before);
  }
}

TEST(EnsembleMean, Examples) {
  Rng rng(2);
  const auto m = TabularDiscriminator::random(3, 4, 1.0, rng);
  const Ensemble same({m, m});
  const auto q = same.mean(1);
  const auto p = m.predict(1);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(q[k], p[k], 1e-15);

  EXPECT_EQ(ensemble_mean(Ensemble({m}), 2), m.predict(2));

  TabularDiscriminator a(1, 3), b(1, 3);
  a.logits(0)[0] = 1000.0;
  b.logits(0)[2] = 1000.0;
  const auto two = Ensemble({a, b}).mean(0);
  EXPECT_NEAR(two[0], 0.5, 1e-12);
  EXPECT_NEAR(two[1], 0.0, 1e-12);
  EXPECT_NEAR(two[2], 0.5, 1e-12);
}

TEST(EnsembleMean, JensenEntropyOfMeanAtLeastMeanEntropy) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto e = Ensemble::random(3, 2, 16, 4.0, rng);
    for (StateId s = 0; s < 2; ++s) {
      double mean_h = 0.0;
      for (const auto& q : e.member_predictions(s)) mean_h += entropy(q) / 3.0;
      EXPECT_GE(entropy(e.mean(s)), mean_h - 1e-12);
    }
  }
}

TEST(Ensemble, RejectsMismatchedMembers) {
  EXPECT_THROW(Ensemble({TabularDiscriminator(3, 4), TabularDiscriminator(3, 5)}),
               std::invalid_argument);
  EXPECT_THROW(Ensemble(std::vector<TabularDiscriminator>{}), std::invalid_argument);
}

TEST(Ensemble, MembersOnlyShareData) {
  Rng rng(8);
  auto e = Ensemble::random(2, 4, 6, 1.0, rng);
  const auto other = e.member(1).raw();
  e.member(0).sl_update(0, 1, 0.5);
  EXPECT_EQ(e.member(1).raw(), other);
}

TEST(Ensemble, SharedTrainingDrivesMembersTogether) {
  Rng rng(12);
  auto e = Ensemble::random(2, 10, 128, 1.0, rng);
  // Fixed 16-example dataset over four states with overlapping skills, fed as
  // 1e5 learner-sized batches.
  const std::vector<std::pair<StateId, SkillId>> data{
      {0, 3}, {0, 3}, {0, 9}, {0, 3}, {1, 40}, {1, 40}, {1, 41}, {1, 40},
      {2, 7}, {2, 8}, {2, 9}, {2, 7}, {3, 100}, {3, 100}, {3, 100}, {3, 5}};
  for (int i = 0; i < 100'000; ++i) e.train(data, 2e-3);
  for (StateId s = 0; s < 4; ++s) {
    EXPECT_LT(total_variation(e.member(0).predict(s), e.member(1).predict(s)), 0.01) << "state " << s;
  }
  // Untrained states keep their independent initialization.
  EXPECT_GT(total_variation(e.member(0).predict(7), e.member(1).predict(7)), 0.05);
}

TEST(Ensemble, MeanReductionIsOneStepAlongAverageGradient) {
  Rng rng(4);
  auto per = Ensemble::random(1, 2, 5, 1.0, rng);
  auto mean = per;
  const std::vector<std::pair<StateId, SkillId>> batch{{0, 1}, {0, 2}, {1, 4}, {0, 1}};
  const auto q0 = per.member(0).predict(0);
  const auto q1 = per.member(0).predict(1);
  mean.train(batch, 0.4, BatchReduction::kMean);
  for (std::size_t k = 0; k < 5; ++k) {
    const double g0 = (k == 1 ? 2.0 : 0.0) + (k == 2 ? 1.0 : 0.0) - 3.0 * q0[k];
    const double g1 = (k == 4 ? 1.0 : 0.0) - q1[k];
    EXPECT_NEAR(mean.member(0).logits(0)[k], per.member(0).logits(0)[k] + 0.1 * g0, 1e-15);
    EXPECT_NEAR(mean.member(0).logits(1)[k], per.member(0).logits(1)[k] + 0.1 * g1, 1e-15);
  }
}

TEST(Ensemble, PerExampleReductionMatchesSequentialUpdates) {
  Rng rng(4);
  auto e = Ensemble::random(2, 2, 5, 1.0, rng);
  auto manual = e;
  const std::vector<std::pair<StateId, SkillId>> batch{{0, 1}, {0, 2}, {1, 4}};
  e.train(batch, 0.3, BatchReduction::kPerExample);
  for (int m = 0; m < 2; ++m) {
    for (const auto& [s, z] : batch) manual.member(m).sl_update(s, z, 0.3);
    EXPECT_EQ(e.member(m).raw(), manual.member(m).raw());
  }
}

TEST(Ensemble, DisagreementMatchesDefinition) {
  Rng rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    const int size = 2 + trial % 4;
    const auto e = Ensemble::random(size, 3, 128, 0.5 + trial % 7, rng);
    for (StateId s = 0; s < 3; ++s) {
      Distribution mean(128);
      const double fast = e.disagreement(s, mean);
      EXPECT_NEAR(fast, disdain_reward(e.member_predictions(s)), 1e-12);
      const auto ref = e.mean(s);
      for (std::size_t k = 0; k < 128; ++k) EXPECT_NEAR(mean[k], ref[k], 1e-15);
    }
  }
  const auto m = TabularDiscriminator::random(2, 16, 2.0, rng);
  Distribution mean(16);
  EXPECT_EQ(Ensemble({m, m, m}).disagreement(1, mean), 0.0);
}
