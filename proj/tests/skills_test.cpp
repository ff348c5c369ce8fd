#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "disdain/skills.hpp"
#include "oracles.hpp"

using namespace disdain;

TEST(SkillPrior, UniformProbability) {
  const SkillPrior prior{128};
  EXPECT_DOUBLE_EQ(prior.probability(), 1.0 / 128.0);
  EXPECT_DOUBLE_EQ(prior.max_reward_bits(), 7.0);
}

TEST(SampleSkill, FrequenciesWithinFiveSigma) {
  // 1e6 draws, p = 1/128: mean 7812.5, sigma 88.04.
  const SkillPrior prior{128};
  Rng rng(42);
  std::vector<int> counts(128, 0);
  for (int i = 0; i < 1'000'000; ++i) {
    const SkillId z = sample_skill(prior, rng);
    ASSERT_GE(z, 0);
    ASSERT_LT(z, 128);
    ++counts[static_cast<std::size_t>(z)];
  }
  for (int c : counts) EXPECT_NEAR(c, 7812.5, 5 * 88.04);
}

TEST(SkillReward, ExamplesInBits) {
  const SkillPrior prior{128};
  Distribution certain(128, 0.0);
  certain[3] = 1.0;
  EXPECT_NEAR(skill_reward(certain, 3, prior), 7.0, 1e-12);

  const Distribution uniform(128, 1.0 / 128.0);
  EXPECT_EQ(skill_reward(uniform, 5, prior), 0.0);

  Distribution half(128, 0.5 / 127.0);
  half[0] = 0.5;
  EXPECT_NEAR(skill_reward(half, 0, prior), 6.0, 1e-12);
}

TEST(SkillReward, ClippedAtZeroBelowPrior) {
  const SkillPrior prior{128};
  Distribution q(128, (1.0 - 1e-4) / 127.0);
  q[9] = 1e-4;
  EXPECT_EQ(skill_reward(q, 9, prior), 0.0);
  EXPECT_LT(raw_skill_reward(q, 9, prior), 0.0);
  q[9] = 0.0;
  EXPECT_EQ(raw_skill_reward(q, 9, prior), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(skill_reward(q, 9, prior), 0.0);
}

TEST(SkillReward, ClippedNeverBelowRaw) {
  const SkillPrior prior{16};
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Distribution q(16);
    double sum = 0.0;
    for (double& x : q) sum += (x = u(rng));
    for (double& x : q) x /= sum;
    for (SkillId z = 0; z < 16; ++z) {
      const double clipped = skill_reward(q, z, prior);
      EXPECT_GE(clipped, raw_skill_reward(q, z, prior));
      EXPECT_GE(clipped, 0.0);
      EXPECT_LE(clipped, prior.max_reward_bits() + 1e-12);
    }
  }
}

TEST(EffectiveSkills, Examples) {
  EXPECT_DOUBLE_EQ(effective_skills(0.0), 1.0);
  EXPECT_DOUBLE_EQ(effective_skills(7.0), 128.0);
  EXPECT_NEAR(effective_skills(4.906890595608519), 30.0, 1e-9);
}

TEST(EffectiveSkills, Monotone) {
  double prev = effective_skills(0.0);
  for (int i = 1; i <= 700; ++i) {
    const double cur = effective_skills(i * 0.01);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(MutualInformation, DiagonalTwoByTwo) {
  JointCounts j(2, 2);
  j.add(0, 0, 4);
  j.add(0, 1, 1);
  j.add(1, 0, 1);
  j.add(1, 1, 4);
  EXPECT_NEAR(exact_mutual_information(j), 0.27807190511263774, 1e-12);
}

TEST(MutualInformation, IndependentIsZeroAndDeterministicIsLogN) {
  JointCounts indep(4, 3);
  for (SkillId z = 0; z < 4; ++z)
    for (StateId s = 0; s < 3; ++s) indep.add(z, s, 7);
  EXPECT_NEAR(exact_mutual_information(indep), 0.0, 1e-12);

  JointCounts perfect(8, 8);
  for (SkillId z = 0; z < 8; ++z) perfect.add(z, z, 3);
  EXPECT_NEAR(exact_mutual_information(perfect), 3.0, 1e-12);
}

TEST(MutualInformation, EmptyTableThrows) {
  EXPECT_THROW(exact_mutual_information(JointCounts(3, 3)), std::invalid_argument);
}

TEST(MutualInformation, MatchesEntropyDifferenceOracle) {
  Rng rng(99);
  std::uniform_int_distribution<int> count(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    JointCounts j(6, 9);
    std::vector<std::vector<double>> table(6, std::vector<double>(9, 0.0));
    for (SkillId z = 0; z < 6; ++z) {
      for (StateId s = 0; s < 9; ++s) {
        const int c = count(rng);
        j.add(z, s, static_cast<std::uint64_t>(c));
        table[static_cast<std::size_t>(z)][static_cast<std::size_t>(s)] = c;
      }
    }
    EXPECT_NEAR(exact_mutual_information(j), oracle::mutual_information_bits(table), 1e-10);
  }
}

TEST(JointCounts, ConditionalUniformWhenUnseen) {
  JointCounts j(4, 2);
  j.add(1, 0, 3);
  j.add(2, 0, 1);
  const auto seen = j.conditional(0);
  EXPECT_DOUBLE_EQ(seen[1], 0.75);
  EXPECT_DOUBLE_EQ(seen[2], 0.25);
  for (double p : j.conditional(1)) EXPECT_DOUBLE_EQ(p, 0.25);
}

namespace {

struct Dataset {
  JointCounts joint;
  std::vector<SkillTrajectory> batch;
};

/// Random skill->state channel with `per_skill` draws for every skill.
Dataset balanced_dataset(int n_skills, int n_states, int per_skill, Rng& rng) {
  Dataset d{JointCounts(n_skills, n_states), {}};
  std::uniform_int_distribution<int> state(0, n_states - 1);
  std::uniform_int_distribution<int> spread(0, 2);
  for (SkillId z = 0; z < n_skills; ++z) {
    const StateId home = state(rng);
    for (int i = 0; i < per_skill; ++i) {
      const StateId s = spread(rng) == 0 ? state(rng) : home;
      d.joint.add(z, s);
      d.batch.push_back({z, {0, s}, {Action::kNoop}});
    }
  }
  return d;
}

}  // namespace

TEST(VariationalBound, EmpiricalConditionalIsTightOnBalancedData) {
  Rng rng(5);
  const SkillPrior prior{32};
  const Dataset d = balanced_dataset(32, 40, 200, rng);
  std::vector<Distribution> q;
  for (const auto& t : d.batch) q.push_back(d.joint.conditional(t.terminal_observation()));
  EXPECT_NEAR(variational_bound_estimate(d.batch, q, prior), exact_mutual_information(d.joint),
              1e-9);
}

TEST(VariationalBound, ArbitraryDiscriminatorIsLowerBound) {
  Rng rng(6);
  const SkillPrior prior{32};
  const Dataset d = balanced_dataset(32, 40, 200, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Distribution> rows(40);
  for (auto& row : rows) {
    row.resize(32);
    double sum = 0.0;
    for (double& x : row) sum += (x = u(rng) + 1e-3);
    for (double& x : row) x /= sum;
  }
  std::vector<Distribution> q;
  for (const auto& t : d.batch) q.push_back(rows[static_cast<std::size_t>(t.terminal_observation())]);
  EXPECT_LE(variational_bound_estimate(d.batch, q, prior), exact_mutual_information(d.joint) + 1e-9);
}

TEST(VariationalBound, SizeMismatchThrows) {
  std::vector<SkillTrajectory> batch{{0, {0, 1}, {Action::kRight}}};
  std::vector<Distribution> q;
  EXPECT_THROW(variational_bound_estimate(batch, q, SkillPrior{2}), std::invalid_argument);
}
