#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "disdain/gridworld.hpp"

namespace disdain {

using SkillId = int;
using Rng = std::mt19937_64;
/// A categorical distribution over skills.
using Distribution = std::vector<double>;

/// Uniform prior over a fixed number of skills.
struct SkillPrior {
  int n_skills = 128;

  double probability() const { return 1.0 / n_skills; }
  /// log2 N_Z, the most any skill reward can be worth.
  double max_reward_bits() const;
};

struct SkillTrajectory {
  SkillId skill = 0;
  std::vector<StateId> states;  // length T + 1
  std::vector<Action> actions;  // length T

  StateId terminal_observation() const { return states.back(); }
};

/// Skill x terminal-state occurrence table.
class JointCounts {
 public:
  JointCounts(int n_skills, int n_states);

  void add(SkillId z, StateId s, std::uint64_t n = 1);
  std::uint64_t at(SkillId z, StateId s) const {
    return counts_[static_cast<std::size_t>(z) * static_cast<std::size_t>(n_states_) +
                   static_cast<std::size_t>(s)];
  }
  std::uint64_t total() const { return total_; }
  int n_skills() const { return n_skills_; }
  int n_states() const { return n_states_; }

  /// Empirical p(z | s); uniform for states never observed.
  Distribution conditional(StateId s) const;

 private:
  int n_skills_;
  int n_states_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

SkillId sample_skill(const SkillPrior& prior, Rng& rng);

/// log2 q(z) - log2 p(z), without clipping. -inf when q(z) == 0.
double raw_skill_reward(std::span<const double> q_mean, SkillId z, const SkillPrior& prior);

/// Clipped skill reward in bits: max(log2 q(z) - log2(1/N_Z), 0).
/// q_mean should be the ensemble-averaged prediction.
double skill_reward(std::span<const double> q_mean, SkillId z, const SkillPrior& prior);

/// 2^bits.
double effective_skills(double mean_reward_bits);

/// Plug-in I(Z; O) of the normalized joint, in bits. Throws on an empty table.
double exact_mutual_information(const JointCounts& joint);

/// Mean over the batch of log2 q(z | s_T) + log2 N_Z. Unclipped, so it is a
/// lower-bound estimate rather than the training reward.
double variational_bound_estimate(std::span<const SkillTrajectory> batch,
                                  std::span<const Distribution> q_mean, const SkillPrior& prior);

}  // namespace disdain
