#include "disdain/skills.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace disdain {

double SkillPrior::max_reward_bits() const { return std::log2(static_cast<double>(n_skills)); }

JointCounts::JointCounts(int n_skills, int n_states)
    : n_skills_(n_skills),
      n_states_(n_states),
      counts_(static_cast<std::size_t>(n_skills) * static_cast<std::size_t>(n_states), 0) {
  if (n_skills < 1 || n_states < 1) throw std::invalid_argument("JointCounts: empty dimensions");
}

void JointCounts::add(SkillId z, StateId s, std::uint64_t n) {
  if (z < 0 || z >= n_skills_ || s < 0 || s >= n_states_) {
    throw std::out_of_range("JointCounts::add index out of range");
  }
  counts_[static_cast<std::size_t>(z) * static_cast<std::size_t>(n_states_) +
          static_cast<std::size_t>(s)] += n;
  total_ += n;
}

Distribution JointCounts::conditional(StateId s) const {
  Distribution p(static_cast<std::size_t>(n_skills_), 0.0);
  std::uint64_t column = 0;
  for (SkillId z = 0; z < n_skills_; ++z) column += at(z, s);
  if (column == 0) return Distribution(p.size(), 1.0 / n_skills_);
  for (SkillId z = 0; z < n_skills_; ++z) {
    p[static_cast<std::size_t>(z)] = static_cast<double>(at(z, s)) / static_cast<double>(column);
  }
  return p;
}

SkillId sample_skill(const SkillPrior& prior, Rng& rng) {
  std::uniform_int_distribution<SkillId> pick(0, prior.n_skills - 1);
  return pick(rng);
}

double raw_skill_reward(std::span<const double> q_mean, SkillId z, const SkillPrior& prior) {
  const double q = q_mean[static_cast<std::size_t>(z)];
  if (q <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(q) + prior.max_reward_bits();
}

double skill_reward(std::span<const double> q_mean, SkillId z, const SkillPrior& prior) {
  // The raw reward is only positive when q(z) beats the prior.
  if (!(q_mean[static_cast<std::size_t>(z)] > prior.probability())) return 0.0;
  return std::log2(q_mean[static_cast<std::size_t>(z)]) + prior.max_reward_bits();
}

double effective_skills(double mean_reward_bits) { return std::exp2(mean_reward_bits); }

double exact_mutual_information(const JointCounts& joint) {
  if (joint.total() == 0) throw std::invalid_argument("mutual information of an all-zero table");
  const double total = static_cast<double>(joint.total());
  std::vector<double> pz(static_cast<std::size_t>(joint.n_skills()), 0.0);
  std::vector<double> ps(static_cast<std::size_t>(joint.n_states()), 0.0);
  for (SkillId z = 0; z < joint.n_skills(); ++z) {
    for (StateId s = 0; s < joint.n_states(); ++s) {
      const double p = static_cast<double>(joint.at(z, s)) / total;
      pz[static_cast<std::size_t>(z)] += p;
      ps[static_cast<std::size_t>(s)] += p;
    }
  }
  double mi = 0.0;
  for (SkillId z = 0; z < joint.n_skills(); ++z) {
    for (StateId s = 0; s < joint.n_states(); ++s) {
      const auto c = joint.at(z, s);
      if (c == 0) continue;
      const double p = static_cast<double>(c) / total;
      mi += p * std::log2(p / (pz[static_cast<std::size_t>(z)] * ps[static_cast<std::size_t>(s)]));
    }
  }
  return std::max(mi, 0.0);
}

double variational_bound_estimate(std::span<const SkillTrajectory> batch,
                                  std::span<const Distribution> q_mean, const SkillPrior& prior) {
  if (batch.empty()) throw std::invalid_argument("variational bound of an empty batch");
  if (q_mean.size() != batch.size()) {
    throw std::invalid_argument("one discriminator prediction per trajectory required");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sum += raw_skill_reward(q_mean[i], batch[i].skill, prior);
  }
  return sum / static_cast<double>(batch.size());
}

}  // namespace disdain
