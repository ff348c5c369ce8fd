#include "disdain/agent.hpp"

#include <stdexcept>

namespace disdain {

QTable::QTable(int n_states, int n_skills)
    : n_states_(n_states),
      n_skills_(n_skills),
      values_(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_skills) * kNumActions,
              0.0) {}

Action composite_argmax(const DualQTables& q, StateId s, SkillId z, double weight) {
  const auto skill = q.skill.row(s, z);
  const auto bonus = q.bonus.row(s, z);
  std::size_t best = 0;
  double best_value = skill[0] + weight * bonus[0];
  for (std::size_t a = 1; a < kNumActions; ++a) {
    const double v = skill[a] + weight * bonus[a];
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return static_cast<Action>(best);
}

Action epsilon_greedy(const DualQTables& q, StateId s, SkillId z, double weight, double epsilon,
                      Rng& rng) {
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, kNumActions - 1);
      return static_cast<Action>(pick(rng));
    }
  }
  return composite_argmax(q, s, z, weight);
}

std::vector<double> peng_lambda_targets(std::span<const double> rewards,
                                        std::span<const double> bootstrap_values, double gamma,
                                        double lambda, bool terminal) {
  if (rewards.size() != bootstrap_values.size()) {
    throw std::invalid_argument("rewards and bootstrap values differ in length");
  }
  std::vector<double> targets(rewards.size());
  if (rewards.empty()) return targets;
  const std::size_t last = rewards.size() - 1;
  targets[last] = rewards[last] + gamma * (terminal ? 0.0 : bootstrap_values[last]);
  for (std::size_t t = last; t-- > 0;) {
    targets[t] = rewards[t] +
                 gamma * ((1.0 - lambda) * bootstrap_values[t] + lambda * targets[t + 1]);
  }
  return targets;
}

std::vector<double> terminalized(double terminal_reward, int length) {
  std::vector<double> r(static_cast<std::size_t>(length), 0.0);
  if (length > 0) r.back() = terminal_reward;
  return r;
}

void train_q_batch(DualQTables& q, std::span<const Unroll> batch,
                   std::span<const double> skill_rewards, std::span<const double> bonus_rewards,
                   const QLearningParams& params) {
  if (skill_rewards.size() != batch.size() || bonus_rewards.size() != batch.size()) {
    throw std::invalid_argument("one terminal reward per unroll and head required");
  }
  struct Update {
    StateId s;
    SkillId z;
    Action a;
    double skill_target;
    double bonus_target;
  };
  std::vector<Update> updates;
  std::vector<double> skill_boot, bonus_boot;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Unroll& u = batch[i];
    const int T = u.length();
    skill_boot.assign(static_cast<std::size_t>(T), 0.0);
    bonus_boot.assign(static_cast<std::size_t>(T), 0.0);
    for (int t = 0; t < T; ++t) {
      const StateId next = u.states[static_cast<std::size_t>(t) + 1];
      const Action best = composite_argmax(q, next, u.skill, params.bonus_weight);
      skill_boot[static_cast<std::size_t>(t)] = q.skill.at(next, u.skill, best);
      bonus_boot[static_cast<std::size_t>(t)] = q.bonus.at(next, u.skill, best);
    }
    const auto skill_targets =
        peng_lambda_targets(terminalized(skill_rewards[i], T), skill_boot, params.discount,
                            params.trace_lambda, u.terminal);
    const auto bonus_targets =
        peng_lambda_targets(terminalized(bonus_rewards[i], T), bonus_boot, params.discount,
                            params.trace_lambda, u.terminal);
    for (int t = 0; t < T; ++t) {
      const auto k = static_cast<std::size_t>(t);
      updates.push_back({u.states[k], u.skill, u.actions[k], skill_targets[k], bonus_targets[k]});
    }
  }
  for (const auto& up : updates) {
    q_update(q.skill, up.s, up.z, up.a, up.skill_target, params.learning_rate);
    q_update(q.bonus, up.s, up.z, up.a, up.bonus_target, params.learning_rate);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::append(Unroll unroll) {
  std::lock_guard lock(mutex_);
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(unroll));
  } else {
    ring_[next_] = std::move(unroll);
  }
  next_ = (next_ + 1) % capacity_;
  ++inserted_;
}

std::vector<Unroll> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  std::lock_guard lock(mutex_);
  if (ring_.empty()) throw std::logic_error("sampling an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
  std::vector<Unroll> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(ring_[pick(rng)]);
  return batch;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return ring_.size();
}

std::size_t ReplayBuffer::inserted() const {
  std::lock_guard lock(mutex_);
  return inserted_;
}

}  // namespace disdain
