#pragma once

#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "disdain/gridworld.hpp"
#include "disdain/skills.hpp"

namespace disdain {

/// Action values indexed by (state, skill, action).
class QTable {
 public:
  QTable() = default;
  QTable(int n_states, int n_skills);

  int n_states() const { return n_states_; }
  int n_skills() const { return n_skills_; }

  double& at(StateId s, SkillId z, Action a) { return values_[index(s, z, a)]; }
  double at(StateId s, SkillId z, Action a) const { return values_[index(s, z, a)]; }

  std::span<const double> row(StateId s, SkillId z) const {
    return {values_.data() + index(s, z, Action::kLeft), static_cast<std::size_t>(kNumActions)};
  }

  const std::vector<double>& raw() const { return values_; }
  std::vector<double>& raw() { return values_; }

 private:
  std::size_t index(StateId s, SkillId z, Action a) const {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_skills_) +
            static_cast<std::size_t>(z)) *
               kNumActions +
           static_cast<std::size_t>(a);
  }

  int n_states_ = 0;
  int n_skills_ = 0;
  std::vector<double> values_;
};

/// Separate heads for the skill reward and the exploration bonus. They are
/// coupled only through composite_argmax.
struct DualQTables {
  QTable skill;
  QTable bonus;

  DualQTables() = default;
  DualQTables(int n_states, int n_skills) : skill(n_states, n_skills), bonus(n_states, n_skills) {}
};

/// argmax_a q_skill[s,z,a] + weight * q_bonus[s,z,a]; lowest index wins ties.
Action composite_argmax(const DualQTables& q, StateId s, SkillId z, double weight);

/// Uniform over all actions with probability epsilon, otherwise greedy.
Action epsilon_greedy(const DualQTables& q, StateId s, SkillId z, double weight, double epsilon,
                      Rng& rng);

/// Peng's Q(lambda) targets by backward recursion:
///   G[T-1] = r[T-1] + gamma * (terminal ? 0 : v[T-1])
///   G[t]   = r[t] + gamma * ((1 - lambda) * v[t] + lambda * G[t+1])
/// where v[t] is the head's value at (s[t+1], z, a*) and a* is the composite argmax.
std::vector<double> peng_lambda_targets(std::span<const double> rewards,
                                        std::span<const double> bootstrap_values, double gamma,
                                        double lambda, bool terminal);

/// table[s,z,a] += lr * (target - table[s,z,a]).
inline void q_update(QTable& table, StateId s, SkillId z, Action a, double target, double lr) {
  double& v = table.at(s, z, a);
  v += lr * (target - v);
}

/// One skill trajectory as stored in replay. Rewards live only on the final
/// transition; r_skill / r_bonus hold the acting-time values, which the
/// learner uses only when rewards are frozen.
struct Unroll {
  SkillId skill = 0;
  std::vector<StateId> states;  // length T + 1
  std::vector<Action> actions;  // length T
  double r_skill = 0.0;
  double r_bonus = 0.0;
  bool terminal = true;

  int length() const { return static_cast<int>(actions.size()); }
  StateId terminal_state() const { return states.back(); }
};

/// Length-T reward sequence that is zero except for the last entry.
std::vector<double> terminalized(double terminal_reward, int length);

struct QLearningParams {
  double discount = 0.99;
  double trace_lambda = 0.7;
  double learning_rate = 2e-3;
  double bonus_weight = 0.0;  // composite weight used to pick bootstrap actions
};

/// One learner step on both heads. Targets for every unroll in the batch are
/// computed from the pre-step tables, then the q_update calls are applied in
/// batch order. The skill head only ever sees skill_rewards and the bonus head
/// only bonus_rewards (one terminal reward per unroll).
void train_q_batch(DualQTables& q, std::span<const Unroll> batch,
                   std::span<const double> skill_rewards, std::span<const double> bonus_rewards,
                   const QLearningParams& params);

/// FIFO ring of unrolls with uniform sampling (with replacement). Appends and
/// samples are serialized by an internal mutex so actors may append while the
/// learner samples.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void append(Unroll unroll);
  /// Throws std::logic_error when empty.
  std::vector<Unroll> sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  /// Total unrolls ever appended.
  std::size_t inserted() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::vector<Unroll> ring_;
  std::size_t next_ = 0;
  std::size_t inserted_ = 0;
};

inline void replay_append(ReplayBuffer& buffer, Unroll unroll) { buffer.append(std::move(unroll)); }
inline std::vector<Unroll> replay_sample(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  return buffer.sample(batch_size, rng);
}

}  // namespace disdain
