#pragma once

#include <span>
#include <utility>
#include <vector>

#include "disdain/skills.hpp"

namespace disdain {

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(std::span<const double> dist);

/// q(Z | s) as a logits table over (state x skill).
class TabularDiscriminator {
 public:
  TabularDiscriminator(int n_states, int n_skills);

  /// Logits drawn i.i.d. from U[-init_scale, init_scale].
  static TabularDiscriminator random(int n_states, int n_skills, double init_scale, Rng& rng);

  int n_states() const { return n_states_; }
  int n_skills() const { return n_skills_; }

  std::span<double> logits(StateId s) {
    return {logits_.data() + offset(s), static_cast<std::size_t>(n_skills_)};
  }
  std::span<const double> logits(StateId s) const {
    return {logits_.data() + offset(s), static_cast<std::size_t>(n_skills_)};
  }

  /// Softmax of the row for s, written into out (size n_skills).
  void predict(StateId s, std::span<double> out) const;
  Distribution predict(StateId s) const;

  /// One cross-entropy gradient step at (s, z):
  /// logits[s][k] += lr * (1[k == z] - q(k | s)). Other rows are untouched.
  void sl_update(StateId s, SkillId z, double lr);

  /// Cross-entropy -ln q(z | s), in nats.
  double loss(StateId s, SkillId z) const;

  const std::vector<double>& raw() const { return logits_; }
  std::vector<double>& raw() { return logits_; }

 private:
  std::size_t offset(StateId s) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(n_skills_);
  }

  int n_states_;
  int n_skills_;
  std::vector<double> logits_;
};

/// How a batch of (state, skill) examples is turned into a discriminator step.
enum class BatchReduction {
  kPerExample,  // one sl_update per example, applied in order
  kMean,        // a single step along the batch-mean gradient
};

/// Independently initialized members trained on identical data.
class Ensemble {
 public:
  Ensemble() = default;
  explicit Ensemble(std::vector<TabularDiscriminator> members);
  static Ensemble random(int size, int n_states, int n_skills, double init_scale, Rng& rng);

  int size() const { return static_cast<int>(members_.size()); }
  int n_states() const { return members_.front().n_states(); }
  int n_skills() const { return members_.front().n_skills(); }

  const TabularDiscriminator& member(int i) const { return members_[static_cast<std::size_t>(i)]; }
  TabularDiscriminator& member(int i) { return members_[static_cast<std::size_t>(i)]; }

  /// Arithmetic mean of the member predictions at s.
  Distribution mean(StateId s) const;
  /// One prediction per member at s.
  std::vector<Distribution> member_predictions(StateId s) const;

  /// Writes the ensemble mean at s into mean_out and returns the DISDAIN
  /// reward there (entropy of the mean minus mean member entropy, in bits).
  /// Member entropies come from the logits directly.
  double disagreement(StateId s, std::span<double> mean_out) const;

  /// Trains every member on the same examples.
  void train(std::span<const std::pair<StateId, SkillId>> batch, double lr,
             BatchReduction reduction = BatchReduction::kPerExample);

 private:
  std::vector<TabularDiscriminator> members_;
};

/// Free-function forms used throughout the learner.
inline Distribution predict(const TabularDiscriminator& member, StateId s) {
  return member.predict(s);
}
inline Distribution ensemble_mean(const Ensemble& ensemble, StateId s) { return ensemble.mean(s); }
inline void sl_update(TabularDiscriminator& member, StateId s, SkillId z, double lr) {
  member.sl_update(s, z, lr);
}

}  // namespace disdain
