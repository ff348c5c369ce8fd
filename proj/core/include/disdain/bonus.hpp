#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "disdain/skills.hpp"

namespace disdain {

/// The four training conditions. kEnsembleOnly is the DISDAIN ablation with
/// the bonus weight set to zero.
enum class BonusKind { kNone, kCount, kDisdain, kEnsembleOnly };

std::string_view bonus_kind_name(BonusKind kind);
/// Throws std::invalid_argument for unknown names.
BonusKind parse_bonus_kind(std::string_view name);

/// Resolved bonus settings for one run.
struct BonusConfig {
  BonusKind kind = BonusKind::kNone;
  double weight = 0.0;
  int ensemble_size = 1;

  /// Maps a condition onto (kind, weight, N). ensemble-only with N = 1 is the
  /// unbonused run and resolves to kNone.
  static BonusConfig resolve(BonusKind condition, int ensemble_size, double disdain_weight,
                             double count_weight);
  /// Checks the kind / N / weight pairing. Throws std::invalid_argument.
  void validate() const;
};

/// Per-state tally of skill-trajectory endpoints n(s).
class VisitCounter {
 public:
  explicit VisitCounter(int n_states) : counts_(static_cast<std::size_t>(n_states), 0) {}

  void record(StateId s) {
    auto& c = counts_.at(static_cast<std::size_t>(s));
    if (c == 0) ++distinct_;
    ++c;
  }
  std::uint64_t count(StateId s) const { return counts_.at(static_cast<std::size_t>(s)); }
  /// Number of states that have ended at least one trajectory.
  int distinct() const { return distinct_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  std::vector<std::uint64_t> counts_;
  int distinct_ = 0;
};

/// Entropy of the mean prediction minus the mean of the member entropies, in
/// bits. Float residue above -1e-9 is clamped to 0; anything lower throws
/// std::logic_error.
double disdain_reward(std::span<const Distribution> member_dists);

/// 1 / sqrt(n(s)). The visit must already be recorded; n(s) = 0 throws
/// std::logic_error.
double count_bonus(const VisitCounter& counter, StateId s);

inline double total_reward(double r_skill, double r_bonus, double weight) {
  return r_skill + weight * r_bonus;
}

}  // namespace disdain
