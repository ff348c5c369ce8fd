#include "disdain/bonus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "disdain/discriminator.hpp"

namespace disdain {

std::string_view bonus_kind_name(BonusKind kind) {
  switch (kind) {
    case BonusKind::kNone: return "none";
    case BonusKind::kCount: return "count";
    case BonusKind::kDisdain: return "disdain";
    case BonusKind::kEnsembleOnly: return "ensemble-only";
  }
  return "?";
}

BonusKind parse_bonus_kind(std::string_view name) {
  for (auto kind : {BonusKind::kNone, BonusKind::kCount, BonusKind::kDisdain,
                    BonusKind::kEnsembleOnly}) {
    if (name == bonus_kind_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown condition '" + std::string(name) +
                              "' (expected none, count, disdain or ensemble-only)");
}

BonusConfig BonusConfig::resolve(BonusKind condition, int ensemble_size, double disdain_weight,
                                 double count_weight) {
  switch (condition) {
    case BonusKind::kNone: return {BonusKind::kNone, 0.0, 1};
    case BonusKind::kCount: return {BonusKind::kCount, count_weight, 1};
    case BonusKind::kDisdain: return {BonusKind::kDisdain, disdain_weight, ensemble_size};
    case BonusKind::kEnsembleOnly:
      if (ensemble_size == 1) return {BonusKind::kNone, 0.0, 1};
      return {BonusKind::kEnsembleOnly, 0.0, ensemble_size};
  }
  throw std::invalid_argument("unknown bonus kind");
}

void BonusConfig::validate() const {
  if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be >= 1");
  if (!(weight >= 0.0)) throw std::invalid_argument("bonus weight must be >= 0");
  switch (kind) {
    case BonusKind::kNone:
      if (ensemble_size != 1 || weight != 0.0) {
        throw std::invalid_argument("condition none requires N = 1 and weight 0");
      }
      break;
    case BonusKind::kEnsembleOnly:
      if (ensemble_size < 2 || weight != 0.0) {
        throw std::invalid_argument("condition ensemble-only requires N > 1 and weight 0");
      }
      break;
    case BonusKind::kDisdain:
      if (ensemble_size < 2) throw std::invalid_argument("DISDAIN requires N >= 2");
      break;
    case BonusKind::kCount: break;
  }
}

double disdain_reward(std::span<const Distribution> member_dists) {
  if (member_dists.empty()) throw std::invalid_argument("DISDAIN needs at least one member");
  const std::size_t k = member_dists.front().size();
  Distribution mean(k, 0.0);
  double mean_entropy = 0.0;
  for (const auto& d : member_dists) {
    if (d.size() != k) throw std::invalid_argument("member distributions differ in size");
    for (std::size_t i = 0; i < k; ++i) mean[i] += d[i];
    mean_entropy += entropy(d);
  }
  const bool identical = std::all_of(member_dists.begin(), member_dists.end(),
                                     [&](const Distribution& d) { return d == member_dists.front(); });
  if (identical) return 0.0;
  const double n = static_cast<double>(member_dists.size());
  for (double& p : mean) p /= n;
  const double r = entropy(mean) - mean_entropy / n;
  if (r < -1e-9) throw std::logic_error("negative DISDAIN reward " + std::to_string(r));
  return r < 0.0 ? 0.0 : r;
}

double count_bonus(const VisitCounter& counter, StateId s) {
  const auto n = counter.count(s);
  if (n == 0) throw std::logic_error("count bonus queried for an unvisited state");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace disdain
