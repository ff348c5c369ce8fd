#include "disdain/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace disdain {

double entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

TabularDiscriminator::TabularDiscriminator(int n_states, int n_skills)
    : n_states_(n_states),
      n_skills_(n_skills),
      logits_(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_skills), 0.0) {
  if (n_states < 1 || n_skills < 1) {
    throw std::invalid_argument("discriminator needs at least one state and one skill");
  }
}

TabularDiscriminator TabularDiscriminator::random(int n_states, int n_skills, double init_scale,
                                                  Rng& rng) {
  TabularDiscriminator d(n_states, n_skills);
  if (init_scale > 0.0) {
    std::uniform_real_distribution<double> u(-init_scale, init_scale);
    for (double& x : d.logits_) x = u(rng);
  }
  return d;
}

void TabularDiscriminator::predict(StateId s, std::span<double> out) const {
  const auto row = logits(s);
  const double peak = *std::max_element(row.begin(), row.end());
  double norm = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    out[k] = std::exp(row[k] - peak);
    norm += out[k];
  }
  for (double& p : out) p /= norm;
}

Distribution TabularDiscriminator::predict(StateId s) const {
  Distribution out(static_cast<std::size_t>(n_skills_));
  predict(s, out);
  return out;
}

void TabularDiscriminator::sl_update(StateId s, SkillId z, double lr) {
  if (lr == 0.0) return;
  Distribution q = predict(s);
  auto row = logits(s);
  for (std::size_t k = 0; k < row.size(); ++k) {
    row[k] += lr * ((static_cast<SkillId>(k) == z ? 1.0 : 0.0) - q[k]);
  }
}

double TabularDiscriminator::loss(StateId s, SkillId z) const {
  const auto row = logits(s);
  const double peak = *std::max_element(row.begin(), row.end());
  double norm = 0.0;
  for (double x : row) norm += std::exp(x - peak);
  return -(row[static_cast<std::size_t>(z)] - peak - std::log(norm));
}

Ensemble::Ensemble(std::vector<TabularDiscriminator> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("ensemble needs at least one member");
  for (const auto& m : members_) {
    if (m.n_states() != members_.front().n_states() || m.n_skills() != members_.front().n_skills()) {
      throw std::invalid_argument("ensemble members must share dimensions");
    }
  }
}

Ensemble Ensemble::random(int size, int n_states, int n_skills, double init_scale, Rng& rng) {
  if (size < 1) throw std::invalid_argument("ensemble size must be >= 1");
  std::vector<TabularDiscriminator> members;
  members.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    members.push_back(TabularDiscriminator::random(n_states, n_skills, init_scale, rng));
  }
  return Ensemble(std::move(members));
}

Distribution Ensemble::mean(StateId s) const {
  Distribution acc(static_cast<std::size_t>(n_skills()), 0.0);
  Distribution q(acc.size());
  for (const auto& m : members_) {
    m.predict(s, q);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += q[k];
  }
  const double inv = 1.0 / static_cast<double>(members_.size());
  for (double& p : acc) p *= inv;
  return acc;
}

std::vector<Distribution> Ensemble::member_predictions(StateId s) const {
  std::vector<Distribution> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.predict(s));
  return out;
}

double Ensemble::disagreement(StateId s, std::span<double> mean_out) const {
  const std::size_t k = static_cast<std::size_t>(n_skills());
  std::fill(mean_out.begin(), mean_out.end(), 0.0);
  const auto first = members_.front().logits(s);
  bool identical = true;
  double member_h = 0.0;
  std::vector<double> buf(k);
  for (const auto& m : members_) {
    const auto row = m.logits(s);
    identical = identical && std::equal(row.begin(), row.end(), first.begin());
    const double peak = *std::max_element(row.begin(), row.end());
    double norm = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = row[i] - peak;
      buf[i] = std::exp(x);
      norm += buf[i];
      weighted += buf[i] * x;
    }
    // H = ln Z - E[x], converted to bits.
    member_h += (std::log(norm) - weighted / norm) / std::numbers::ln2;
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < k; ++i) mean_out[i] += buf[i] * inv;
  }
  const double n = static_cast<double>(members_.size());
  for (double& p : mean_out) p /= n;
  if (identical) return 0.0;
  return std::max(0.0, entropy(mean_out) - member_h / n);
}

void Ensemble::train(std::span<const std::pair<StateId, SkillId>> batch, double lr,
                     BatchReduction reduction) {
  if (batch.empty() || lr == 0.0) return;
  if (reduction == BatchReduction::kPerExample) {
    for (auto& m : members_) {
      for (const auto& [s, z] : batch) m.sl_update(s, z, lr);
    }
    return;
  }
  // Mean gradient: every example's gradient is taken at the pre-step logits.
  const double scale = lr / static_cast<double>(batch.size());
  const auto n_skills = static_cast<std::size_t>(this->n_skills());
  std::vector<double> grad;
  for (auto& m : members_) {
    std::vector<std::pair<StateId, Distribution>> preds;
    for (const auto& [s, z] : batch) {
      auto it = std::find_if(preds.begin(), preds.end(), [s = s](const auto& p) { return p.first == s; });
      if (it == preds.end()) preds.emplace_back(s, m.predict(s));
    }
    for (const auto& [s, q] : preds) {
      grad.assign(n_skills, 0.0);
      for (const auto& [bs, bz] : batch) {
        if (bs != s) continue;
        for (std::size_t k = 0; k < n_skills; ++k) {
          grad[k] += (static_cast<SkillId>(k) == bz ? 1.0 : 0.0) - q[k];
        }
      }
      auto row = m.logits(s);
      for (std::size_t k = 0; k < n_skills; ++k) row[k] += scale * grad[k];
    }
  }
}

}  // namespace disdain
