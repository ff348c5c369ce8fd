#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "disdain/bonus.hpp"
#include "disdain/discriminator.hpp"

namespace disdain {

/// Every knob of a run. Defaults are the Four Rooms hyperparameters; the
/// knobs the original setup leaves open (epsilon, logit init, metric window,
/// budget, insert ratio) carry this project's chosen values.
struct ExperimentConfig {
  BonusKind condition = BonusKind::kDisdain;
  std::uint64_t seed = 0;
  std::int64_t steps = 200'000;  // learner steps

  int n_skills = 128;
  int trajectory_length = 20;
  int batch_size = 16;
  std::int64_t replay_capacity = 1'000'000;  // unrolls
  double learning_rate = 2e-3;               // Q heads
  double discriminator_learning_rate = 2e-3;
  double discount = 0.99;
  double trace_lambda = 0.7;
  int num_actors = 64;
  int actor_update_period = 100;
  int ensemble_size = 2;
  double disdain_weight = 10.0;
  double count_weight = 10.0;

  double epsilon = 0.1;
  bool epsilon_ladder = false;
  double logit_init_scale = 1.0;
  double q_init_scale = 0.0;  // skill-head entries start in U[-s, s]
  int metric_window = 1000;  // learner batches
  std::string map_path;      // empty: built-in Four Rooms map

  int log_every = 100;
  double checkpoint_fraction = 0.1;
  int unrolls_per_learner_step = 4;
  bool serial = true;
  bool freeze_rewards = false;
  BatchReduction discriminator_reduction = BatchReduction::kPerExample;

  BonusConfig bonus() const {
    return BonusConfig::resolve(condition, ensemble_size, disdain_weight, count_weight);
  }

  /// Range checks. Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Applies one `key = value` override. Throws std::invalid_argument for
  /// unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Flat `key = value` lines for every field, in a stable order.
  std::string to_text() const;
};

/// Parses `key = value` lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::string_view reduction_name(BatchReduction r);

}  // namespace disdain
