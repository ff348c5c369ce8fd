#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "disdain/agent.hpp"
#include "disdain/bonus.hpp"
#include "disdain/config.hpp"
#include "disdain/discriminator.hpp"
#include "disdain/gridworld.hpp"

namespace disdain {

/// Everything needed to act and to score skills: the policy tables, the
/// discriminator ensemble and the bonus setting they were trained under.
struct Snapshot {
  DualQTables q;
  Ensemble ensemble;
  BonusConfig bonus;
  SkillPrior prior;
  int trajectory_length = 20;
  std::int64_t learner_step = 0;
};

/// Per-cell values aligned to a layout; walls hold -1.
struct HeatmapGrid {
  static constexpr double kWall = -1.0;

  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  static HeatmapGrid zeros(const Layout& layout);
  double& at(Cell c) { return values[static_cast<std::size_t>(c.row * cols + c.col)]; }
  double at(Cell c) const { return values[static_cast<std::size_t>(c.row * cols + c.col)]; }
  /// Sum over non-wall cells.
  double walkable_sum() const;
  /// Mean over non-wall cells.
  double walkable_mean() const;
  int nonzero_cells() const;
};

struct MetricsRow {
  std::int64_t learner_step = 0;
  double mean_r_skill_bits = 0.0;  // window mean of the clipped skill reward
  double n_skills = 1.0;           // 2^mean_r_skill_bits
  double mean_r_bonus = 0.0;       // window mean of the unweighted bonus
  int coverage = 0;                // distinct trajectory endpoints so far
  double wall_time_s = 0.0;
};

struct EvalResult {
  HeatmapGrid terminal_counts;
  std::vector<StateId> terminal_per_skill;
  double mean_reward_bits = 0.0;
  double n_skills = 1.0;
  int coverage = 0;  // distinct cells among the terminal states
};

struct Checkpoint {
  std::int64_t learner_step = 0;
  Snapshot snapshot;
  EvalResult eval;
  HeatmapGrid disdain_map;  // empty when N = 1
};

/// Mean of the per-state DISDAIN map, sampled with every metrics row.
struct BonusTracePoint {
  std::int64_t learner_step = 0;
  double mean_disdain = 0.0;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<MetricsRow> rows;
  std::vector<BonusTracePoint> disdain_trace;  // empty when N = 1
  std::vector<Checkpoint> checkpoints;         // step 0 and every checkpoint_fraction
  Snapshot final_snapshot;
  EvalResult final_eval;
  VisitCounter visits{0};
  double wall_time_s = 0.0;
};

/// Terminal rewards for one unroll: clipped skill reward under the ensemble
/// mean, plus the unweighted bonus for the configured kind. For the count
/// bonus the endpoint must already be recorded in `visits`.
struct TerminalRewards {
  double skill = 0.0;
  double bonus = 0.0;
};
TerminalRewards compute_rewards(const Ensemble& ensemble, const VisitCounter& visits,
                                const BonusConfig& bonus, const SkillPrior& prior,
                                StateId terminal, SkillId z);

/// One skill trajectory from the start state under epsilon-greedy composite
/// actions.
Unroll rollout(const Layout& layout, const DualQTables& q, double bonus_weight, SkillId z,
               int length, double epsilon, Rng& rng);

/// One greedy rollout per skill from the start; histogram of endpoints and the
/// effective skill count under the snapshot's ensemble mean.
EvalResult evaluate_skills(const Snapshot& snapshot, const Layout& layout);

/// DISDAIN reward at every walkable cell. Throws std::invalid_argument if the
/// ensemble has a single member.
HeatmapGrid disdain_state_map(const Snapshot& snapshot, const Layout& layout);

/// Called after every metrics row; lets the CLI stream progress.
using ProgressCallback = std::function<void(const MetricsRow&)>;

/// Trains actors and learner for the configured budget. Serial mode interleaves one actor
/// with the learner and is bit-reproducible for a fixed seed; otherwise
/// num_actors threads feed the learner through a rate-limited queue.
RunResult run_training(const ExperimentConfig& config, const Layout& layout,
                       const ProgressCallback& progress = {});

/// The layout named by config.map_path, or the built-in map.
Layout layout_for(const ExperimentConfig& config);

/// Initial (untrained) snapshot for a config, as seeded by run_training.
Snapshot initial_snapshot(const ExperimentConfig& config, const Layout& layout);

}  // namespace disdain
