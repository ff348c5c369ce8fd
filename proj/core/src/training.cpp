#include "disdain/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace disdain {

namespace {

enum Stream : std::uint64_t { kInitStream = 1, kLearnerStream = 2, kActorStream = 3 };

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Sliding mean over the last `capacity` learner batches.
class WindowMean {
 public:
  explicit WindowMean(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  void push(double v) {
    values_.push_back(v);
    sum_ += v;
    if (values_.size() > capacity_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }
  double mean() const { return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size()); }

 private:
  std::size_t capacity_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

double actor_epsilon(const ExperimentConfig& config, int actor) {
  if (!config.epsilon_ladder || config.num_actors < 2) return config.epsilon;
  // Geometric ladder from epsilon down to epsilon^8 across actors.
  const double exponent = 1.0 + 7.0 * actor / (config.num_actors - 1);
  return std::pow(config.epsilon, exponent);
}

double mean_disdain(const Snapshot& snapshot, const Layout& layout) {
  return disdain_state_map(snapshot, layout).walkable_mean();
}

class Learner {
 public:
  Learner(const ExperimentConfig& config, const Layout& layout)
      : config_(config),
        snapshot_(initial_snapshot(config, layout)),
        replay_(static_cast<std::size_t>(config.replay_capacity)),
        visits_(layout.num_states()),
        rng_(make_stream(config.seed, kLearnerStream)),
        skill_window_(config.metric_window),
        bonus_window_(config.metric_window),
        params_{config.discount, config.trace_lambda, config.learning_rate, snapshot_.bonus.weight} {
    snapshot_.prior = SkillPrior{config.n_skills};
  }

  const Snapshot& snapshot() const { return snapshot_; }
  const VisitCounter& visits() const { return visits_; }

  void ingest(Unroll unroll) {
    visits_.record(unroll.terminal_state());
    if (config_.freeze_rewards) {
      const auto r = compute_rewards(snapshot_.ensemble, visits_, snapshot_.bonus, snapshot_.prior,
                                     unroll.terminal_state(), unroll.skill);
      unroll.r_skill = r.skill;
      unroll.r_bonus = r.bonus;
    }
    replay_.append(std::move(unroll));
  }

  void step() {
    const auto batch = replay_.sample(static_cast<std::size_t>(config_.batch_size), rng_);
    skill_rewards_.resize(batch.size());
    bonus_rewards_.resize(batch.size());
    pairs_.resize(batch.size());
    double skill_sum = 0.0;
    double bonus_sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Unroll& u = batch[i];
      TerminalRewards r{u.r_skill, u.r_bonus};
      if (!config_.freeze_rewards) {
        r = compute_rewards(snapshot_.ensemble, visits_, snapshot_.bonus, snapshot_.prior,
                            u.terminal_state(), u.skill);
      }
      skill_rewards_[i] = r.skill;
      bonus_rewards_[i] = r.bonus;
      pairs_[i] = {u.terminal_state(), u.skill};
      skill_sum += r.skill;
      bonus_sum += r.bonus;
    }
    train_q_batch(snapshot_.q, batch, skill_rewards_, bonus_rewards_, params_);
    snapshot_.ensemble.train(pairs_, config_.discriminator_learning_rate,
                             config_.discriminator_reduction);
    const double n = static_cast<double>(batch.size());
    skill_window_.push(skill_sum / n);
    bonus_window_.push(bonus_sum / n);
    ++snapshot_.learner_step;
  }

  MetricsRow metrics(double wall_time_s) const {
    MetricsRow row;
    row.learner_step = snapshot_.learner_step;
    row.mean_r_skill_bits = skill_window_.mean();
    row.n_skills = effective_skills(row.mean_r_skill_bits);
    row.mean_r_bonus = bonus_window_.mean();
    row.coverage = visits_.distinct();
    row.wall_time_s = wall_time_s;
    return row;
  }

 private:
  const ExperimentConfig& config_;
  Snapshot snapshot_;
  ReplayBuffer replay_;
  VisitCounter visits_;
  Rng rng_;
  WindowMean skill_window_;
  WindowMean bonus_window_;
  QLearningParams params_;
  std::vector<double> skill_rewards_;
  std::vector<double> bonus_rewards_;
  std::vector<std::pair<StateId, SkillId>> pairs_;
};

/// Rate-limited hand-off between actor threads and the learner. Actors may
/// run at most one learner step ahead of the configured insert ratio.
class ActorPool {
 public:
  ActorPool(const ExperimentConfig& config, const Layout& layout, const DualQTables& initial)
      : config_(config), layout_(layout), params_(std::make_shared<const DualQTables>(initial)) {
    allowed_ = config.unrolls_per_learner_step;
    for (int i = 0; i < config.num_actors; ++i) {
      threads_.emplace_back([this, i](std::stop_token stop) { act(i, stop); });
    }
  }

  ~ActorPool() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    for (auto& t : threads_) t.request_stop();
    cv_.notify_all();
  }

  void publish(const DualQTables& q) {
    auto fresh = std::make_shared<const DualQTables>(q);
    std::lock_guard lock(mutex_);
    params_ = std::move(fresh);
  }

  /// Blocks until `needed` unrolls in total have been produced, then hands
  /// over everything pending.
  std::vector<Unroll> collect(std::int64_t needed, std::int64_t next_allowance) {
    std::unique_lock lock(mutex_);
    allowed_ = std::max(allowed_, next_allowance);
    cv_.notify_all();
    cv_.wait(lock, [&] { return delivered_ + static_cast<std::int64_t>(pending_.size()) >= needed; });
    std::vector<Unroll> out;
    out.swap(pending_);
    delivered_ += static_cast<std::int64_t>(out.size());
    return out;
  }

 private:
  void act(int index, std::stop_token stop) {
    Rng rng = make_stream(config_.seed, kActorStream + static_cast<std::uint64_t>(index));
    const double epsilon = actor_epsilon(config_, index);
    const SkillPrior prior{config_.n_skills};
    const double weight = config_.bonus().weight;
    while (!stop.stop_requested()) {
      std::shared_ptr<const DualQTables> params;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return stopping_ || claimed_ < allowed_; });
        if (stopping_) return;
        ++claimed_;
        params = params_;
      }
      const SkillId z = sample_skill(prior, rng);
      Unroll u = rollout(layout_, *params, weight, z, config_.trajectory_length, epsilon, rng);
      {
        std::lock_guard lock(mutex_);
        pending_.push_back(std::move(u));
      }
      cv_.notify_all();
    }
  }

  const ExperimentConfig& config_;
  const Layout& layout_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::shared_ptr<const DualQTables> params_;
  std::vector<Unroll> pending_;
  std::int64_t claimed_ = 0;
  std::int64_t allowed_ = 0;
  std::int64_t delivered_ = 0;
  bool stopping_ = false;
  std::vector<std::jthread> threads_;
};

}  // namespace

HeatmapGrid HeatmapGrid::zeros(const Layout& layout) {
  HeatmapGrid grid;
  grid.rows = layout.rows();
  grid.cols = layout.cols();
  grid.values.assign(static_cast<std::size_t>(grid.rows * grid.cols), kWall);
  for (StateId s = 0; s < layout.num_states(); ++s) grid.at(layout.cell_of(s)) = 0.0;
  return grid;
}

double HeatmapGrid::walkable_sum() const {
  double sum = 0.0;
  for (double v : values) {
    if (v != kWall) sum += v;
  }
  return sum;
}

double HeatmapGrid::walkable_mean() const {
  const auto n = std::count_if(values.begin(), values.end(), [](double v) { return v != kWall; });
  return n == 0 ? 0.0 : walkable_sum() / static_cast<double>(n);
}

int HeatmapGrid::nonzero_cells() const {
  return static_cast<int>(
      std::count_if(values.begin(), values.end(), [](double v) { return v != kWall && v > 0.0; }));
}

TerminalRewards compute_rewards(const Ensemble& ensemble, const VisitCounter& visits,
                                const BonusConfig& bonus, const SkillPrior& prior,
                                StateId terminal, SkillId z) {
  TerminalRewards r;
  switch (bonus.kind) {
    case BonusKind::kNone:
    case BonusKind::kEnsembleOnly:
      r.skill = skill_reward(ensemble.mean(terminal), z, prior);
      break;
    case BonusKind::kCount:
      r.skill = skill_reward(ensemble.mean(terminal), z, prior);
      r.bonus = count_bonus(visits, terminal);
      break;
    case BonusKind::kDisdain: {
      Distribution mean(static_cast<std::size_t>(ensemble.n_skills()));
      r.bonus = ensemble.disagreement(terminal, mean);
      r.skill = skill_reward(mean, z, prior);
      break;
    }
  }
  return r;
}

Unroll rollout(const Layout& layout, const DualQTables& q, double bonus_weight, SkillId z,
               int length, double epsilon, Rng& rng) {
  Unroll u;
  u.skill = z;
  u.terminal = true;
  u.states.reserve(static_cast<std::size_t>(length) + 1);
  u.actions.reserve(static_cast<std::size_t>(length));
  EpisodeState state = reset(layout);
  u.states.push_back(state.position);
  for (bool done = false; !done;) {
    const Action a = epsilon_greedy(q, state.position, z, bonus_weight, epsilon, rng);
    const auto result = step(layout, state, a, length);
    state = result.state;
    done = result.done;
    u.actions.push_back(a);
    u.states.push_back(state.position);
  }
  return u;
}

EvalResult evaluate_skills(const Snapshot& snapshot, const Layout& layout) {
  EvalResult eval;
  eval.terminal_counts = HeatmapGrid::zeros(layout);
  Rng unused(0);
  double reward_sum = 0.0;
  for (SkillId z = 0; z < snapshot.prior.n_skills; ++z) {
    const Unroll u = rollout(layout, snapshot.q, snapshot.bonus.weight, z,
                             snapshot.trajectory_length, 0.0, unused);
    const StateId end = u.terminal_state();
    eval.terminal_per_skill.push_back(end);
    eval.terminal_counts.at(layout.cell_of(end)) += 1.0;
    reward_sum += skill_reward(snapshot.ensemble.mean(end), z, snapshot.prior);
  }
  eval.mean_reward_bits = reward_sum / snapshot.prior.n_skills;
  eval.n_skills = effective_skills(eval.mean_reward_bits);
  eval.coverage = eval.terminal_counts.nonzero_cells();
  return eval;
}

HeatmapGrid disdain_state_map(const Snapshot& snapshot, const Layout& layout) {
  if (snapshot.ensemble.size() < 2) {
    throw std::invalid_argument("DISDAIN map needs an ensemble of at least two members");
  }
  HeatmapGrid grid = HeatmapGrid::zeros(layout);
  Distribution mean(static_cast<std::size_t>(snapshot.prior.n_skills));
  for (StateId s = 0; s < layout.num_states(); ++s) {
    grid.at(layout.cell_of(s)) = snapshot.ensemble.disagreement(s, mean);
  }
  return grid;
}

Layout layout_for(const ExperimentConfig& config) {
  if (config.map_path.empty()) return four_rooms();
  std::ifstream in(config.map_path);
  if (!in) throw std::runtime_error("cannot open map file " + config.map_path);
  std::ostringstream text;
  text << in.rdbuf();
  return load_layout(text.str(), LayoutRequirements{-1, config.trajectory_length, -1});
}

Snapshot initial_snapshot(const ExperimentConfig& config, const Layout& layout) {
  Snapshot s;
  s.bonus = config.bonus();
  s.prior = SkillPrior{config.n_skills};
  s.trajectory_length = config.trajectory_length;
  s.q = DualQTables(layout.num_states(), config.n_skills);
  Rng init = make_stream(config.seed, kInitStream);
  s.ensemble = Ensemble::random(s.bonus.ensemble_size, layout.num_states(), config.n_skills,
                                config.logit_init_scale, init);
  if (config.q_init_scale > 0.0) {
    std::uniform_real_distribution<double> u(-config.q_init_scale, config.q_init_scale);
    for (double& x : s.q.skill.raw()) x = u(init);
  }
  return s;
}

RunResult run_training(const ExperimentConfig& config, const Layout& layout,
                       const ProgressCallback& progress) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  RunResult result;
  result.config = config;
  Learner learner(config, layout);
  const bool track_disdain = learner.snapshot().ensemble.size() >= 2;
  const std::int64_t cadence = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(static_cast<double>(config.steps) * config.checkpoint_fraction)));

  const auto checkpoint = [&] {
    Checkpoint c;
    c.learner_step = learner.snapshot().learner_step;
    c.snapshot = learner.snapshot();
    c.eval = evaluate_skills(c.snapshot, layout);
    if (track_disdain) c.disdain_map = disdain_state_map(c.snapshot, layout);
    result.checkpoints.push_back(std::move(c));
  };
  checkpoint();

  DualQTables acting = learner.snapshot().q;
  Rng actor_rng = make_stream(config.seed, kActorStream);
  std::unique_ptr<ActorPool> pool;
  if (!config.serial) pool = std::make_unique<ActorPool>(config, layout, acting);

  const double weight = learner.snapshot().bonus.weight;
  const SkillPrior prior{config.n_skills};
  const std::int64_t ratio = config.unrolls_per_learner_step;
  std::int64_t serial_unrolls = 0;

  for (std::int64_t step = 1; step <= config.steps; ++step) {
    if (pool) {
      for (auto& u : pool->collect(step * ratio, (step + 1) * ratio)) learner.ingest(std::move(u));
    } else {
      for (std::int64_t k = 0; k < ratio; ++k) {
        // The single serial actor cycles through the per-actor epsilons.
        const double epsilon = actor_epsilon(config, static_cast<int>(serial_unrolls++ % config.num_actors));
        const SkillId z = sample_skill(prior, actor_rng);
        learner.ingest(rollout(layout, acting, weight, z, config.trajectory_length, epsilon,
                               actor_rng));
      }
    }

    learner.step();

    if (step % config.actor_update_period == 0) {
      if (pool) {
        pool->publish(learner.snapshot().q);
      } else {
        acting = learner.snapshot().q;
      }
    }
    if (step % config.log_every == 0 || step == config.steps) {
      result.rows.push_back(learner.metrics(config.serial ? 0.0 : elapsed()));
      if (track_disdain) {
        result.disdain_trace.push_back({step, mean_disdain(learner.snapshot(), layout)});
      }
      if (progress) progress(result.rows.back());
    }
    if (step % cadence == 0 || step == config.steps) {
      if (result.checkpoints.back().learner_step != step) checkpoint();
    }
  }
  pool.reset();

  result.final_snapshot = learner.snapshot();
  result.final_eval = result.checkpoints.back().eval;
  result.visits = learner.visits();
  result.wall_time_s = elapsed();
  return result;
}

}  // namespace disdain
