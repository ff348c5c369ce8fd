#include "disdain/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace disdain {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument("invalid value '" + std::string(value) + "' for '" +
                              std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

BatchReduction parse_reduction(std::string_view key, std::string_view value) {
  if (value == "per-example") return BatchReduction::kPerExample;
  if (value == "mean") return BatchReduction::kMean;
  bad_value(key, value);
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + what);
}

}  // namespace

std::string_view reduction_name(BatchReduction r) {
  return r == BatchReduction::kMean ? "mean" : "per-example";
}

void ExperimentConfig::validate() const {
  require(steps >= 1, "steps must be >= 1");
  require(n_skills >= 1, "n_skills must be >= 1");
  require(trajectory_length >= 1, "trajectory_length must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(replay_capacity >= 1, "replay_capacity must be >= 1");
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
  require(discriminator_learning_rate >= 0.0, "discriminator_learning_rate must be >= 0");
  require(discount >= 0.0 && discount < 1.0, "discount must be in [0, 1)");
  require(trace_lambda >= 0.0 && trace_lambda <= 1.0, "trace_lambda must be in [0, 1]");
  require(num_actors >= 1, "num_actors must be >= 1");
  require(actor_update_period >= 1, "actor_update_period must be >= 1");
  require(ensemble_size >= 1, "ensemble_size must be >= 1");
  require(disdain_weight >= 0.0, "disdain_weight must be >= 0");
  require(count_weight >= 0.0, "count_weight must be >= 0");
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must be in [0, 1]");
  require(logit_init_scale >= 0.0, "logit_init_scale must be >= 0");
  require(q_init_scale >= 0.0, "q_init_scale must be >= 0");
  require(metric_window >= 1, "metric_window must be >= 1");
  require(log_every >= 1, "log_every must be >= 1");
  require(checkpoint_fraction > 0.0 && checkpoint_fraction <= 1.0,
          "checkpoint_fraction must be in (0, 1]");
  require(unrolls_per_learner_step >= 1, "unrolls_per_learner_step must be >= 1");
  bonus().validate();
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "condition") {
    try {
      condition = parse_bonus_kind(value);
    } catch (const std::invalid_argument&) {
      bad_value(key, value);
    }
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "steps") {
    steps = parse_number<std::int64_t>(key, value);
  } else if (key == "n_skills") {
    n_skills = parse_number<int>(key, value);
  } else if (key == "trajectory_length") {
    trajectory_length = parse_number<int>(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_number<int>(key, value);
  } else if (key == "replay_capacity") {
    replay_capacity = parse_number<std::int64_t>(key, value);
  } else if (key == "learning_rate") {
    learning_rate = parse_number<double>(key, value);
  } else if (key == "discriminator_learning_rate") {
    discriminator_learning_rate = parse_number<double>(key, value);
  } else if (key == "discount") {
    discount = parse_number<double>(key, value);
  } else if (key == "trace_lambda") {
    trace_lambda = parse_number<double>(key, value);
  } else if (key == "num_actors") {
    num_actors = parse_number<int>(key, value);
  } else if (key == "actor_update_period") {
    actor_update_period = parse_number<int>(key, value);
  } else if (key == "ensemble_size") {
    ensemble_size = parse_number<int>(key, value);
  } else if (key == "disdain_weight") {
    disdain_weight = parse_number<double>(key, value);
  } else if (key == "count_weight") {
    count_weight = parse_number<double>(key, value);
  } else if (key == "epsilon") {
    epsilon = parse_number<double>(key, value);
  } else if (key == "epsilon_ladder") {
    epsilon_ladder = parse_bool(key, value);
  } else if (key == "logit_init_scale") {
    logit_init_scale = parse_number<double>(key, value);
  } else if (key == "q_init_scale") {
    q_init_scale = parse_number<double>(key, value);
  } else if (key == "metric_window") {
    metric_window = parse_number<int>(key, value);
  } else if (key == "map_path") {
    map_path = std::string(value);
  } else if (key == "log_every") {
    log_every = parse_number<int>(key, value);
  } else if (key == "checkpoint_fraction") {
    checkpoint_fraction = parse_number<double>(key, value);
  } else if (key == "unrolls_per_learner_step") {
    unrolls_per_learner_step = parse_number<int>(key, value);
  } else if (key == "serial") {
    serial = parse_bool(key, value);
  } else if (key == "freeze_rewards") {
    freeze_rewards = parse_bool(key, value);
  } else if (key == "discriminator_reduction") {
    discriminator_reduction = parse_reduction(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

namespace {

/// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "condition = " << bonus_kind_name(condition) << '\n'
      << "seed = " << seed << '\n'
      << "steps = " << steps << '\n'
      << "n_skills = " << n_skills << '\n'
      << "trajectory_length = " << trajectory_length << '\n'
      << "batch_size = " << batch_size << '\n'
      << "replay_capacity = " << replay_capacity << '\n'
      << "learning_rate = " << shortest(learning_rate) << '\n'
      << "discriminator_learning_rate = " << shortest(discriminator_learning_rate) << '\n'
      << "discount = " << shortest(discount) << '\n'
      << "trace_lambda = " << shortest(trace_lambda) << '\n'
      << "num_actors = " << num_actors << '\n'
      << "actor_update_period = " << actor_update_period << '\n'
      << "ensemble_size = " << ensemble_size << '\n'
      << "disdain_weight = " << shortest(disdain_weight) << '\n'
      << "count_weight = " << shortest(count_weight) << '\n'
      << "epsilon = " << shortest(epsilon) << '\n'
      << "epsilon_ladder = " << (epsilon_ladder ? "true" : "false") << '\n'
      << "logit_init_scale = " << shortest(logit_init_scale) << '\n'
      << "q_init_scale = " << shortest(q_init_scale) << '\n'
      << "metric_window = " << metric_window << '\n'
      << "map_path = " << map_path << '\n'
      << "log_every = " << log_every << '\n'
      << "checkpoint_fraction = " << shortest(checkpoint_fraction) << '\n'
      << "unrolls_per_learner_step = " << unrolls_per_learner_step << '\n'
      << "serial = " << (serial ? "true" : "false") << '\n'
      << "freeze_rewards = " << (freeze_rewards ? "true" : "false") << '\n'
      << "discriminator_reduction = " << reduction_name(discriminator_reduction) << '\n';
  return out.str();
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace disdain
