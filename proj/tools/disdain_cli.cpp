// Command-line front end: train one condition, evaluate a snapshot, or sweep
// conditions x seeds for the full Four Rooms comparison.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "disdain/config.hpp"
#include "disdain/io.hpp"
#include "disdain/training.hpp"

namespace fs = std::filesystem;
using namespace disdain;

namespace {

struct RunOptions {
  std::string condition;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::string config_path;
  std::string out_dir;
  std::string map_path;
  bool serial = false;
  bool quiet = false;
  std::vector<std::string> overrides;
};

ExperimentConfig resolve_config(const RunOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
  if (!opts.condition.empty()) cfg.condition = parse_bonus_kind(opts.condition);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.steps) cfg.steps = *opts.steps;
  if (!opts.map_path.empty()) cfg.map_path = opts.map_path;
  if (opts.serial) cfg.serial = true;
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void print_row(const MetricsRow& r) {
  std::printf("step %9lld  r_skill %.3f bits  n_skills %6.2f  r_bonus %.4f  coverage %3d\n",
              static_cast<long long>(r.learner_step), r.mean_r_skill_bits, r.n_skills,
              r.mean_r_bonus, r.coverage);
  std::fflush(stdout);
}

RunResult train_and_write(const ExperimentConfig& cfg, const fs::path& out, bool quiet) {
  const Layout layout = layout_for(cfg);
  ProgressCallback progress;
  if (!quiet) {
    const std::int64_t every = std::max<std::int64_t>(cfg.log_every, cfg.steps / 20);
    progress = [every](const MetricsRow& r) {
      if (r.learner_step % every == 0) print_row(r);
    };
  }
  RunResult result = run_training(cfg, layout, progress);
  write_run_outputs(out, result, layout);
  return result;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(part));
    } else {
      const auto lo = std::stoull(part.substr(0, dash));
      const auto hi = std::stoull(part.substr(dash + 1));
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  return seeds;
}

double top_k_mean(std::vector<double> v, std::size_t k) {
  std::sort(v.rbegin(), v.rend());
  k = std::min(k, v.size());
  if (k == 0) return 0.0;
  return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
         static_cast<double>(k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill discovery with ensemble-disagreement exploration in Four Rooms"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Train one condition and write metrics, heatmaps and a snapshot");
  run->add_option("--condition", run_opts.condition, "none | count | disdain | ensemble-only");
  run->add_option("--seed", run_opts.seed, "Random seed");
  run->add_option("--steps", run_opts.steps, "Learner steps");
  run->add_option("--config", run_opts.config_path, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--out", run_opts.out_dir, "Output directory")->required();
  run->add_option("--map", run_opts.map_path, "ASCII map file")->check(CLI::ExistingFile);
  run->add_flag("--serial", run_opts.serial, "Single interleaved actor (deterministic)");
  run->add_option("--set", run_opts.overrides, "Extra key=value overrides");
  run->add_flag("--quiet", run_opts.quiet, "No progress output");

  std::string snapshot_path, eval_out;
  auto* eval = app.add_subcommand("eval", "Greedy one-rollout-per-skill evaluation of a snapshot");
  eval->add_option("--snapshot", snapshot_path, "Snapshot file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Output directory")->required();

  RunOptions sweep_opts;
  std::vector<std::string> conditions{"none", "count", "disdain", "ensemble-only"};
  std::string seed_spec = "0-9";
  auto* sweep = app.add_subcommand("sweep", "Run conditions x seeds and summarize final skill counts");
  sweep->add_option("--conditions", conditions, "Conditions to run")->delimiter(',');
  sweep->add_option("--seeds", seed_spec, "Seeds, e.g. 0-9 or 1,3,5");
  sweep->add_option("--steps", sweep_opts.steps, "Learner steps per run");
  sweep->add_option("--config", sweep_opts.config_path, "key = value config file")->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_opts.out_dir, "Output directory")->required();
  sweep->add_option("--map", sweep_opts.map_path, "ASCII map file")->check(CLI::ExistingFile);
  sweep->add_option("--set", sweep_opts.overrides, "Extra key=value overrides");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig cfg = resolve_config(run_opts);
      const RunResult result = train_and_write(cfg, run_opts.out_dir, run_opts.quiet);
      std::printf("final n_skills %.2f (window), eval n_skills %.2f, eval coverage %d, %.1fs\n",
                  result.rows.back().n_skills, result.final_eval.n_skills,
                  result.final_eval.coverage, result.wall_time_s);
    } else if (*eval) {
      const auto loaded = load_snapshot(snapshot_path);
      write_eval_outputs(eval_out, loaded.snapshot, loaded.layout);
      const auto e = evaluate_skills(loaded.snapshot, loaded.layout);
      std::printf("eval n_skills %.2f, coverage %d\n", e.n_skills, e.coverage);
    } else if (*sweep) {
      const fs::path out = sweep_opts.out_dir;
      fs::create_directories(out);
      std::ofstream summary(out / "summary.csv");
      summary << "condition,seed,final_n_skills,eval_n_skills,eval_coverage,wall_time_s\n";
      for (const auto& name : conditions) {
        std::vector<double> finals;
        for (const auto seed : parse_seeds(seed_spec)) {
          RunOptions opts = sweep_opts;
          opts.condition = name;
          opts.seed = seed;
          const ExperimentConfig cfg = resolve_config(opts);
          const auto dir = out / name / ("seed_" + std::to_string(seed));
          const RunResult r = train_and_write(cfg, dir, true);
          finals.push_back(r.rows.back().n_skills);
          summary << name << ',' << seed << ',' << r.rows.back().n_skills << ','
                  << r.final_eval.n_skills << ',' << r.final_eval.coverage << ',' << r.wall_time_s
                  << '\n'
                  << std::flush;
          std::printf("%-14s seed %3llu  n_skills %6.2f  eval %6.2f  coverage %3d\n", name.c_str(),
                      static_cast<unsigned long long>(seed), r.rows.back().n_skills,
                      r.final_eval.n_skills, r.final_eval.coverage);
          std::fflush(stdout);
        }
        std::printf("%-14s top-5 mean n_skills %.2f\n", name.c_str(), top_k_mean(finals, 5));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
