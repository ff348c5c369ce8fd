#include "disdain/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace disdain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void check_stream(const std::ostream& out, const fs::path& path) {
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.learner_step << ',' << format_real(r.mean_r_skill_bits) << ','
        << format_real(r.n_skills) << ',' << format_real(r.mean_r_bonus) << ',' << r.coverage
        << ',' << format_real(r.wall_time_s) << '\n';
  }
}

void emit_metrics_csv(const fs::path& path, std::span<const MetricsRow> rows) {
  if (rows.empty()) throw std::invalid_argument("no metrics rows to write");
  auto out = open_for_write(path);
  write_metrics_csv(out, rows);
  check_stream(out, path);
}

void write_heatmap(std::ostream& out, const HeatmapGrid& grid) {
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c > 0) out << ',';
      const double v = grid.at({r, c});
      if (v == HeatmapGrid::kWall) {
        out << "-1";
      } else {
        out << format_real(v);
      }
    }
    out << '\n';
  }
}

void emit_heatmap(const fs::path& path, const HeatmapGrid& grid) {
  if (grid.values.empty()) throw std::invalid_argument("empty heatmap");
  auto out = open_for_write(path);
  write_heatmap(out, grid);
  check_stream(out, path);
}

HeatmapGrid read_heatmap(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  HeatmapGrid grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string cell;
    int cols = 0;
    while (std::getline(cells, cell, ',')) {
      grid.values.push_back(std::stod(cell));
      ++cols;
    }
    if (grid.rows == 0) grid.cols = cols;
    if (cols != grid.cols) throw std::runtime_error("ragged heatmap " + path.string());
    ++grid.rows;
  }
  return grid;
}

void save_snapshot(const fs::path& path, const Snapshot& snapshot, const Layout& layout) {
  json j;
  j["version"] = kSnapshotVersion;
  j["map"] = layout.to_text();
  j["n_skills"] = snapshot.prior.n_skills;
  j["trajectory_length"] = snapshot.trajectory_length;
  j["learner_step"] = snapshot.learner_step;
  j["bonus_kind"] = std::string(bonus_kind_name(snapshot.bonus.kind));
  j["bonus_weight"] = snapshot.bonus.weight;
  j["q_skill"] = snapshot.q.skill.raw();
  j["q_bonus"] = snapshot.q.bonus.raw();
  json members = json::array();
  for (int i = 0; i < snapshot.ensemble.size(); ++i) members.push_back(snapshot.ensemble.member(i).raw());
  j["ensemble"] = std::move(members);

  const auto bytes = json::to_cbor(j);
  auto out = open_for_write(path, std::ios::out | std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  check_stream(out, path);
}

namespace {

LoadedSnapshot decode_snapshot(const json& j) {
  Layout layout = load_layout(j.at("map").get<std::string>(), LayoutRequirements::structural_only());
  Snapshot s;
  s.prior = SkillPrior{j.at("n_skills").get<int>()};
  s.trajectory_length = j.at("trajectory_length").get<int>();
  s.learner_step = j.at("learner_step").get<std::int64_t>();
  const auto members = j.at("ensemble");
  s.bonus.kind = parse_bonus_kind(j.at("bonus_kind").get<std::string>());
  s.bonus.weight = j.at("bonus_weight").get<double>();
  s.bonus.ensemble_size = static_cast<int>(members.size());

  s.q = DualQTables(layout.num_states(), s.prior.n_skills);
  s.q.skill.raw() = j.at("q_skill").get<std::vector<double>>();
  s.q.bonus.raw() = j.at("q_bonus").get<std::vector<double>>();
  std::vector<TabularDiscriminator> discs;
  for (const auto& m : members) {
    TabularDiscriminator d(layout.num_states(), s.prior.n_skills);
    d.raw() = m.get<std::vector<double>>();
    if (d.raw().size() != static_cast<std::size_t>(layout.num_states() * s.prior.n_skills)) {
      throw std::runtime_error("snapshot discriminator has the wrong shape");
    }
    discs.push_back(std::move(d));
  }
  s.ensemble = Ensemble(std::move(discs));
  const auto q_size = static_cast<std::size_t>(layout.num_states()) *
                      static_cast<std::size_t>(s.prior.n_skills) * kNumActions;
  if (s.q.skill.raw().size() != q_size || s.q.bonus.raw().size() != q_size) {
    throw std::runtime_error("snapshot Q tables have the wrong shape");
  }
  return {std::move(s), std::move(layout)};
}

}  // namespace

LoadedSnapshot load_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::from_cbor(bytes);
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt snapshot " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("version", 0) != kSnapshotVersion) {
    throw std::runtime_error("not a snapshot, or unsupported version: " + path.string());
  }
  try {
    return decode_snapshot(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed snapshot " + path.string() + ": " + e.what());
  }
}

void write_eval_outputs(const fs::path& dir, const Snapshot& snapshot, const Layout& layout) {
  ensure_dir(dir);
  const EvalResult eval = evaluate_skills(snapshot, layout);
  emit_heatmap(dir / "terminal_counts.csv", eval.terminal_counts);
  if (snapshot.ensemble.size() >= 2) {
    emit_heatmap(dir / "disdain_map.csv", disdain_state_map(snapshot, layout));
  }
  auto out = open_for_write(dir / "eval.csv");
  out << "learner_step,mean_r_skill_bits,n_skills,coverage\n"
      << snapshot.learner_step << ',' << format_real(eval.mean_reward_bits) << ','
      << format_real(eval.n_skills) << ',' << eval.coverage << '\n';
  check_stream(out, dir / "eval.csv");
}

void write_run_outputs(const fs::path& dir, const RunResult& result, const Layout& layout) {
  ensure_dir(dir);
  emit_metrics_csv(dir / "metrics.csv", result.rows);

  {
    auto out = open_for_write(dir / "manifest.txt");
    out << "# resolved configuration; loadable with --config\n" << result.config.to_text();
    out << "# layout_states = " << layout.num_states() << '\n'
        << "# wall_time_s = " << format_real(result.wall_time_s) << '\n';
    check_stream(out, dir / "manifest.txt");
  }

  if (!result.disdain_trace.empty()) {
    auto out = open_for_write(dir / "disdain_trace.csv");
    out << "learner_step,mean_disdain_bits\n";
    for (const auto& p : result.disdain_trace) {
      out << p.learner_step << ',' << format_real(p.mean_disdain) << '\n';
    }
    check_stream(out, dir / "disdain_trace.csv");
  }

  const fs::path heatmaps = dir / "heatmaps";
  ensure_dir(heatmaps);
  {
    auto out = open_for_write(dir / "checkpoints.csv");
    out << "learner_step,eval_mean_r_skill_bits,eval_n_skills,eval_coverage\n";
    for (const auto& c : result.checkpoints) {
      const std::string tag = "step_" + std::to_string(c.learner_step);
      emit_heatmap(heatmaps / ("terminal_counts_" + tag + ".csv"), c.eval.terminal_counts);
      if (!c.disdain_map.values.empty()) {
        emit_heatmap(heatmaps / ("disdain_map_" + tag + ".csv"), c.disdain_map);
      }
      out << c.learner_step << ',' << format_real(c.eval.mean_reward_bits) << ','
          << format_real(c.eval.n_skills) << ',' << c.eval.coverage << '\n';
    }
    check_stream(out, dir / "checkpoints.csv");
  }

  save_snapshot(dir / "snapshot.cbor", result.final_snapshot, layout);
}

}  // namespace disdain
