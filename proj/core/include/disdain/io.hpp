#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "disdain/training.hpp"

namespace disdain {

inline constexpr std::string_view kMetricsHeader =
    "learner_step,mean_r_skill_bits,n_skills,mean_r_bonus,coverage,wall_time_s";

/// Header plus one line per row. Reals use round-trip precision.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
void emit_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);

/// One line per grid row, comma separated; walls print as -1.
void write_heatmap(std::ostream& out, const HeatmapGrid& grid);
void emit_heatmap(const std::filesystem::path& path, const HeatmapGrid& grid);
HeatmapGrid read_heatmap(const std::filesystem::path& path);

/// Binary (CBOR) snapshot together with the map it was trained on.
void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot,
                   const Layout& layout);
struct LoadedSnapshot {
  Snapshot snapshot;
  Layout layout;
};
LoadedSnapshot load_snapshot(const std::filesystem::path& path);

/// Writes metrics.csv, manifest.txt, checkpoint heatmaps, the final snapshot
/// and eval summary into `dir` (created if missing). Throws
/// std::runtime_error on I/O failure.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result,
                       const Layout& layout);

/// Heatmaps and a one-line summary for a snapshot evaluation.
void write_eval_outputs(const std::filesystem::path& dir, const Snapshot& snapshot,
                        const Layout& layout);

}  // namespace disdain
