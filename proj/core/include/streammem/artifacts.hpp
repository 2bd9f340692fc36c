#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "streammem/config.hpp"
#include "streammem/metrics.hpp"
#include "streammem/runner.hpp"

namespace streammem {

/// One metrics record as a single JSON line (schema-versioned, stable key
/// order) and back. The newline is the caller's business.
std::string format_metrics_record(const MetricsRecord& record);
MetricsRecord parse_metrics_record(const std::string& line);

/// Writes a completed run into `dir` (created if needed, files overwritten):
///
///   config.json         fully-resolved experiment config
///   metrics.jsonl       one record per evaluation interval
///   evictions.log       arrival / inserted id / evicted id per overflow
///   snapshot_source_<d>.txt   buffer state when source d's segment ended
///   snapshot_final.txt  buffer state at stream end
///   summary.json        headline numbers (machine-readable)
///   summary.txt         final per-source / per-class Dice table
///   stream.txt          full stream dump, only when config.dump_stream
///
/// Re-running the same config yields byte-identical files.
void write_run_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

/// A persisted run read back for comparison.
struct RunArtifacts {
  std::filesystem::path dir;
  ExperimentConfig config;
  std::vector<MetricsRecord> records;
  std::vector<EvictionEvent> evictions;
  BufferSnapshot final_buffer;
  double final_average_dice = 0.0;
  std::int64_t samples_seen = 0;
};

/// Loads config.json, metrics.jsonl, evictions.log, snapshot_final.txt, and
/// summary.json from a run directory. Throws std::runtime_error naming the
/// missing or malformed file.
RunArtifacts load_run_dir(const std::filesystem::path& dir);

/// Last arrival index of each source's stream segment, from the configured
/// source order and sample counts.
std::map<int, std::int64_t> segment_ends(const ExperimentConfig& config);

/// Forgetting drop per source at the final record: peak Dice within the
/// source's own segment versus its final Dice.
std::map<int, double> final_forgetting_drops(const ExperimentConfig& config,
                                             const std::vector<MetricsRecord>& records);

/// Mean of final_forgetting_drops over every source except the one streamed
/// last (the last source has seen no later data to forget under).
double mean_forgetting_drop(const ExperimentConfig& config,
                            const std::vector<MetricsRecord>& records);

/// Side-by-side report over completed runs: per-class final Dice table ordered
/// by average Dice, forgetting drops, and the composition-entropy series.
struct ComparisonReport {
  bool seed_mismatch = false;  // runs used different seeds; comparison still valid
  std::string text;
  std::string machine_json;
};

/// Throws std::invalid_argument on fewer than two runs or mismatched stream
/// setups (different grids, classes, or source specs).
ComparisonReport compare_runs(const std::vector<RunArtifacts>& runs);

}  // namespace streammem
