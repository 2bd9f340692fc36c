#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "streammem/replay_buffer.hpp"
#include "streammem/stream_sim.hpp"

namespace streammem {

/// Raised on malformed or out-of-range configuration; the message names the
/// offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

/// Fully-resolved experiment description. Serialized into every run directory
/// so a run can be reproduced from its own artifacts.
struct ExperimentConfig {
  int version = 1;
  Strategy strategy = Strategy::kLinear;
  int memory_size = 128;         // N
  int sampling_rate = 100;       // S, mini-batches per arrival
  double protect_fraction = 0.0; // K, Selective only
  int batch_size = 8;
  std::uint64_t seed = 1;
  int eval_interval = 50;        // arrivals between metrics records
  int eval_samples_per_source = 32;
  GridSpec grid;
  int n_classes = 6;
  int embed_dim = 8;
  double learning_rate = 0.5;
  double ema_momentum = 0.9;
  std::vector<SourceSpec> sources;
  std::filesystem::path output_dir;
  bool dump_stream = false;

  SamplingSchedule schedule() const { return {sampling_rate, batch_size}; }
};

/// Parses a config JSON document. Unknown keys are hard errors so sweep typos
/// cannot pass silently. Does not validate ranges; see validate_config.
ExperimentConfig config_from_json_text(const std::string& text);

/// Canonical JSON form of a config (stable key order, suitable for byte
/// comparison between runs).
std::string config_to_json_text(const ExperimentConfig& config);

/// Range and consistency checks; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

/// Reads, parses, and validates a config file.
ExperimentConfig load_config(const std::filesystem::path& path);

void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

/// True when two configs would generate identical streams (same grid, classes,
/// and source specs); strategy and seed may differ.
bool same_stream_setup(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace streammem
