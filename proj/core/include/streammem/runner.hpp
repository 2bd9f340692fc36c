#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "streammem/config.hpp"
#include "streammem/metrics.hpp"
#include "streammem/replay_buffer.hpp"
#include "streammem/sample.hpp"
#include "streammem/snapshot.hpp"

namespace streammem {

/// Pull-once sample source. The experiment loop calls next() exactly once per
/// arrival and never revisits a sample afterwards except through buffer
/// entries — the single-pass contract.
class StreamFeed {
 public:
  virtual ~StreamFeed() = default;

  /// The next stream sample, or absent at end of stream.
  virtual std::optional<Sample> next() = 0;
};

/// Feed over a pre-generated stream; hands each sample out by move.
class VectorFeed : public StreamFeed {
 public:
  explicit VectorFeed(std::vector<Sample> samples) : samples_(std::move(samples)) {}

  std::optional<Sample> next() override {
    if (cursor_ >= samples_.size()) return std::nullopt;
    return std::move(samples_[cursor_++]);
  }

 private:
  std::vector<Sample> samples_;
  std::size_t cursor_ = 0;
};

/// One buffer overflow resolution. evicted_id == inserted_id means the
/// incoming sample was rejected outright.
struct EvictionEvent {
  std::int64_t arrival_index = -1;
  std::int64_t inserted_id = -1;
  std::int64_t evicted_id = -1;
};

/// Buffer state captured at the end of one source's stream segment.
struct BoundarySnapshot {
  int source_id = -1;
  std::int64_t arrival_index = -1;  // last arrival of the segment
  BufferSnapshot buffer;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MetricsRecord> records;
  std::vector<EvictionEvent> evictions;
  std::vector<BoundarySnapshot> boundary_snapshots;  // one per source, in stream order
  BufferSnapshot final_buffer;
  double final_average_dice = 0.0;
  std::int64_t samples_seen = 0;
  std::vector<Sample> stream_copy;  // populated only when config.dump_stream
};

/// Called after each metrics record with the live buffer, before the run moves
/// on. Intended for assertions and probes in tests; keep it cheap.
using RecordObserver = std::function<void(const MetricsRecord&, const ReplayBuffer&)>;

/// Generates the stream described by the config and runs the online loop:
/// per arrival embed + score the sample, insert it by strategy, then draw
/// `sampling_rate` mini-batches from the buffer and train on them. Metrics are
/// recorded every eval_interval arrivals and at stream end; buffer snapshots
/// are captured at every source boundary.
ExperimentResult run_experiment(const ExperimentConfig& config, const RecordObserver& observer = {});

/// Same loop over an externally supplied feed. Held-out evaluation sets are
/// still generated from config.sources.
ExperimentResult run_experiment_with_feed(const ExperimentConfig& config, StreamFeed& feed,
                                          const RecordObserver& observer = {});

}  // namespace streammem
