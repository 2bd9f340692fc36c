#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "streammem/replay_buffer.hpp"
#include "streammem/sample.hpp"

namespace streammem {

/// Persistable view of a replay buffer: entry metadata without the feature and
/// label payloads. Line format, all reals printed with nine fractional digits:
///
///   # streammem-buffer v1 strategy=<s> capacity=<N> protect_fraction=<K> edim=<E>
///   <id> <source_id> <arrival_index> <uncertainty or -> <e_0> ... <e_{E-1}>
///
/// Saving a parsed snapshot reproduces the file byte for byte.
struct BufferSnapshot {
  struct Entry {
    std::int64_t id = -1;
    int source_id = -1;
    std::int64_t arrival_index = -1;
    std::optional<double> uncertainty;
    std::vector<double> embedding;
  };

  int schema_version = 1;
  Strategy strategy = Strategy::kLinear;
  std::size_t capacity = 0;
  double protect_fraction = 0.0;
  std::vector<Entry> entries;
};

BufferSnapshot snapshot_of(const ReplayBuffer& buffer);

std::string format_buffer_snapshot(const BufferSnapshot& snapshot);
BufferSnapshot parse_buffer_snapshot(const std::string& text);

void save_buffer_snapshot(const BufferSnapshot& snapshot, const std::filesystem::path& path);
BufferSnapshot load_buffer_snapshot(const std::filesystem::path& path);

/// Full stream dump: the snapshot schema per line plus feature and label
/// payloads, with grid dimensions and the global class count in the header.
///
///   # streammem-stream v1 height=<H> width=<W> channels=<C> classes=<M>
///   <id> <src> <arrival> <unc or -> <E> <e...> <f_0> ... <f_{HWC-1}>
///       <L> {<class id> <HW label bits>} x L
struct StreamDump {
  int height = 0;
  int width = 0;
  int channels = 0;
  int n_classes = 0;
  std::vector<Sample> samples;
};

std::string format_stream_dump(const StreamDump& dump);
StreamDump parse_stream_dump(const std::string& text);

void save_stream_dump(const StreamDump& dump, const std::filesystem::path& path);
StreamDump load_stream_dump(const std::filesystem::path& path);

}  // namespace streammem
