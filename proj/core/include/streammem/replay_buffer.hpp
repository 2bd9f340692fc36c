#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "streammem/rng.hpp"
#include "streammem/sample.hpp"

namespace streammem {

enum class Strategy { kLinear, kDynamic, kSelective };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

/// Training cadence: `rate` mini-batches are drawn per stream arrival.
struct SamplingSchedule {
  int rate = 1;
  int batch_size = 1;
};

/// Mini-batch training steps owed per stream arrival.
int steps_for_arrival(const SamplingSchedule& schedule);

/// Bounded replay buffer over stream samples with three eviction strategies:
///
///   Linear    — first-in-first-out: overflow drops the oldest arrival.
///   Dynamic   — overflow scans all pairwise cosine similarities over the N+1
///               candidates (incoming sample included) and drops the member of
///               the most-similar pair with the larger mean similarity to the
///               rest; ties break toward the newer arrival.
///   Selective — as Dynamic, but the pair search only runs over candidates
///               outside the top ceil(K * (N+1)) by uncertainty; protected
///               candidates are never evicted. If fewer than two candidates
///               remain unprotected, the minimum-uncertainty candidate goes.
///
/// Entries keep insertion order. For Dynamic and Selective the buffer
/// maintains an incremental pairwise cosine matrix over its entries that
/// stays equal to the brute-force recomputation.
class ReplayBuffer {
 public:
  ReplayBuffer(Strategy strategy, std::size_t capacity, double protect_fraction = 0.0);

  /// Inserts one sample; returns the evicted sample when the buffer was full
  /// (which may be the incoming sample itself — an immediate rejection).
  /// Throws std::invalid_argument on duplicate ids, on a missing embedding
  /// (Dynamic/Selective), or on a missing uncertainty (Selective).
  std::optional<Sample> insert(Sample sample);

  /// Indices of `batch_size` entries drawn uniformly: without replacement
  /// within a batch, with replacement once batch_size exceeds size().
  /// Throws std::out_of_range on an empty buffer.
  std::vector<std::size_t> sample_minibatch(std::size_t batch_size, Rng& rng) const;

  /// Replaces one entry's embedding and uncertainty (the re-encounter refresh)
  /// and updates the similarity matrix row in place.
  void refresh_entry(std::size_t index, std::vector<double> embedding, double uncertainty);

  const std::vector<Sample>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  Strategy strategy() const { return strategy_; }
  double protect_fraction() const { return protect_fraction_; }

  /// Ids of the current top ceil(K * size()) entries by uncertainty
  /// (Selective). Empty for the other strategies.
  std::set<std::int64_t> protected_ids() const;

  /// Pairwise cosine similarity between entries i and j (Dynamic/Selective).
  double similarity(std::size_t i, std::size_t j) const;
  bool has_similarity_matrix() const { return strategy_ != Strategy::kLinear; }

 private:
  std::optional<Sample> insert_linear(Sample sample);
  std::optional<Sample> insert_similarity(Sample sample);

  void require_unit_embedding(const Sample& sample) const;
  void append_with_similarities(Sample sample, const std::vector<double>& new_sims);
  void replace_entry(std::size_t index, Sample sample, const std::vector<double>& new_sims);

  Strategy strategy_;
  std::size_t capacity_;
  double protect_fraction_;
  std::vector<Sample> entries_;
  std::vector<double> sim_;  // row-major size() x size(); diagonal = 1
};

}  // namespace streammem
