#include "streammem/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "streammem/scoring.hpp"

namespace streammem {

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kLinear: return "linear";
    case Strategy::kDynamic: return "dynamic";
    case Strategy::kSelective: return "selective";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "linear") return Strategy::kLinear;
  if (name == "dynamic") return Strategy::kDynamic;
  if (name == "selective") return Strategy::kSelective;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected linear, dynamic, or selective)");
}

int steps_for_arrival(const SamplingSchedule& schedule) { return schedule.rate; }

ReplayBuffer::ReplayBuffer(Strategy strategy, std::size_t capacity, double protect_fraction)
    : strategy_(strategy), capacity_(capacity), protect_fraction_(protect_fraction) {
  if (capacity_ == 0) {
    throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
  }
  if (protect_fraction_ < 0.0 || protect_fraction_ > 1.0) {
    throw std::invalid_argument("ReplayBuffer: protect_fraction (K) outside [0, 1]");
  }
  entries_.reserve(capacity_ + 1);
}

std::optional<Sample> ReplayBuffer::insert(Sample sample) {
  for (const Sample& entry : entries_) {
    if (entry.id == sample.id) {
      throw std::invalid_argument("ReplayBuffer: duplicate sample id " +
                                  std::to_string(sample.id));
    }
  }
  if (strategy_ == Strategy::kLinear) return insert_linear(std::move(sample));
  return insert_similarity(std::move(sample));
}

std::optional<Sample> ReplayBuffer::insert_linear(Sample sample) {
  entries_.push_back(std::move(sample));
  if (entries_.size() <= capacity_) return std::nullopt;
  auto oldest = std::min_element(entries_.begin(), entries_.end(),
                                 [](const Sample& a, const Sample& b) {
                                   return a.arrival_index < b.arrival_index;
                                 });
  Sample evicted = std::move(*oldest);
  entries_.erase(oldest);
  return evicted;
}

void ReplayBuffer::require_unit_embedding(const Sample& sample) const {
  if (!sample.has_embedding()) {
    throw std::invalid_argument("ReplayBuffer: missing embedding on sample " +
                                std::to_string(sample.id));
  }
  double norm = 0.0;
  for (double v : sample.embedding) norm += v * v;
  norm = std::sqrt(norm);
  if (std::abs(norm - 1.0) > 1e-6) {
    throw std::invalid_argument("ReplayBuffer: embedding of sample " +
                                std::to_string(sample.id) + " is not unit norm");
  }
}

std::optional<Sample> ReplayBuffer::insert_similarity(Sample sample) {
  require_unit_embedding(sample);
  if (strategy_ == Strategy::kSelective && !sample.uncertainty.has_value()) {
    throw std::invalid_argument("ReplayBuffer: missing uncertainty on sample " +
                                std::to_string(sample.id));
  }

  const std::size_t n = entries_.size();
  std::vector<double> new_sims(n);
  for (std::size_t i = 0; i < n; ++i) {
    new_sims[i] = cosine_similarity(entries_[i].embedding, sample.embedding);
  }

  if (n < capacity_) {
    append_with_similarities(std::move(sample), new_sims);
    return std::nullopt;
  }

  // Candidate set: entries 0..n-1 plus the incoming sample at index n.
  auto cand_sim = [&](std::size_t i, std::size_t j) -> double {
    if (i == j) return 1.0;
    if (i < n && j < n) return sim_[i * n + j];
    return new_sims[std::min(i, j)];
  };
  auto cand_arrival = [&](std::size_t i) -> std::int64_t {
    return i < n ? entries_[i].arrival_index : sample.arrival_index;
  };
  auto cand_uncertainty = [&](std::size_t i) -> double {
    const auto& u = i < n ? entries_[i].uncertainty : sample.uncertainty;
    return u.value_or(0.0);
  };

  std::vector<std::size_t> searchable;
  searchable.reserve(n + 1);
  if (strategy_ == Strategy::kSelective) {
    std::vector<std::pair<std::int64_t, double>> uncertainties;
    uncertainties.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!entries_[i].uncertainty.has_value()) {
        throw std::invalid_argument("ReplayBuffer: entry " + std::to_string(entries_[i].id) +
                                    " has no uncertainty");
      }
      uncertainties.emplace_back(entries_[i].id, *entries_[i].uncertainty);
    }
    uncertainties.emplace_back(sample.id, *sample.uncertainty);
    const std::set<std::int64_t> top = topk_uncertain(uncertainties, protect_fraction_);
    for (std::size_t i = 0; i <= n; ++i) {
      const std::int64_t id = i < n ? entries_[i].id : sample.id;
      if (!top.count(id)) searchable.push_back(i);
    }
  } else {
    for (std::size_t i = 0; i <= n; ++i) searchable.push_back(i);
  }

  std::size_t evict_idx;
  if (searchable.size() < 2) {
    // Everything (or all but one) is protected: drop the least uncertain candidate.
    evict_idx = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double u = cand_uncertainty(i);
      const double best = cand_uncertainty(evict_idx);
      if (u < best || (u == best && cand_arrival(i) > cand_arrival(evict_idx))) {
        evict_idx = i;
      }
    }
  } else {
    std::size_t best_i = searchable[0], best_j = searchable[1];
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a + 1 < searchable.size(); ++a) {
      for (std::size_t b = a + 1; b < searchable.size(); ++b) {
        const double s = cand_sim(searchable[a], searchable[b]);
        if (s > best_sim) {
          best_sim = s;
          best_i = searchable[a];
          best_j = searchable[b];
        }
      }
    }
    // The more redundant pair member goes: larger mean similarity to the rest,
    // ties toward the newer arrival.
    double sum_i = 0.0, sum_j = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      if (k != best_i) sum_i += cand_sim(best_i, k);
      if (k != best_j) sum_j += cand_sim(best_j, k);
    }
    if (sum_i > sum_j) {
      evict_idx = best_i;
    } else if (sum_j > sum_i) {
      evict_idx = best_j;
    } else {
      evict_idx = cand_arrival(best_i) > cand_arrival(best_j) ? best_i : best_j;
    }
  }

  if (evict_idx == n) return sample;  // incoming sample rejected outright

  Sample evicted = std::move(entries_[evict_idx]);
  replace_entry(evict_idx, std::move(sample), new_sims);
  return evicted;
}

void ReplayBuffer::append_with_similarities(Sample sample, const std::vector<double>& new_sims) {
  const std::size_t n = entries_.size();
  std::vector<double> next((n + 1) * (n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next[i * (n + 1) + j] = sim_[i * n + j];
    next[i * (n + 1) + n] = new_sims[i];
    next[n * (n + 1) + i] = new_sims[i];
  }
  next[n * (n + 1) + n] = 1.0;
  sim_ = std::move(next);
  entries_.push_back(std::move(sample));
}

void ReplayBuffer::replace_entry(std::size_t index, Sample sample,
                                 const std::vector<double>& new_sims) {
  const std::size_t n = entries_.size();
  std::vector<std::size_t> kept;
  kept.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != index) kept.push_back(i);
  }
  std::vector<double> next(n * n);
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t b = 0; b < kept.size(); ++b) {
      next[a * n + b] = sim_[kept[a] * n + kept[b]];
    }
    next[a * n + (n - 1)] = new_sims[kept[a]];
    next[(n - 1) * n + a] = new_sims[kept[a]];
  }
  next[(n - 1) * n + (n - 1)] = 1.0;
  sim_ = std::move(next);
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
  entries_.push_back(std::move(sample));
}

std::vector<std::size_t> ReplayBuffer::sample_minibatch(std::size_t batch_size, Rng& rng) const {
  const std::size_t n = entries_.size();
  if (n == 0) {
    throw std::out_of_range("sample_minibatch: empty buffer");
  }
  std::vector<std::size_t> picks;
  picks.reserve(batch_size);
  if (batch_size > n) {
    // Oversized batch: fall back to drawing with replacement.
    for (std::size_t k = 0; k < batch_size; ++k) {
      picks.push_back(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
    }
    return picks;
  }
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t k = 0; k < batch_size; ++k) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(k), static_cast<std::int64_t>(n) - 1));
    std::swap(indices[k], indices[j]);
    picks.push_back(indices[k]);
  }
  return picks;
}

void ReplayBuffer::refresh_entry(std::size_t index, std::vector<double> embedding,
                                 double uncertainty) {
  if (index >= entries_.size()) {
    throw std::out_of_range("refresh_entry: index out of range");
  }
  Sample& entry = entries_[index];
  entry.embedding = std::move(embedding);
  entry.uncertainty = uncertainty;
  if (strategy_ == Strategy::kLinear) return;
  require_unit_embedding(entry);
  const std::size_t n = entries_.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double s = j == index ? 1.0 : cosine_similarity(entry.embedding, entries_[j].embedding);
    sim_[index * n + j] = s;
    sim_[j * n + index] = s;
  }
}

std::set<std::int64_t> ReplayBuffer::protected_ids() const {
  if (strategy_ != Strategy::kSelective) return {};
  std::vector<std::pair<std::int64_t, double>> uncertainties;
  uncertainties.reserve(entries_.size());
  for (const Sample& entry : entries_) {
    uncertainties.emplace_back(entry.id, entry.uncertainty.value_or(0.0));
  }
  return topk_uncertain(uncertainties, protect_fraction_);
}

double ReplayBuffer::similarity(std::size_t i, std::size_t j) const {
  if (!has_similarity_matrix()) {
    throw std::logic_error("similarity: linear buffers keep no similarity matrix");
  }
  if (i >= entries_.size() || j >= entries_.size()) {
    throw std::out_of_range("similarity: index out of range");
  }
  return sim_[i * entries_.size() + j];
}

}  // namespace streammem
