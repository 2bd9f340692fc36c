// Micro-benchmarks for the hot paths of the online loop: buffer insertion
// under each strategy, mini-batch drawing, entry refresh, and one learner
// step. Insertion is measured at steady state (buffer already full), so the
// similarity-based strategies pay their full pairwise-scan cost per insert.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "streammem/replay_buffer.hpp"
#include "streammem/rng.hpp"
#include "streammem/stream_sim.hpp"
#include "streammem/toy_learner.hpp"

namespace {

using namespace streammem;

constexpr int kEmbedDim = 8;

std::vector<double> random_unit(Rng& rng) {
  std::vector<double> v(kEmbedDim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

Sample scored_sample(std::int64_t id, Rng& rng) {
  Sample s;
  s.id = id;
  s.source_id = static_cast<int>(id % 4);
  s.arrival_index = id;
  s.embedding = random_unit(rng);
  s.uncertainty = rng.uniform();
  return s;
}

void insert_at_capacity(benchmark::State& state, Strategy strategy, double protect_fraction) {
  const auto capacity = static_cast<std::size_t>(state.range(0));
  Rng rng(99);
  ReplayBuffer buffer(strategy, capacity, protect_fraction);
  std::int64_t next_id = 0;
  while (buffer.size() < capacity) {
    buffer.insert(scored_sample(next_id++, rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(buffer.insert(scored_sample(next_id++, rng)));
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_insert_linear(benchmark::State& state) {
  insert_at_capacity(state, Strategy::kLinear, 0.0);
}

void BM_insert_dynamic(benchmark::State& state) {
  insert_at_capacity(state, Strategy::kDynamic, 0.0);
}

void BM_insert_selective(benchmark::State& state) {
  insert_at_capacity(state, Strategy::kSelective, 0.25);
}

void BM_minibatch(benchmark::State& state) {
  const auto capacity = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  ReplayBuffer buffer(Strategy::kDynamic, capacity);
  for (std::int64_t id = 0; id < static_cast<std::int64_t>(capacity); ++id) {
    buffer.insert(scored_sample(id, rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(buffer.sample_minibatch(8, rng));
  }
}

void BM_refresh_entry(benchmark::State& state) {
  const auto capacity = static_cast<std::size_t>(state.range(0));
  Rng rng(13);
  ReplayBuffer buffer(Strategy::kDynamic, capacity);
  for (std::int64_t id = 0; id < static_cast<std::int64_t>(capacity); ++id) {
    buffer.insert(scored_sample(id, rng));
  }
  std::size_t index = 0;
  for (auto _ : state) {
    buffer.refresh_entry(index, random_unit(rng), rng.uniform());
    index = (index + 1) % capacity;
  }
}

void BM_train_step(benchmark::State& state) {
  const GridSpec grid{16, 16, 4};
  Rng init(3);
  ToyLearner learner(/*n_classes=*/6, grid, kEmbedDim, /*learning_rate=*/0.5, init);
  const std::vector<Sample> stream = generate_stream(make_four_site_sources(2), grid, 5);
  std::vector<const Sample*> batch;
  for (const Sample& sample : stream) batch.push_back(&sample);

  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.train_step(batch));
  }
}

void BM_embed(benchmark::State& state) {
  const GridSpec grid{16, 16, 4};
  Rng init(17);
  ToyLearner learner(/*n_classes=*/6, grid, kEmbedDim, /*learning_rate=*/0.5, init);
  const std::vector<Sample> stream = generate_stream(make_four_site_sources(1), grid, 19);

  std::size_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.embed(stream[index]));
    index = (index + 1) % stream.size();
  }
}

}  // namespace

BENCHMARK(BM_insert_linear)->Arg(128)->Arg(512);
BENCHMARK(BM_insert_dynamic)->Arg(128)->Arg(512);
BENCHMARK(BM_insert_selective)->Arg(128)->Arg(512);
BENCHMARK(BM_minibatch)->Arg(128)->Arg(512);
BENCHMARK(BM_refresh_entry)->Arg(128)->Arg(512);
BENCHMARK(BM_train_step);
BENCHMARK(BM_embed);

BENCHMARK_MAIN();
