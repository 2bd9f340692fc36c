#include "streammem/runner.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "streammem/scoring.hpp"
#include "streammem/stream_sim.hpp"
#include "streammem/toy_learner.hpp"

namespace streammem {

namespace {

/// Mean Dice per annotated class of one source's held-out set.
std::map<int, double> evaluate_source(const ToyLearner& learner,
                                      const std::vector<Sample>& eval_set) {
  std::map<int, double> dice_sum;
  std::map<int, std::int64_t> dice_count;
  for (const Sample& sample : eval_set) {
    const std::vector<ProbGrid> probs = learner.predict_probs(sample);
    for (const auto& [cls, gt] : sample.labels) {
      dice_sum[cls] += dice_score(binarize(probs[static_cast<std::size_t>(cls)]), gt);
      ++dice_count[cls];
    }
  }
  std::map<int, double> mean;
  for (const auto& [cls, sum] : dice_sum) mean[cls] = sum / static_cast<double>(dice_count[cls]);
  return mean;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RecordObserver& observer) {
  validate_config(config);
  VectorFeed feed(generate_stream(config.sources, config.grid, config.seed));
  return run_experiment_with_feed(config, feed, observer);
}

ExperimentResult run_experiment_with_feed(const ExperimentConfig& config, StreamFeed& feed,
                                          const RecordObserver& observer) {
  validate_config(config);

  ExperimentResult result;
  result.config = config;

  Rng init_rng = Rng::substream(config.seed, "learner-init");
  ToyLearner learner(config.n_classes, config.grid, config.embed_dim, config.learning_rate,
                     init_rng);
  Rng batch_rng = Rng::substream(config.seed, "minibatch");

  // Held-out per-source evaluation sets from their own disjoint sub-streams.
  std::map<int, std::vector<Sample>> eval_sets;
  for (const SourceSpec& spec : config.sources) {
    eval_sets.emplace(spec.source_id, generate_eval_set(spec, config.grid,
                                                        config.eval_samples_per_source,
                                                        config.seed));
  }

  ReplayBuffer buffer(config.strategy, static_cast<std::size_t>(config.memory_size),
                      config.protect_fraction);
  const SamplingSchedule schedule = config.schedule();

  double loss_sum = 0.0;
  std::int64_t loss_steps = 0;
  int current_source = -1;
  std::int64_t last_arrival = -1;
  std::int64_t last_recorded = -1;

  auto record_metrics = [&](std::int64_t arrival_index) {
    MetricsRecord record;
    record.arrival_index = arrival_index;
    for (const auto& [source_id, eval_set] : eval_sets) {
      record.dice[source_id] = evaluate_source(learner, eval_set);
    }
    double uncertainty_sum = 0.0;
    std::int64_t uncertainty_count = 0;
    for (const Sample& entry : buffer.entries()) {
      ++record.buffer_composition[entry.source_id];
      if (entry.uncertainty) {
        uncertainty_sum += *entry.uncertainty;
        ++uncertainty_count;
      }
    }
    record.mean_buffer_uncertainty =
        uncertainty_count > 0 ? uncertainty_sum / static_cast<double>(uncertainty_count) : 0.0;
    record.loss = loss_steps > 0 ? loss_sum / static_cast<double>(loss_steps) : 0.0;
    loss_sum = 0.0;
    loss_steps = 0;
    result.records.push_back(record);
    if (observer) observer(result.records.back(), buffer);
    last_recorded = arrival_index;
  };

  while (std::optional<Sample> sample = feed.next()) {
    ++result.samples_seen;
    if (config.dump_stream) result.stream_copy.push_back(*sample);
    if (current_source != -1 && sample->source_id != current_source) {
      result.boundary_snapshots.push_back({current_source, last_arrival, snapshot_of(buffer)});
    }
    current_source = sample->source_id;
    last_arrival = sample->arrival_index;
    const std::int64_t sample_id = sample->id;

    sample->embedding = learner.embed(*sample);
    sample->uncertainty = sample_uncertainty(learner, *sample);

    if (std::optional<Sample> evicted = buffer.insert(std::move(*sample))) {
      result.evictions.push_back({last_arrival, sample_id, evicted->id});
    }

    for (int step = 0; step < steps_for_arrival(schedule); ++step) {
      const std::vector<std::size_t> indices =
          buffer.sample_minibatch(static_cast<std::size_t>(config.batch_size), batch_rng);
      std::vector<const Sample*> batch;
      batch.reserve(indices.size());
      for (std::size_t index : indices) batch.push_back(&buffer.entries()[index]);
      loss_sum += learner.train_step(batch);
      ++loss_steps;

      if (buffer.has_similarity_matrix()) {
        // Re-encounter refresh: the stepped learner re-scores each distinct
        // entry it just trained on, and its embedding is folded in by EMA.
        const std::set<std::size_t> distinct(indices.begin(), indices.end());
        for (std::size_t index : distinct) {
          const Sample& entry = buffer.entries()[index];
          std::vector<double> blended = update_embedding_ema(
              entry.embedding, learner.embed(entry), EmaConfig{config.ema_momentum});
          const double uncertainty = sample_uncertainty(learner, entry);
          buffer.refresh_entry(index, std::move(blended), uncertainty);
        }
      }
    }

    if (result.samples_seen % config.eval_interval == 0) record_metrics(last_arrival);
  }

  if (result.samples_seen == 0) {
    throw std::runtime_error("stream produced no samples");
  }
  if (last_recorded != last_arrival) record_metrics(last_arrival);
  result.boundary_snapshots.push_back({current_source, last_arrival, snapshot_of(buffer)});
  result.final_buffer = snapshot_of(buffer);
  result.final_average_dice = final_average_dice(result.records);
  return result;
}

}  // namespace streammem
