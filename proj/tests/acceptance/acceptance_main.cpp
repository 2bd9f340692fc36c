// Acceptance gate: one self-contained check per headline property of the
// engine, each printed as a single PASS/FAIL line with its runtime. Exits
// nonzero when any check fails.
//
//   1. FIFO buffer keeps exactly the last N arrivals (1,000 random streams)
//   2. dynamic/selective eviction matches a brute-force oracle (100 trials each)
//   3. size-balancing penalty weights: exactness, worked example, sum rule
//   4. uncertainty scoring: ln 2 anchor, monotonicity, unannotated zero-grad
//   5. learner analytic gradients vs central finite differences
//   6. 4-source stream: Dice ordering and forgetting gap across strategies
//   7. 4-source stream: buffer diversity and uncertainty protection
//   8. single-pass stream consumption
//   9. byte-identical reruns of the same config
//
// Checks 6 and 7 share one 15-run sweep (3 strategies x 5 seeds). Pass an
// optional list of check numbers to run a subset, e.g. `acceptance 1 2 5`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "streammem/artifacts.hpp"
#include "streammem/metrics.hpp"
#include "streammem/replay_buffer.hpp"
#include "streammem/rng.hpp"
#include "streammem/runner.hpp"
#include "streammem/scoring.hpp"
#include "streammem/stream_sim.hpp"
#include "streammem/toy_learner.hpp"

#include "builders.hpp"
#include "eviction_oracle.hpp"

using namespace streammem;
using streammem::test::OracleCandidate;

namespace {

struct CheckOutcome {
  bool pass = true;
  std::string detail;  // shown after the check name

  void fail(const std::string& why) {
    if (pass) detail = why;  // keep the first failure
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double value, int precision = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << value;
  return out.str();
}

// ---------------------------------------------------------------------------
// 1. FIFO property

CheckOutcome check_fifo() {
  CheckOutcome outcome;
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int capacity = 2 + trial % 15;  // N in {2, ..., 16}
    const int length = capacity + static_cast<int>(rng.uniform_int(0, 48));
    ReplayBuffer buffer(Strategy::kLinear, capacity);
    for (int i = 0; i < length; ++i) {
      buffer.insert(test::bare_sample(i));
    }
    std::set<std::int64_t> held;
    for (const Sample& entry : buffer.entries()) held.insert(entry.arrival_index);
    std::set<std::int64_t> expected;
    for (int i = length - capacity; i < length; ++i) expected.insert(i);
    if (held != expected) {
      outcome.fail("trial " + std::to_string(trial) + ": buffer diverged from the last " +
                   std::to_string(capacity) + " arrivals");
      return outcome;
    }
  }
  outcome.detail = "1000 streams, N in {2..16}";
  return outcome;
}

// ---------------------------------------------------------------------------
// 2. eviction-oracle equivalence

int run_oracle_trial(Strategy strategy, double protect_fraction, std::uint64_t seed,
                     CheckOutcome& outcome) {
  Rng rng(seed);
  const int capacity = 2 + static_cast<int>(rng.uniform_int(0, 6));  // N in {2, ..., 8}
  const int dim = 2 + static_cast<int>(rng.uniform_int(0, 2));
  ReplayBuffer buffer(strategy, capacity, protect_fraction);

  int overflows = 0;
  for (int i = 0; i < capacity + 24; ++i) {
    Sample sample = test::scored_sample(i, test::random_unit_embedding(rng, dim),
                                                rng.uniform());
    std::optional<std::int64_t> expected;
    if (buffer.size() == static_cast<std::size_t>(capacity)) {
      std::vector<OracleCandidate> candidates;
      for (const Sample& entry : buffer.entries()) {
        candidates.push_back({entry.id, entry.arrival_index, *entry.uncertainty, entry.embedding});
      }
      candidates.push_back({sample.id, sample.arrival_index, *sample.uncertainty,
                            sample.embedding});
      const double k = strategy == Strategy::kSelective ? protect_fraction : 0.0;
      expected = test::oracle_evicted_id(candidates, k);
      ++overflows;
    }
    const std::optional<Sample> evicted = buffer.insert(std::move(sample));
    if (expected) {
      if (!evicted || evicted->id != *expected) {
        outcome.fail("seed " + std::to_string(seed) + " arrival " + std::to_string(i) +
                     ": evicted " + (evicted ? std::to_string(evicted->id) : "nothing") +
                     ", oracle says " + std::to_string(*expected));
        return overflows;
      }
    } else if (evicted) {
      outcome.fail("seed " + std::to_string(seed) + ": eviction before the buffer was full");
      return overflows;
    }
  }
  return overflows;
}

CheckOutcome check_oracle() {
  CheckOutcome outcome;
  int overflows = 0;
  for (std::uint64_t seed = 1; seed <= 100 && outcome.pass; ++seed) {
    overflows += run_oracle_trial(Strategy::kDynamic, 0.0, seed, outcome);
  }
  for (std::uint64_t seed = 1; seed <= 100 && outcome.pass; ++seed) {
    const double k = 0.25 * static_cast<double>(seed % 5);  // sweeps 0, .25, .5, .75, 1
    overflows += run_oracle_trial(Strategy::kSelective, k, seed, outcome);
  }
  if (outcome.pass && overflows < 1000) {
    outcome.fail("only " + std::to_string(overflows) + " overflow decisions exercised");
  }
  if (outcome.pass) {
    outcome.detail = "200 trials, " + std::to_string(overflows) + " evictions matched";
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 3. size-balancing penalty weights

CheckOutcome check_penalty_weights() {
  CheckOutcome outcome;

  // Equal sizes give alpha == 1 exactly, for any class count and size.
  Rng rng(303);
  for (int m : {1, 2, 3, 5, 8, 13}) {
    const std::int64_t size = 1 + static_cast<std::int64_t>(rng.uniform_int(0, 99999));
    std::map<int, std::int64_t> sizes;
    for (int cls = 0; cls < m; ++cls) sizes[cls] = size;
    for (const auto& [cls, alpha] : structure_penalty_from_sizes(sizes)) {
      if (alpha != 1.0) {
        outcome.fail("equal sizes, m=" + std::to_string(m) + ": alpha[" + std::to_string(cls) +
                     "] = " + fmt(alpha, 12) + " != 1");
        return outcome;
      }
    }
  }

  // Worked example: sizes (100, 300) -> alpha (1.5, 1.0).
  const PenaltyVector example = structure_penalty_from_sizes({{0, 100}, {1, 300}});
  if (std::abs(example.at(0) - 1.5) > 1e-9 || std::abs(example.at(1) - 1.0) > 1e-9) {
    outcome.fail("sizes (100, 300): got (" + fmt(example.at(0), 10) + ", " +
                 fmt(example.at(1), 10) + "), want (1.5, 1.0)");
    return outcome;
  }

  // Pre-clamp weights sum to the class count on random size vectors.
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 11));
    std::map<int, std::int64_t> sizes;
    for (int cls = 0; cls < m; ++cls) {
      sizes[cls] = 1 + static_cast<std::int64_t>(rng.uniform_int(0, 99999));
    }
    double sum = 0.0;
    for (const auto& [cls, weight] : normalized_size_weights(sizes)) sum += weight;
    if (std::abs(sum - static_cast<double>(m)) > 1e-9) {
      outcome.fail("trial " + std::to_string(trial) + ": weights sum to " + fmt(sum, 12) +
                   ", want " + std::to_string(m));
      return outcome;
    }
  }

  outcome.detail = "exact at equal sizes; sum rule on 1000 random vectors";
  return outcome;
}

// ---------------------------------------------------------------------------
// 4. uncertainty scoring

/// Random features on a small grid, with random labels for the given classes.
Sample random_instance(Rng& rng, const GridSpec& grid, const std::vector<int>& labeled) {
  Sample s;
  s.id = 0;
  s.source_id = 0;
  s.arrival_index = 0;
  s.features = FeatureGrid(grid.height, grid.width, grid.channels);
  for (double& v : s.features.data) v = rng.normal();
  for (int cls : labeled) {
    MaskGrid mask(grid.height, grid.width);
    for (auto& v : mask.data) v = rng.uniform() < 0.5 ? 1 : 0;
    s.labels[cls] = std::move(mask);
  }
  return s;
}

CheckOutcome check_uncertainty() {
  CheckOutcome outcome;

  // All probabilities at 0.5 with unit weights scores ln 2 regardless of labels.
  {
    ProbGrid probs(4, 4);
    probs.data.assign(probs.data.size(), 0.5);
    MaskGrid mask(4, 4);
    mask.data[5] = 1;
    const double score = weighted_bce_uncertainty({{0, probs}}, {{0, mask}}, {0}, {{0, 1.0}});
    if (std::abs(score - std::log(2.0)) > 1e-6) {
      outcome.fail("all-0.5 grid scored " + fmt(score, 10) + ", want ln 2");
      return outcome;
    }
  }

  // Moving predictions toward the ground truth strictly lowers the score.
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    ProbGrid before(6, 6);
    ProbGrid after(6, 6);
    MaskGrid truth(6, 6);
    for (std::size_t i = 0; i < before.data.size(); ++i) {
      truth.data[i] = rng.uniform() < 0.5 ? 0 : 1;
      before.data[i] = 0.05 + 0.9 * rng.uniform();
      after.data[i] = before.data[i] + 0.5 * (truth.data[i] - before.data[i]);
    }
    const double u_before = weighted_bce_uncertainty({{0, before}}, {{0, truth}}, {0}, {{0, 1.0}});
    const double u_after = weighted_bce_uncertainty({{0, after}}, {{0, truth}}, {0}, {{0, 1.0}});
    if (!(u_after < u_before)) {
      outcome.fail("trial " + std::to_string(trial) + ": score did not drop (" + fmt(u_before, 8) +
                   " -> " + fmt(u_after, 8) + ")");
      return outcome;
    }
  }

  // Classes a sample does not annotate contribute exactly zero gradient.
  {
    const GridSpec grid{4, 4, 3};
    Rng init(405);
    ToyLearner learner(/*n_classes=*/3, grid, /*embed_dim=*/4, /*learning_rate=*/0.5, init);
    std::vector<double> params = learner.flat_parameters();
    Rng noise(406);
    for (double& p : params) p += 0.3 * noise.normal();
    learner.set_flat_parameters(params);

    Rng instance_rng(408);
    const Sample sample = random_instance(instance_rng, grid, {0});
    const std::vector<double> gradient = learner.flat_gradients({&sample});
    const std::size_t per_class = static_cast<std::size_t>(grid.channels);
    for (int cls = 1; cls < 3; ++cls) {
      const std::size_t offset = static_cast<std::size_t>(cls) * per_class;
      for (std::size_t i = 0; i < per_class; ++i) {
        if (gradient[offset + i] != 0.0) {
          outcome.fail("unannotated class " + std::to_string(cls) + " has nonzero gradient");
          return outcome;
        }
      }
      // Bias block sits after all weight blocks.
      const std::size_t bias = 3 * per_class + static_cast<std::size_t>(cls);
      if (gradient[bias] != 0.0) {
        outcome.fail("unannotated class " + std::to_string(cls) + " has nonzero bias gradient");
        return outcome;
      }
    }
  }

  outcome.detail = "ln 2 anchor; 100 monotone trials; exact zero off-label gradient";
  return outcome;
}

// ---------------------------------------------------------------------------
// 5. gradient check

CheckOutcome check_gradients() {
  CheckOutcome outcome;
  const GridSpec grid{4, 4, 3};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng init(500 + trial);
    ToyLearner learner(/*n_classes=*/2, grid, /*embed_dim=*/4, /*learning_rate=*/0.5, init);
    Rng rng(600 + trial);
    std::vector<double> params = learner.flat_parameters();
    for (double& p : params) p += 0.3 * rng.normal();
    learner.set_flat_parameters(params);

    Rng instance_rng(700 + trial);
    const Sample first = random_instance(instance_rng, grid, {0, 1});
    const Sample second = random_instance(instance_rng, grid, {0, 1});
    const std::vector<const Sample*> batch{&first, &second};

    const std::vector<double> analytic_gradient = learner.flat_gradients(batch);
    const double h = 1e-6;
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::vector<double> probe = params;
      probe[i] = params[i] + h;
      learner.set_flat_parameters(probe);
      const double up = learner.batch_loss(batch);
      probe[i] = params[i] - h;
      learner.set_flat_parameters(probe);
      const double down = learner.batch_loss(batch);
      learner.set_flat_parameters(params);

      const double numeric = (up - down) / (2.0 * h);
      const double analytic = analytic_gradient[i];
      const double rel =
          std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, rel);
      if (rel >= 1e-4) {
        outcome.fail("trial " + std::to_string(trial) + " param " + std::to_string(i) +
                     ": relative error " + fmt(rel, 8));
        return outcome;
      }
    }
  }
  outcome.detail = "20 instances, worst relative error " + fmt(worst, 8);
  return outcome;
}

// ---------------------------------------------------------------------------
// 6 + 7. the shared 4-source sweep

struct SweepRun {
  Strategy strategy = Strategy::kLinear;
  std::uint64_t seed = 0;
  double final_dice = 0.0;
  double mean_drop = 0.0;
  double final_entropy = 0.0;
  std::map<int, std::int64_t> final_composition;
  int protection_records = 0;    // selective only: records where the margin held
  int protection_violations = 0; // selective only: records where it did not
};

ExperimentConfig sweep_config(Strategy strategy, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.strategy = strategy;
  cfg.memory_size = 128;
  cfg.sampling_rate = 10;
  cfg.protect_fraction = strategy == Strategy::kSelective ? 0.25 : 0.0;
  cfg.batch_size = 8;
  cfg.seed = seed;
  cfg.eval_interval = 50;
  cfg.eval_samples_per_source = 32;
  cfg.n_classes = 6;
  cfg.embed_dim = 8;
  cfg.sources = make_four_site_sources(200);
  return cfg;
}

SweepRun run_sweep_member(Strategy strategy, std::uint64_t seed) {
  const ExperimentConfig cfg = sweep_config(strategy, seed);
  SweepRun run;
  run.strategy = strategy;
  run.seed = seed;

  const RecordObserver observer = [&run](const MetricsRecord&, const ReplayBuffer& buffer) {
    if (buffer.strategy() != Strategy::kSelective) return;
    std::set<std::int64_t> protected_ids;
    for (std::int64_t id : buffer.protected_ids()) protected_ids.insert(id);
    double protected_sum = 0.0, unprotected_sum = 0.0;
    std::int64_t protected_n = 0, unprotected_n = 0;
    for (const Sample& entry : buffer.entries()) {
      if (protected_ids.count(entry.id)) {
        protected_sum += *entry.uncertainty;
        ++protected_n;
      } else {
        unprotected_sum += *entry.uncertainty;
        ++unprotected_n;
      }
    }
    if (protected_n == 0 || unprotected_n == 0) return;
    const bool held = protected_sum / protected_n > unprotected_sum / unprotected_n;
    held ? ++run.protection_records : ++run.protection_violations;
  };

  const ExperimentResult result = run_experiment(cfg, observer);
  run.final_dice = result.final_average_dice;
  run.mean_drop = mean_forgetting_drop(cfg, result.records);
  run.final_composition = result.records.back().buffer_composition;
  run.final_entropy = composition_entropy(run.final_composition);
  return run;
}

struct SweepOutcome {
  CheckOutcome forgetting;  // check 6
  CheckOutcome diversity;   // check 7
  double seconds = 0.0;
};

SweepOutcome run_sweep() {
  SweepOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  constexpr int kSeeds = 5;

  std::map<Strategy, std::vector<SweepRun>> runs;
  for (Strategy strategy : {Strategy::kLinear, Strategy::kDynamic, Strategy::kSelective}) {
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      SweepRun run = run_sweep_member(strategy, seed);
      std::cerr << "  [sweep] " << to_string(strategy) << " seed=" << seed
                << "  dice=" << fmt(run.final_dice) << "  drop=" << fmt(run.mean_drop)
                << "  entropy=" << fmt(run.final_entropy) << "\n";
      runs[strategy].push_back(std::move(run));
    }
  }
  outcome.seconds = seconds_since(start);

  const std::vector<SweepRun>& lm = runs.at(Strategy::kLinear);
  const std::vector<SweepRun>& dm = runs.at(Strategy::kDynamic);
  const std::vector<SweepRun>& sm = runs.at(Strategy::kSelective);

  // --- check 6: Dice ordering and the forgetting gap ---
  int ordered = 0;
  for (int i = 0; i < kSeeds; ++i) {
    if (sm[i].final_dice >= dm[i].final_dice && dm[i].final_dice >= lm[i].final_dice) ++ordered;
  }
  double lm_drop = 0.0, dm_drop = 0.0;
  for (int i = 0; i < kSeeds; ++i) {
    lm_drop += lm[i].mean_drop / kSeeds;
    dm_drop += dm[i].mean_drop / kSeeds;
  }
  if (ordered < 4) {
    outcome.forgetting.fail("Dice ordering selective >= dynamic >= linear held in only " +
                            std::to_string(ordered) + "/5 seeds");
  }
  if (lm_drop < dm_drop + 0.05) {
    outcome.forgetting.fail("forgetting gap too small: linear " + fmt(lm_drop) + " vs dynamic " +
                            fmt(dm_drop));
  }
  if (outcome.seconds >= 600.0) {
    outcome.forgetting.fail("sweep took " + fmt(outcome.seconds, 1) + " s, budget 600");
  }
  if (outcome.forgetting.pass) {
    outcome.forgetting.detail = "ordering " + std::to_string(ordered) + "/5; drop linear " +
                                fmt(lm_drop) + " vs dynamic " + fmt(dm_drop);
  }

  // --- check 7: composition diversity and uncertainty protection ---
  int entropy_wins = 0;
  int retention_wins = 0;
  for (int i = 0; i < kSeeds; ++i) {
    if (dm[i].final_entropy > lm[i].final_entropy) ++entropy_wins;
    bool retained_all = true;
    for (int source_id = 0; source_id < 3; ++source_id) {  // every source but the last
      const auto it = dm[i].final_composition.find(source_id);
      if (it == dm[i].final_composition.end() || it->second < 1) retained_all = false;
    }
    if (retained_all) ++retention_wins;
  }
  int protection_records = 0, protection_violations = 0;
  for (const SweepRun& run : sm) {
    protection_records += run.protection_records;
    protection_violations += run.protection_violations;
  }
  if (entropy_wins < 4) {
    outcome.diversity.fail("dynamic buffer entropy beat linear in only " +
                           std::to_string(entropy_wins) + "/5 seeds");
  }
  if (retention_wins < 4) {
    outcome.diversity.fail("dynamic buffer kept all earlier sources in only " +
                           std::to_string(retention_wins) + "/5 seeds");
  }
  if (protection_violations > 0 || protection_records == 0) {
    outcome.diversity.fail("protected-set uncertainty margin failed at " +
                           std::to_string(protection_violations) + " of " +
                           std::to_string(protection_records + protection_violations) +
                           " records");
  }
  if (outcome.diversity.pass) {
    outcome.diversity.detail = "entropy " + std::to_string(entropy_wins) + "/5; retention " +
                               std::to_string(retention_wins) + "/5; margin held at " +
                               std::to_string(protection_records) + " records";
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 8. single-pass contract

class CountingFeed : public StreamFeed {
 public:
  explicit CountingFeed(std::vector<Sample> samples) : inner_(std::move(samples)) {}

  std::optional<Sample> next() override {
    ++calls_;
    return inner_.next();
  }

  std::int64_t calls() const { return calls_; }

 private:
  VectorFeed inner_;
  std::int64_t calls_ = 0;
};

ExperimentConfig tiny_config(Strategy strategy) {
  ExperimentConfig cfg;
  cfg.strategy = strategy;
  cfg.memory_size = 16;
  cfg.sampling_rate = 2;
  cfg.batch_size = 4;
  cfg.seed = 21;
  cfg.eval_interval = 20;
  cfg.eval_samples_per_source = 4;
  cfg.n_classes = 3;
  cfg.embed_dim = 4;
  for (int d = 0; d < 2; ++d) {
    SourceSpec spec;
    spec.source_id = d;
    spec.n_samples = 30;
    spec.annotated_classes = d == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 2};
    for (int cls : spec.annotated_classes) spec.shapes.emplace(cls, BlobSpec{});
    cfg.sources.push_back(std::move(spec));
  }
  return cfg;
}

CheckOutcome check_single_pass() {
  CheckOutcome outcome;
  const ExperimentConfig cfg = tiny_config(Strategy::kDynamic);
  CountingFeed feed(generate_stream(cfg.sources, cfg.grid, cfg.seed));
  const ExperimentResult result = run_experiment_with_feed(cfg, feed);
  // Exactly one pull per sample plus the end-of-stream probe.
  if (result.samples_seen != 60 || feed.calls() != 61) {
    outcome.fail("60-sample stream: " + std::to_string(feed.calls()) + " pulls for " +
                 std::to_string(result.samples_seen) + " samples");
  } else {
    outcome.detail = "61 pulls for 60 samples (one end-of-stream probe)";
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 9. determinism

CheckOutcome check_determinism() {
  CheckOutcome outcome;
  const auto root = std::filesystem::temp_directory_path() / "streammem_acceptance_determinism";
  std::filesystem::remove_all(root);

  const ExperimentConfig cfg = tiny_config(Strategy::kSelective);
  write_run_artifacts(run_experiment(cfg), root / "a");
  write_run_artifacts(run_experiment(cfg), root / "b");

  for (const char* name : {"metrics.jsonl", "snapshot_source_0.txt", "snapshot_source_1.txt",
                           "snapshot_final.txt", "evictions.log", "summary.json"}) {
    std::ifstream in_a(root / "a" / name, std::ios::binary);
    std::ifstream in_b(root / "b" / name, std::ios::binary);
    std::ostringstream bytes_a, bytes_b;
    bytes_a << in_a.rdbuf();
    bytes_b << in_b.rdbuf();
    if (!in_a.good() || !in_b.good() || bytes_a.str().empty()) {
      outcome.fail(std::string(name) + ": missing or empty");
      break;
    }
    if (bytes_a.str() != bytes_b.str()) {
      outcome.fail(std::string(name) + " differs between identical runs");
      break;
    }
  }
  if (outcome.pass) outcome.detail = "metrics, snapshots, evictions, summary all byte-identical";
  std::filesystem::remove_all(root);
  return outcome;
}

// ---------------------------------------------------------------------------

struct Check {
  int number;
  std::string name;
  double budget_seconds;  // 0 = no budget
  std::function<CheckOutcome()> run;
};

bool report(const Check& check, const CheckOutcome& outcome, double seconds) {
  CheckOutcome final_outcome = outcome;
  if (check.budget_seconds > 0.0 && seconds >= check.budget_seconds) {
    final_outcome.fail("took " + fmt(seconds, 1) + " s, budget " + fmt(check.budget_seconds, 0));
  }
  std::cout << (final_outcome.pass ? "[PASS]" : "[FAIL]") << " check " << check.number << ": "
            << check.name;
  if (!final_outcome.detail.empty()) std::cout << " — " << final_outcome.detail;
  std::cout << " (" << fmt(seconds, 1) << " s)\n";
  std::cout.flush();
  return final_outcome.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    try {
      selected.insert(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: " << argv[0] << " [check numbers...]\n";
      return 2;
    }
  }
  const auto wanted = [&selected](int number) {
    return selected.empty() || selected.count(number) > 0;
  };

  const std::vector<Check> simple_checks = {
      {1, "FIFO buffer keeps exactly the last N arrivals", 5.0, check_fifo},
      {2, "eviction matches the brute-force oracle", 10.0, check_oracle},
      {3, "size-balancing penalty weights", 0.0, check_penalty_weights},
      {4, "uncertainty scoring", 0.0, check_uncertainty},
      {5, "analytic gradients match finite differences", 0.0, check_gradients},
  };

  bool all_pass = true;
  for (const Check& check : simple_checks) {
    if (!wanted(check.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    const CheckOutcome outcome = check.run();
    all_pass = report(check, outcome, seconds_since(start)) && all_pass;
  }

  if (wanted(6) || wanted(7)) {
    const SweepOutcome sweep = run_sweep();
    if (wanted(6)) {
      all_pass = report({6, "Dice ordering and forgetting gap on the 4-source stream", 0.0, {}},
                        sweep.forgetting, sweep.seconds) &&
                 all_pass;
    }
    if (wanted(7)) {
      all_pass = report({7, "buffer diversity and uncertainty protection", 0.0, {}},
                        sweep.diversity, sweep.seconds) &&
                 all_pass;
    }
  }

  const std::vector<Check> closing_checks = {
      {8, "single-pass stream consumption", 0.0, check_single_pass},
      {9, "byte-identical reruns", 0.0, check_determinism},
  };
  for (const Check& check : closing_checks) {
    if (!wanted(check.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    const CheckOutcome outcome = check.run();
    all_pass = report(check, outcome, seconds_since(start)) && all_pass;
  }

  std::cout << (all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
  return all_pass ? 0 : 1;
}
