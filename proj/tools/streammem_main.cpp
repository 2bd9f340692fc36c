#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streammem/artifacts.hpp"
#include "streammem/config.hpp"
#include "streammem/metrics.hpp"
#include "streammem/runner.hpp"
#include "streammem/snapshot.hpp"

namespace fs = std::filesystem;

namespace {

/// Relative output paths land under STREAMMEM_OUTPUT_ROOT when it is set.
fs::path resolve_output_dir(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("STREAMMEM_OUTPUT_ROOT")) {
    return fs::path(root) / dir;
  }
  return dir;
}

void print_snapshot(const streammem::BufferSnapshot& snapshot) {
  std::cout << "strategy          " << streammem::to_string(snapshot.strategy) << "\n";
  std::cout << "capacity          " << snapshot.capacity << "\n";
  std::cout << "protect_fraction  " << snapshot.protect_fraction << "\n";
  std::cout << "entries           " << snapshot.entries.size() << "\n";
  if (snapshot.entries.empty()) return;

  std::map<int, std::int64_t> composition;
  std::int64_t arrival_min = snapshot.entries.front().arrival_index;
  std::int64_t arrival_max = arrival_min;
  double uncertainty_sum = 0.0;
  std::int64_t uncertainty_count = 0;
  for (const auto& entry : snapshot.entries) {
    ++composition[entry.source_id];
    arrival_min = std::min(arrival_min, entry.arrival_index);
    arrival_max = std::max(arrival_max, entry.arrival_index);
    if (entry.uncertainty) {
      uncertainty_sum += *entry.uncertainty;
      ++uncertainty_count;
    }
  }
  std::cout << "arrival range     [" << arrival_min << ", " << arrival_max << "]\n";
  if (uncertainty_count > 0) {
    std::cout << "mean uncertainty  " << uncertainty_sum / uncertainty_count << "\n";
  }
  std::cout << "per-source counts:\n";
  for (const auto& [source_id, count] : composition) {
    std::cout << "  source " << source_id << ": " << count << " ("
              << 100.0 * count / snapshot.entries.size() << "%)\n";
  }
  std::cout << "composition entropy " << streammem::composition_entropy(composition) << " nats\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replay-memory experiments on synthetic non-stationary streams"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "execute one experiment from a config file");
  std::string config_path;
  run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
  std::string strategy;
  auto* strategy_opt =
      run_cmd->add_option("--strategy", strategy, "override: linear | dynamic | selective");
  int memory_size = 0;
  auto* memory_opt = run_cmd->add_option("--memory-size", memory_size, "override: capacity N");
  int sampling_rate = 0;
  auto* rate_opt =
      run_cmd->add_option("--sampling-rate", sampling_rate, "override: mini-batches per arrival");
  double protect_fraction = 0.0;
  auto* protect_opt = run_cmd->add_option("--protect-fraction", protect_fraction,
                                          "override: protected uncertainty fraction K");
  int batch_size = 0;
  auto* batch_opt = run_cmd->add_option("--batch-size", batch_size, "override: mini-batch size");
  std::uint64_t seed = 0;
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override: experiment seed");
  int eval_interval = 0;
  auto* eval_opt =
      run_cmd->add_option("--eval-interval", eval_interval, "override: arrivals between records");
  std::string output_dir;
  auto* output_opt =
      run_cmd->add_option("--output-dir", output_dir, "override: artifact directory");
  bool dump_stream = false;
  auto* dump_opt =
      run_cmd->add_flag("--dump-stream", dump_stream, "also persist the generated stream");
  bool quiet = false;
  run_cmd->add_flag("--quiet", quiet, "suppress the summary printout");

  auto* compare_cmd = app.add_subcommand("compare", "side-by-side report over completed runs");
  std::vector<std::string> run_dirs;
  compare_cmd->add_option("dirs", run_dirs, "two or more run directories")->required();
  bool as_json = false;
  compare_cmd->add_flag("--json", as_json, "emit the machine-readable report");

  auto* inspect_cmd = app.add_subcommand("inspect-buffer", "pretty-print a buffer snapshot");
  std::string snapshot_path;
  inspect_cmd->add_option("snapshot", snapshot_path, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (run_cmd->parsed()) {
      streammem::ExperimentConfig config = streammem::load_config(config_path);
      if (strategy_opt->count()) config.strategy = streammem::strategy_from_string(strategy);
      if (memory_opt->count()) config.memory_size = memory_size;
      if (rate_opt->count()) config.sampling_rate = sampling_rate;
      if (protect_opt->count()) config.protect_fraction = protect_fraction;
      if (batch_opt->count()) config.batch_size = batch_size;
      if (seed_opt->count()) config.seed = seed;
      if (eval_opt->count()) config.eval_interval = eval_interval;
      if (output_opt->count()) config.output_dir = output_dir;
      if (dump_opt->count()) config.dump_stream = dump_stream;
      streammem::validate_config(config);
      if (config.output_dir.empty()) {
        throw streammem::ConfigError(
            "field output_dir: required for run (set it in the config or via --output-dir)");
      }
      config.output_dir = resolve_output_dir(config.output_dir);

      const streammem::ExperimentResult result = streammem::run_experiment(config);
      streammem::write_run_artifacts(result, config.output_dir);
      if (!quiet) {
        std::cout << "artifacts written to " << config.output_dir.string() << "\n\n";
        std::ifstream summary(config.output_dir / "summary.txt");
        std::cout << summary.rdbuf();
      }
    } else if (compare_cmd->parsed()) {
      std::vector<streammem::RunArtifacts> runs;
      runs.reserve(run_dirs.size());
      for (const std::string& dir : run_dirs) {
        runs.push_back(streammem::load_run_dir(resolve_output_dir(dir)));
      }
      const streammem::ComparisonReport report = streammem::compare_runs(runs);
      std::cout << (as_json ? report.machine_json : report.text);
    } else if (inspect_cmd->parsed()) {
      print_snapshot(streammem::load_buffer_snapshot(snapshot_path));
    }
  } catch (const streammem::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
