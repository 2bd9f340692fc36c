#include "streammem/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "streammem/snapshot.hpp"

namespace streammem {

namespace {

using nlohmann::json;

constexpr char kEvictionsHeader[] = "# streammem-evictions v1";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

std::string format_double(double value, int width, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, value);
  return buf;
}

/// source -> class -> Dice of the last record; empty when no records exist.
std::map<int, std::map<int, double>> final_dice(const std::vector<MetricsRecord>& records) {
  return records.empty() ? std::map<int, std::map<int, double>>{} : records.back().dice;
}

/// Mean final Dice per class across the sources annotating it.
std::map<int, double> final_dice_by_class(const std::vector<MetricsRecord>& records) {
  std::map<int, double> sum;
  std::map<int, int> count;
  for (const auto& [source_id, per_class] : final_dice(records)) {
    for (const auto& [cls, dice] : per_class) {
      sum[cls] += dice;
      ++count[cls];
    }
  }
  std::map<int, double> mean;
  for (const auto& [cls, total] : sum) mean[cls] = total / count[cls];
  return mean;
}

double safe_entropy(const std::map<int, std::int64_t>& composition) {
  std::int64_t total = 0;
  for (const auto& [source_id, count] : composition) total += count;
  return total > 0 ? composition_entropy(composition) : 0.0;
}

json summary_json(const ExperimentResult& result) {
  json drops = json::object();
  for (const auto& [source_id, drop] : final_forgetting_drops(result.config, result.records)) {
    drops[std::to_string(source_id)] = drop;
  }
  json dice = json::object();
  for (const auto& [source_id, per_class] : final_dice(result.records)) {
    json row = json::object();
    for (const auto& [cls, value] : per_class) row[std::to_string(cls)] = value;
    dice[std::to_string(source_id)] = row;
  }
  const double entropy =
      result.records.empty() ? 0.0 : safe_entropy(result.records.back().buffer_composition);
  return json{{"schema_version", 1},
              {"strategy", to_string(result.config.strategy)},
              {"seed", result.config.seed},
              {"samples_seen", result.samples_seen},
              {"final_average_dice", result.final_average_dice},
              {"mean_forgetting_drop", mean_forgetting_drop(result.config, result.records)},
              {"final_composition_entropy", entropy},
              {"forgetting_drop", drops},
              {"final_dice", dice}};
}

std::string summary_text(const ExperimentResult& result) {
  std::ostringstream out;
  out << "run summary\n";
  out << "  strategy            " << to_string(result.config.strategy) << "\n";
  out << "  seed                " << result.config.seed << "\n";
  out << "  samples seen        " << result.samples_seen << "\n";
  out << "  final average Dice  " << format_double(result.final_average_dice, 0, 4) << "\n";
  out << "\nfinal Dice on held-out data (rows: source, cols: class):\n";
  out << "  source";
  for (int cls = 0; cls < result.config.n_classes; ++cls) {
    std::string head = "c" + std::to_string(cls);
    out << std::string(8 - head.size(), ' ') << head;
  }
  out << "    mean\n";
  for (const auto& [source_id, per_class] : final_dice(result.records)) {
    out << format_double(source_id, 8, 0);
    double sum = 0.0;
    for (int cls = 0; cls < result.config.n_classes; ++cls) {
      auto it = per_class.find(cls);
      if (it == per_class.end()) {
        out << "       -";
      } else {
        out << format_double(it->second, 8, 4);
        sum += it->second;
      }
    }
    out << format_double(per_class.empty() ? 0.0 : sum / per_class.size(), 8, 4) << "\n";
  }
  out << "\nforgetting drop at stream end (peak-relative):\n";
  for (const auto& [source_id, drop] : final_forgetting_drops(result.config, result.records)) {
    out << "  source " << source_id << "  " << format_double(drop, 0, 4) << "\n";
  }
  out << "  mean over earlier sources  "
      << format_double(mean_forgetting_drop(result.config, result.records), 0, 4) << "\n";
  if (!result.records.empty()) {
    out << "\nfinal buffer composition:";
    for (const auto& [source_id, count] : result.records.back().buffer_composition) {
      out << "  " << source_id << ":" << count;
    }
    out << "  (entropy "
        << format_double(safe_entropy(result.records.back().buffer_composition), 0, 4) << ")\n";
  }
  return out.str();
}

}  // namespace

std::string format_metrics_record(const MetricsRecord& record) {
  json dice = json::object();
  for (const auto& [source_id, per_class] : record.dice) {
    json row = json::object();
    for (const auto& [cls, value] : per_class) row[std::to_string(cls)] = value;
    dice[std::to_string(source_id)] = row;
  }
  json composition = json::object();
  for (const auto& [source_id, count] : record.buffer_composition) {
    composition[std::to_string(source_id)] = count;
  }
  return json{{"schema_version", 1},
              {"arrival_index", record.arrival_index},
              {"dice", dice},
              {"buffer_composition", composition},
              {"mean_buffer_uncertainty", record.mean_buffer_uncertainty},
              {"loss", record.loss}}
      .dump();
}

MetricsRecord parse_metrics_record(const std::string& line) {
  json root;
  try {
    root = json::parse(line);
  } catch (const json::parse_error& err) {
    throw std::runtime_error(std::string("bad metrics record: ") + err.what());
  }
  if (root.value("schema_version", 0) != 1) {
    throw std::runtime_error("bad metrics record: unsupported schema version");
  }
  MetricsRecord record;
  try {
    record.arrival_index = root.at("arrival_index").get<std::int64_t>();
    for (const auto& [source_key, row] : root.at("dice").items()) {
      for (const auto& [class_key, value] : row.items()) {
        record.dice[std::stoi(source_key)][std::stoi(class_key)] = value.get<double>();
      }
    }
    for (const auto& [source_key, count] : root.at("buffer_composition").items()) {
      record.buffer_composition[std::stoi(source_key)] = count.get<std::int64_t>();
    }
    record.mean_buffer_uncertainty = root.at("mean_buffer_uncertainty").get<double>();
    record.loss = root.at("loss").get<double>();
  } catch (const json::exception& err) {
    throw std::runtime_error(std::string("bad metrics record: ") + err.what());
  }
  return record;
}

void write_run_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_config(result.config, dir / "config.json");

  std::ostringstream metrics;
  for (const MetricsRecord& record : result.records) {
    metrics << format_metrics_record(record) << "\n";
  }
  write_file(dir / "metrics.jsonl", metrics.str());

  std::ostringstream evictions;
  evictions << kEvictionsHeader << "\n";
  for (const EvictionEvent& event : result.evictions) {
    evictions << event.arrival_index << " " << event.inserted_id << " " << event.evicted_id
              << "\n";
  }
  write_file(dir / "evictions.log", evictions.str());

  for (const BoundarySnapshot& boundary : result.boundary_snapshots) {
    save_buffer_snapshot(boundary.buffer,
                         dir / ("snapshot_source_" + std::to_string(boundary.source_id) + ".txt"));
  }
  save_buffer_snapshot(result.final_buffer, dir / "snapshot_final.txt");

  write_file(dir / "summary.json", summary_json(result).dump(2) + "\n");
  write_file(dir / "summary.txt", summary_text(result));

  if (result.config.dump_stream) {
    StreamDump dump;
    dump.height = result.config.grid.height;
    dump.width = result.config.grid.width;
    dump.channels = result.config.grid.channels;
    dump.n_classes = result.config.n_classes;
    dump.samples = result.stream_copy;
    save_stream_dump(dump, dir / "stream.txt");
  }
}

RunArtifacts load_run_dir(const std::filesystem::path& dir) {
  RunArtifacts run;
  run.dir = dir;
  // A missing or unreadable run directory is an I/O failure, not a config
  // mistake; keep the error type uniform with the other artifact readers.
  if (!std::filesystem::exists(dir / "config.json")) {
    throw std::runtime_error("not a run directory (no config.json): " + dir.string());
  }
  run.config = load_config(dir / "config.json");

  std::istringstream metrics(read_file(dir / "metrics.jsonl"));
  std::string line;
  while (std::getline(metrics, line)) {
    if (line.empty()) continue;
    run.records.push_back(parse_metrics_record(line));
  }

  std::istringstream evictions(read_file(dir / "evictions.log"));
  if (!std::getline(evictions, line) || line != kEvictionsHeader) {
    throw std::runtime_error("bad evictions log header in " + dir.string());
  }
  while (std::getline(evictions, line)) {
    if (line.empty()) continue;
    EvictionEvent event;
    std::istringstream fields(line);
    if (!(fields >> event.arrival_index >> event.inserted_id >> event.evicted_id)) {
      throw std::runtime_error("bad evictions log line in " + dir.string() + ": " + line);
    }
    run.evictions.push_back(event);
  }

  run.final_buffer = load_buffer_snapshot(dir / "snapshot_final.txt");

  json summary;
  try {
    summary = json::parse(read_file(dir / "summary.json"));
    run.final_average_dice = summary.at("final_average_dice").get<double>();
    run.samples_seen = summary.at("samples_seen").get<std::int64_t>();
  } catch (const json::exception& err) {
    throw std::runtime_error("bad summary.json in " + dir.string() + ": " + err.what());
  }
  return run;
}

std::map<int, std::int64_t> segment_ends(const ExperimentConfig& config) {
  std::map<int, std::int64_t> ends;
  std::int64_t cumulative = 0;
  for (const SourceSpec& spec : config.sources) {
    cumulative += spec.n_samples;
    ends[spec.source_id] = cumulative - 1;
  }
  return ends;
}

std::map<int, double> final_forgetting_drops(const ExperimentConfig& config,
                                             const std::vector<MetricsRecord>& records) {
  std::map<int, double> drops;
  if (records.empty()) return drops;
  const std::int64_t final_t = records.back().arrival_index;
  for (const auto& [source_id, end] : segment_ends(config)) {
    if (!records.back().dice.count(source_id)) continue;
    drops[source_id] = forgetting_drop(source_series(records, source_id, end), final_t);
  }
  return drops;
}

double mean_forgetting_drop(const ExperimentConfig& config,
                            const std::vector<MetricsRecord>& records) {
  if (config.sources.size() < 2) return 0.0;
  const int last_source = config.sources.back().source_id;
  const std::map<int, double> drops = final_forgetting_drops(config, records);
  double sum = 0.0;
  int count = 0;
  for (const auto& [source_id, drop] : drops) {
    if (source_id == last_source) continue;
    sum += drop;
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

ComparisonReport compare_runs(const std::vector<RunArtifacts>& runs) {
  if (runs.size() < 2) {
    throw std::invalid_argument("compare needs at least two run directories");
  }
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (!same_stream_setup(runs[0].config, runs[i].config)) {
      throw std::invalid_argument("stream setup mismatch between " + runs[0].dir.string() +
                                  " and " + runs[i].dir.string());
    }
  }

  ComparisonReport report;
  for (const RunArtifacts& run : runs) {
    report.seed_mismatch = report.seed_mismatch || run.config.seed != runs[0].config.seed;
  }

  // Rank by final average Dice, best first; ties keep argument order.
  std::vector<const RunArtifacts*> ranked;
  for (const RunArtifacts& run : runs) ranked.push_back(&run);
  std::stable_sort(ranked.begin(), ranked.end(), [](const RunArtifacts* a, const RunArtifacts* b) {
    return a->final_average_dice > b->final_average_dice;
  });

  auto label_of = [](const RunArtifacts& run) {
    return run.dir.filename().string() + " [" + to_string(run.config.strategy) +
           " seed=" + std::to_string(run.config.seed) + "]";
  };
  std::size_t label_width = 0;
  for (const RunArtifacts& run : runs) label_width = std::max(label_width, label_of(run).size());

  const int n_classes = runs[0].config.n_classes;
  std::ostringstream text;
  json machine_runs = json::array();

  text << "comparison over " << runs.size() << " runs";
  if (report.seed_mismatch) text << " (warning: seeds differ)";
  text << "\n\nfinal Dice by class, ranked by average:\n";
  text << "  " << std::string(label_width, ' ');
  for (int cls = 0; cls < n_classes; ++cls) text << "      c" << cls;
  text << "     avg\n";
  for (const RunArtifacts* run : ranked) {
    const std::map<int, double> by_class = final_dice_by_class(run->records);
    std::string label = label_of(*run);
    label.resize(label_width, ' ');
    text << "  " << label;
    for (int cls = 0; cls < n_classes; ++cls) {
      auto it = by_class.find(cls);
      if (it == by_class.end()) {
        text << "       -";
      } else {
        text << format_double(it->second, 8, 4);
      }
    }
    text << format_double(run->final_average_dice, 8, 4) << "\n";
  }

  text << "\nforgetting drop at stream end (peak-relative; mean excludes the last source):\n";
  for (const RunArtifacts* run : ranked) {
    const std::map<int, double> drops = final_forgetting_drops(run->config, run->records);
    std::string label = label_of(*run);
    label.resize(label_width, ' ');
    text << "  " << label;
    for (const auto& [source_id, drop] : drops) {
      text << "  s" << source_id << "=" << format_double(drop, 0, 4);
    }
    text << "  mean=" << format_double(mean_forgetting_drop(run->config, run->records), 0, 4)
         << "\n";
  }

  text << "\ncomposition entropy per evaluation:\n  arrival";
  for (const RunArtifacts* run : ranked) {
    std::string label = label_of(*run);
    text << "  " << label;
  }
  text << "\n";
  std::size_t max_records = 0;
  for (const RunArtifacts& run : runs) max_records = std::max(max_records, run.records.size());
  for (std::size_t i = 0; i < max_records; ++i) {
    text << format_double(
        i < ranked[0]->records.size() ? ranked[0]->records[i].arrival_index : -1, 9, 0);
    for (const RunArtifacts* run : ranked) {
      const std::size_t width = label_of(*run).size() + 2;
      if (i < run->records.size()) {
        text << format_double(safe_entropy(run->records[i].buffer_composition),
                              static_cast<int>(width), 4);
      } else {
        text << std::string(width - 1, ' ') << "-";
      }
    }
    text << "\n";
  }

  for (const RunArtifacts* run : ranked) {
    json drops = json::object();
    for (const auto& [source_id, drop] : final_forgetting_drops(run->config, run->records)) {
      drops[std::to_string(source_id)] = drop;
    }
    json by_class = json::object();
    for (const auto& [cls, dice] : final_dice_by_class(run->records)) {
      by_class[std::to_string(cls)] = dice;
    }
    json entropy_series = json::array();
    for (const MetricsRecord& record : run->records) {
      entropy_series.push_back(
          json::array({record.arrival_index, safe_entropy(record.buffer_composition)}));
    }
    machine_runs.push_back(json{{"dir", run->dir.string()},
                                {"strategy", to_string(run->config.strategy)},
                                {"seed", run->config.seed},
                                {"final_average_dice", run->final_average_dice},
                                {"final_dice_by_class", by_class},
                                {"forgetting_drop", drops},
                                {"mean_forgetting_drop",
                                 mean_forgetting_drop(run->config, run->records)},
                                {"composition_entropy", entropy_series}});
  }

  report.text = text.str();
  report.machine_json = json{{"schema_version", 1},
                             {"seed_mismatch", report.seed_mismatch},
                             {"runs", machine_runs}}
                            .dump(2) +
                        "\n";
  return report;
}

}  // namespace streammem
