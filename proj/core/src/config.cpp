#include "streammem/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace streammem {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : object.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
T require(const json& object, const std::string& key, const std::string& context) {
  if (!object.contains(key)) {
    throw ConfigError("missing key '" + key + "' in " + context);
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value type for '" + key + "' in " + context);
  }
}

template <typename T>
T optional(const json& object, const std::string& key, const std::string& context, T fallback) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value type for '" + key + "' in " + context);
  }
}

BlobSpec blob_from_json(const json& object, const std::string& context) {
  reject_unknown_keys(object, {"radius_min", "radius_max", "intensity"}, context);
  BlobSpec blob;
  blob.radius_min = optional(object, "radius_min", context, blob.radius_min);
  blob.radius_max = optional(object, "radius_max", context, blob.radius_max);
  blob.intensity = optional(object, "intensity", context, blob.intensity);
  return blob;
}

json blob_to_json(const BlobSpec& blob) {
  return json{{"radius_min", blob.radius_min},
              {"radius_max", blob.radius_max},
              {"intensity", blob.intensity}};
}

SourceSpec source_from_json(const json& object, std::size_t index) {
  const std::string context = "sources[" + std::to_string(index) + "]";
  reject_unknown_keys(object,
                      {"source_id", "n_samples", "annotated_classes", "shapes", "feature_shift",
                       "noise_sigma"},
                      context);
  SourceSpec spec;
  spec.source_id = require<int>(object, "source_id", context);
  spec.n_samples = require<int>(object, "n_samples", context);
  spec.annotated_classes = require<std::vector<int>>(object, "annotated_classes", context);
  if (object.contains("shapes")) {
    for (const auto& [key, value] : object.at("shapes").items()) {
      spec.shapes.emplace(std::stoi(key), blob_from_json(value, context + ".shapes." + key));
    }
  } else {
    for (int cls : spec.annotated_classes) spec.shapes.emplace(cls, BlobSpec{});
  }
  spec.feature_shift =
      optional(object, "feature_shift", context, std::vector<double>{});
  spec.noise_sigma = optional(object, "noise_sigma", context, spec.noise_sigma);
  return spec;
}

json source_to_json(const SourceSpec& spec) {
  json shapes = json::object();
  for (const auto& [cls, blob] : spec.shapes) shapes[std::to_string(cls)] = blob_to_json(blob);
  return json{{"source_id", spec.source_id},
              {"n_samples", spec.n_samples},
              {"annotated_classes", spec.annotated_classes},
              {"shapes", shapes},
              {"feature_shift", spec.feature_shift},
              {"noise_sigma", spec.noise_sigma}};
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  reject_unknown_keys(root,
                      {"version", "strategy", "memory_size", "sampling_rate", "protect_fraction",
                       "batch_size", "seed", "eval_interval", "eval_samples_per_source", "grid",
                       "n_classes", "embed_dim", "learning_rate", "ema_momentum", "sources",
                       "output_dir", "dump_stream"},
                      "config");

  ExperimentConfig cfg;
  cfg.version = require<int>(root, "version", "config");
  if (cfg.version != 1) {
    throw ConfigError("unsupported config version " + std::to_string(cfg.version));
  }
  try {
    cfg.strategy = strategy_from_string(require<std::string>(root, "strategy", "config"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("field strategy: ") + err.what());
  }
  cfg.memory_size = require<int>(root, "memory_size", "config");
  cfg.sampling_rate = require<int>(root, "sampling_rate", "config");
  cfg.protect_fraction = optional(root, "protect_fraction", "config", 0.0);
  cfg.batch_size = optional(root, "batch_size", "config", cfg.batch_size);
  cfg.seed = require<std::uint64_t>(root, "seed", "config");
  cfg.eval_interval = optional(root, "eval_interval", "config", cfg.eval_interval);
  cfg.eval_samples_per_source =
      optional(root, "eval_samples_per_source", "config", cfg.eval_samples_per_source);
  if (root.contains("grid")) {
    const json& grid = root.at("grid");
    reject_unknown_keys(grid, {"height", "width", "channels"}, "grid");
    cfg.grid.height = require<int>(grid, "height", "grid");
    cfg.grid.width = require<int>(grid, "width", "grid");
    cfg.grid.channels = require<int>(grid, "channels", "grid");
  }
  cfg.n_classes = optional(root, "n_classes", "config", cfg.n_classes);
  cfg.embed_dim = optional(root, "embed_dim", "config", cfg.embed_dim);
  cfg.learning_rate = optional(root, "learning_rate", "config", cfg.learning_rate);
  cfg.ema_momentum = optional(root, "ema_momentum", "config", cfg.ema_momentum);
  const json& sources = root.contains("sources") ? root.at("sources") : json::array();
  if (!sources.is_array()) {
    throw ConfigError("field sources must be an array");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    cfg.sources.push_back(source_from_json(sources[i], i));
  }
  cfg.output_dir = optional(root, "output_dir", "config", std::string{});
  cfg.dump_stream = optional(root, "dump_stream", "config", false);
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  json sources = json::array();
  for (const auto& spec : config.sources) sources.push_back(source_to_json(spec));
  const json root{{"version", config.version},
                  {"strategy", to_string(config.strategy)},
                  {"memory_size", config.memory_size},
                  {"sampling_rate", config.sampling_rate},
                  {"protect_fraction", config.protect_fraction},
                  {"batch_size", config.batch_size},
                  {"seed", config.seed},
                  {"eval_interval", config.eval_interval},
                  {"eval_samples_per_source", config.eval_samples_per_source},
                  {"grid", {{"height", config.grid.height},
                            {"width", config.grid.width},
                            {"channels", config.grid.channels}}},
                  {"n_classes", config.n_classes},
                  {"embed_dim", config.embed_dim},
                  {"learning_rate", config.learning_rate},
                  {"ema_momentum", config.ema_momentum},
                  {"sources", sources},
                  {"output_dir", config.output_dir.string()},
                  {"dump_stream", config.dump_stream}};
  return root.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& config) {
  if (config.batch_size < 1) {
    throw ConfigError("field batch_size: must be >= 1");
  }
  if (config.memory_size < config.batch_size) {
    throw ConfigError("field memory_size: must be >= batch_size");
  }
  if (config.sampling_rate < 1) {
    throw ConfigError("field sampling_rate: S must be >= 1");
  }
  if (config.protect_fraction < 0.0 || config.protect_fraction > 1.0) {
    throw ConfigError("field protect_fraction: K outside [0, 1]");
  }
  if (config.eval_interval < 1) {
    throw ConfigError("field eval_interval: must be >= 1");
  }
  if (config.eval_samples_per_source < 1) {
    throw ConfigError("field eval_samples_per_source: must be >= 1");
  }
  if (config.grid.height < 1 || config.grid.width < 1 || config.grid.channels < 1) {
    throw ConfigError("field grid: dimensions must be positive");
  }
  if (config.n_classes < 1) {
    throw ConfigError("field n_classes: must be >= 1");
  }
  if (config.embed_dim < 1) {
    throw ConfigError("field embed_dim: must be >= 1");
  }
  if (config.learning_rate <= 0.0) {
    throw ConfigError("field learning_rate: must be > 0");
  }
  if (config.ema_momentum <= 0.0 || config.ema_momentum >= 1.0) {
    throw ConfigError("field ema_momentum: must lie in (0, 1)");
  }
  if (config.sources.empty()) {
    throw ConfigError("field sources: at least one source is required");
  }
  std::set<int> seen;
  for (const auto& spec : config.sources) {
    if (!seen.insert(spec.source_id).second) {
      throw ConfigError("field sources: duplicate source_id " + std::to_string(spec.source_id));
    }
    for (int cls : spec.annotated_classes) {
      if (cls < 0 || cls >= config.n_classes) {
        throw ConfigError("field sources: class " + std::to_string(cls) +
                          " outside [0, n_classes)");
      }
    }
    for (const auto& [cls, blob] : spec.shapes) {
      if (cls < 0 || cls >= config.n_classes) {
        throw ConfigError("field sources: shape class " + std::to_string(cls) +
                          " outside [0, n_classes)");
      }
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg = config_from_json_text(text.str());
  validate_config(cfg);
  return cfg;
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write config file " + path.string());
  }
  out << config_to_json_text(config);
}

bool same_stream_setup(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto stream_view = [](const ExperimentConfig& cfg) {
    json sources = json::array();
    for (const auto& spec : cfg.sources) sources.push_back(source_to_json(spec));
    return json{{"grid", {{"height", cfg.grid.height},
                          {"width", cfg.grid.width},
                          {"channels", cfg.grid.channels}}},
                {"n_classes", cfg.n_classes},
                {"sources", sources}}
        .dump();
  };
  return stream_view(a) == stream_view(b);
}

}  // namespace streammem
