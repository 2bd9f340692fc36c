#include "streammem/stream_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace streammem {

namespace {

void validate_spec(const SourceSpec& spec, const GridSpec& grid) {
  if (spec.n_samples < 1) {
    throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                ": n_samples must be >= 1");
  }
  if (spec.annotated_classes.empty()) {
    throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                ": annotated_classes must be nonempty");
  }
  for (int cls : spec.annotated_classes) {
    if (!spec.shapes.count(cls)) {
      throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                  ": annotated class " + std::to_string(cls) +
                                  " has no shape spec");
    }
  }
  for (const auto& [cls, blob] : spec.shapes) {
    if (blob.radius_min <= 0.0 || blob.radius_max < blob.radius_min) {
      throw std::invalid_argument("source " + std::to_string(spec.source_id) + ": class " +
                                  std::to_string(cls) + " has an invalid radius range");
    }
    if (2.0 * blob.radius_max + 1.0 > std::min(grid.height, grid.width)) {
      throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                  ": grid too small to place class " + std::to_string(cls) +
                                  " blobs (radius_max " + std::to_string(blob.radius_max) + ")");
    }
  }
  if (!spec.feature_shift.empty() &&
      spec.feature_shift.size() != static_cast<std::size_t>(grid.channels)) {
    throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                ": feature_shift length does not match channel count");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("source " + std::to_string(spec.source_id) +
                                ": noise_sigma must be >= 0");
  }
}

MaskGrid render_blob(const GridSpec& grid, double cx, double cy, double radius) {
  MaskGrid mask(grid.height, grid.width);
  const double r2 = radius * radius;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      const double dr = r - cy;
      const double dc = c - cx;
      if (dr * dr + dc * dc <= r2) mask.at(r, c) = 1;
    }
  }
  return mask;
}

Sample render_sample(const SourceSpec& spec, const GridSpec& grid,
                     const std::vector<std::vector<double>>& signatures, Rng& rng) {
  Sample s;
  s.source_id = spec.source_id;
  s.features = FeatureGrid(grid.height, grid.width, grid.channels);

  if (!spec.feature_shift.empty()) {
    for (int r = 0; r < grid.height; ++r) {
      for (int c = 0; c < grid.width; ++c) {
        for (int ch = 0; ch < grid.channels; ++ch) {
          s.features.at(r, c, ch) = spec.feature_shift[ch];
        }
      }
    }
  }

  // One blob per rendered class; overlapping blobs add their signatures.
  for (const auto& [cls, blob] : spec.shapes) {
    const double radius = rng.uniform(blob.radius_min, blob.radius_max);
    const double cx = rng.uniform(radius, grid.width - 1 - radius);
    const double cy = rng.uniform(radius, grid.height - 1 - radius);
    MaskGrid mask = render_blob(grid, cx, cy, radius);
    const auto& sig = signatures[static_cast<std::size_t>(cls)];
    for (int r = 0; r < grid.height; ++r) {
      for (int c = 0; c < grid.width; ++c) {
        if (!mask.at(r, c)) continue;
        for (int ch = 0; ch < grid.channels; ++ch) {
          s.features.at(r, c, ch) += blob.intensity * sig[static_cast<std::size_t>(ch)];
        }
      }
    }
    if (std::find(spec.annotated_classes.begin(), spec.annotated_classes.end(), cls) !=
        spec.annotated_classes.end()) {
      s.labels.emplace(cls, std::move(mask));
    }
  }

  if (spec.noise_sigma > 0.0) {
    for (double& v : s.features.data) v += rng.normal(0.0, spec.noise_sigma);
  }
  return s;
}

int max_class_id(const std::vector<SourceSpec>& specs) {
  int max_cls = -1;
  for (const auto& spec : specs) {
    for (const auto& [cls, blob] : spec.shapes) max_cls = std::max(max_cls, cls);
  }
  return max_cls;
}

}  // namespace

std::vector<std::vector<double>> class_signatures(int n_classes, int channels) {
  std::vector<std::vector<double>> sigs;
  sigs.reserve(static_cast<std::size_t>(n_classes));
  if (channels == 4 && n_classes <= 6) {
    const double h = 0.5;
    const std::vector<std::vector<double>> table = {
        {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {h, h, -h, -h}, {h, -h, h, -h}};
    for (int c = 0; c < n_classes; ++c) sigs.push_back(table[static_cast<std::size_t>(c)]);
    return sigs;
  }
  Rng rng = Rng::substream(0x5747u, "class-signatures");
  for (int c = 0; c < n_classes; ++c) {
    std::vector<double> v(static_cast<std::size_t>(channels));
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& x : v) {
        x = rng.normal();
        norm += x * x;
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-6);
    for (double& x : v) x /= norm;
    sigs.push_back(std::move(v));
  }
  return sigs;
}

std::vector<Sample> generate_stream(const std::vector<SourceSpec>& specs, const GridSpec& grid,
                                    std::uint64_t seed) {
  if (specs.empty()) {
    throw std::invalid_argument("generate_stream: no sources");
  }
  for (const auto& spec : specs) validate_spec(spec, grid);
  const auto signatures = class_signatures(max_class_id(specs) + 1, grid.channels);

  Rng rng = Rng::substream(seed, "stream-gen");
  std::vector<Sample> stream;
  std::int64_t arrival = 0;
  for (const auto& spec : specs) {
    for (int k = 0; k < spec.n_samples; ++k) {
      Sample s = render_sample(spec, grid, signatures, rng);
      s.id = arrival;
      s.arrival_index = arrival;
      ++arrival;
      stream.push_back(std::move(s));
    }
  }
  return stream;
}

std::vector<Sample> generate_eval_set(const SourceSpec& spec, const GridSpec& grid, int n_samples,
                                      std::uint64_t seed) {
  validate_spec(spec, grid);
  const auto signatures = class_signatures(max_class_id({spec}) + 1, grid.channels);
  Rng rng = Rng::substream(seed, "eval-gen/" + std::to_string(spec.source_id));
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) {
    Sample s = render_sample(spec, grid, signatures, rng);
    s.id = k;
    s.arrival_index = k;
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<SourceSpec> make_four_site_sources(int samples_per_source) {
  // Chained annotation: consecutive sources share two classes, so training on
  // a later site rewrites boundaries the earlier site still gets tested on.
  // Classes 4 and 5 are small structures and only appear late in the stream.
  const std::vector<std::vector<int>> annotated = {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
  const std::vector<int> extra_rendered = {3, 4, 5, 0};  // present but unannotated

  // Every source is shifted by the same magnitude along its own direction,
  // normalize(e_d + 0.25), so each forms an equally tight embedding cluster
  // (pairwise center cosine ~0.43) and the shift projects onto every class
  // signature, which is what makes a FIFO learner's bias drift between sites.
  const double shift_magnitude = 2.0;

  auto blob_for_class = [](int cls) {
    BlobSpec blob;
    if (cls >= 4) {
      blob.radius_min = 1.0;
      blob.radius_max = 1.7;
    } else {
      blob.radius_min = 2.0;
      blob.radius_max = 3.5;
    }
    return blob;
  };

  std::vector<SourceSpec> specs;
  for (int d = 0; d < 4; ++d) {
    SourceSpec spec;
    spec.source_id = d;
    spec.n_samples = samples_per_source;
    spec.annotated_classes = annotated[static_cast<std::size_t>(d)];
    for (int cls : spec.annotated_classes) spec.shapes.emplace(cls, blob_for_class(cls));
    spec.shapes.emplace(extra_rendered[static_cast<std::size_t>(d)],
                        blob_for_class(extra_rendered[static_cast<std::size_t>(d)]));
    spec.feature_shift.assign(4, 0.25);
    spec.feature_shift[static_cast<std::size_t>(d)] = 1.25;
    double norm = 0.0;
    for (double v : spec.feature_shift) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : spec.feature_shift) v *= shift_magnitude / norm;
    spec.noise_sigma = 0.25;
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace streammem
