#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "streammem/rng.hpp"
#include "streammem/sample.hpp"

namespace streammem {

struct GridSpec {
  int height = 16;
  int width = 16;
  int channels = 4;
};

/// Circular blob renderer parameters for one class. Centers are drawn
/// uniformly so the whole disc stays on the grid.
struct BlobSpec {
  double radius_min = 2.0;
  double radius_max = 3.5;
  double intensity = 2.0;
};

/// Generative description of one synthetic site: which classes it renders,
/// which subset it annotates, and how its feature distribution is shifted.
struct SourceSpec {
  int source_id = 0;
  int n_samples = 1;
  std::vector<int> annotated_classes;  // nonempty, subset of shapes' keys
  std::map<int, BlobSpec> shapes;      // classes rendered into the features
  std::vector<double> feature_shift;   // per-channel offset; empty means zero
  double noise_sigma = 0.1;
};

/// Fixed per-class feature directions. For the default 4-channel/6-class
/// setup these are axis vectors plus two sign patterns (pairwise |cos| <= 0.5);
/// other shapes fall back to seeded random unit vectors. Deterministic, and
/// independent of the experiment seed so the task itself does not vary.
std::vector<std::vector<double>> class_signatures(int n_classes, int channels);

/// Renders the sources strictly in order (no shuffling), samples within a
/// source in generation order. Arrival indices are dense from 0 and double as
/// sample ids. Deterministic under the seed (sub-stream "stream-gen").
/// Throws std::invalid_argument on an invalid spec or a grid too small for the
/// requested blob radii.
std::vector<Sample> generate_stream(const std::vector<SourceSpec>& specs, const GridSpec& grid,
                                    std::uint64_t seed);

/// Held-out samples from one source, drawn from the disjoint "eval-gen"
/// sub-stream so they never collide with training arrivals.
std::vector<Sample> generate_eval_set(const SourceSpec& spec, const GridSpec& grid, int n_samples,
                                      std::uint64_t seed);

/// The canonical 4-source / 6-class benchmark stream: chained partial
/// annotation ({0,1,2}, {1,2,3}, {2,3,4}, {3,4,5}), one unannotated class
/// rendered per source, small blobs for classes 4 and 5, and an equal-magnitude
/// feature shift per source along four distinct channel directions.
std::vector<SourceSpec> make_four_site_sources(int samples_per_source = 200);

}  // namespace streammem
