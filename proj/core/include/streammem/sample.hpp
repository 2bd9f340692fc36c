#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "streammem/grid.hpp"

namespace streammem {

/// One stream element. Label grids exist exactly for the classes annotated by
/// the sample's source; everything else in the image is unannotated.
///
/// `embedding` is empty until the learner encodes the sample and unit-norm
/// afterwards. `uncertainty` is absent until first scored.
struct Sample {
  std::int64_t id = -1;
  int source_id = -1;
  std::int64_t arrival_index = -1;
  FeatureGrid features;
  std::map<int, MaskGrid> labels;  // class id -> binary grid, annotated classes only
  std::vector<double> embedding;
  std::optional<double> uncertainty;

  bool has_embedding() const { return !embedding.empty(); }

  /// Annotated class ids, ascending.
  std::vector<int> label_mask() const {
    std::vector<int> mask;
    mask.reserve(labels.size());
    for (const auto& [cls, grid] : labels) mask.push_back(cls);
    return mask;
  }
};

}  // namespace streammem
