#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "streammem/grid.hpp"

namespace streammem {

/// One timestamped observation of an experiment.
struct MetricsRecord {
  std::int64_t arrival_index = 0;
  std::map<int, std::map<int, double>> dice;       // source -> class -> Dice on held-out data
  std::map<int, std::int64_t> buffer_composition;  // source -> entry count
  double mean_buffer_uncertainty = 0.0;
  double loss = 0.0;  // mean training loss since the previous record
};

MaskGrid binarize(const ProbGrid& probs, double threshold = 0.5);

/// 2|P n G| / (|P| + |G|); 1.0 when both masks are empty.
/// Throws std::invalid_argument on shape mismatch.
double dice_score(const MaskGrid& pred, const MaskGrid& ground_truth);

/// Shannon entropy (nats) of the normalized composition counts.
/// Throws std::invalid_argument when the total count is zero.
double composition_entropy(const std::map<int, std::int64_t>& composition);

/// Dice trajectory of one source with the arrival index at which its stream
/// segment ended; the forgetting baseline is the peak Dice up to that point.
struct SourceDiceSeries {
  std::vector<std::pair<std::int64_t, double>> points;  // (arrival_index, mean Dice)
  std::int64_t segment_end = 0;
};

/// Relative Dice drop at time t: (peak - dice(t)) / peak, clipped to [0, 1],
/// where peak is the best Dice observed up to the source's segment end and
/// dice(t) is the latest observation at or before t. 0 when the peak is 0.
/// Throws std::invalid_argument on an empty series or t before the first point.
double forgetting_drop(const SourceDiceSeries& series, std::int64_t t);

/// Mean Dice over one source's annotated classes in one record.
/// Throws std::invalid_argument for a source absent from the record.
double mean_source_dice(const MetricsRecord& record, int source_id);

/// Per-source Dice trajectory extracted from a record sequence.
SourceDiceSeries source_series(const std::vector<MetricsRecord>& records, int source_id,
                               std::int64_t segment_end);

/// Mean Dice over every (source, class) pair of the last record.
double final_average_dice(const std::vector<MetricsRecord>& records);

}  // namespace streammem
