#include "streammem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace streammem {

MaskGrid binarize(const ProbGrid& probs, double threshold) {
  MaskGrid mask(probs.height, probs.width);
  for (std::size_t i = 0; i < probs.data.size(); ++i) {
    mask.data[i] = static_cast<std::uint8_t>(probs.data[i] >= threshold);
  }
  return mask;
}

double dice_score(const MaskGrid& pred, const MaskGrid& ground_truth) {
  if (!pred.same_shape(ground_truth)) {
    throw std::invalid_argument("dice_score: shape mismatch");
  }
  std::int64_t p = 0, g = 0, both = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool pv = pred.data[i] != 0;
    const bool gv = ground_truth.data[i] != 0;
    p += pv;
    g += gv;
    both += pv && gv;
  }
  if (p + g == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + g);
}

double composition_entropy(const std::map<int, std::int64_t>& composition) {
  std::int64_t total = 0;
  for (const auto& [source, count] : composition) {
    if (count < 0) {
      throw std::invalid_argument("composition_entropy: negative count for source " +
                                  std::to_string(source));
    }
    total += count;
  }
  if (total == 0) {
    throw std::invalid_argument("composition_entropy: empty composition");
  }
  double entropy = 0.0;
  for (const auto& [source, count] : composition) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  return entropy;
}

double forgetting_drop(const SourceDiceSeries& series, std::int64_t t) {
  if (series.points.empty()) {
    throw std::invalid_argument("forgetting_drop: empty series");
  }
  double peak = 0.0;
  for (const auto& [arrival, dice] : series.points) {
    if (arrival <= series.segment_end) peak = std::max(peak, dice);
  }
  if (peak <= 0.0) return 0.0;

  bool found = false;
  double at_t = 0.0;
  for (const auto& [arrival, dice] : series.points) {
    if (arrival <= t) {
      at_t = dice;
      found = true;
    }
  }
  if (!found) {
    throw std::invalid_argument("forgetting_drop: t precedes the first observation");
  }
  return std::clamp((peak - at_t) / peak, 0.0, 1.0);
}

double mean_source_dice(const MetricsRecord& record, int source_id) {
  const auto it = record.dice.find(source_id);
  if (it == record.dice.end() || it->second.empty()) {
    throw std::invalid_argument("mean_source_dice: unknown source " + std::to_string(source_id));
  }
  double sum = 0.0;
  for (const auto& [cls, dice] : it->second) sum += dice;
  return sum / static_cast<double>(it->second.size());
}

SourceDiceSeries source_series(const std::vector<MetricsRecord>& records, int source_id,
                               std::int64_t segment_end) {
  SourceDiceSeries series;
  series.segment_end = segment_end;
  for (const auto& record : records) {
    series.points.emplace_back(record.arrival_index, mean_source_dice(record, source_id));
  }
  return series;
}

double final_average_dice(const std::vector<MetricsRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("final_average_dice: no records");
  }
  const MetricsRecord& last = records.back();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [source, per_class] : last.dice) {
    for (const auto& [cls, dice] : per_class) {
      sum += dice;
      ++n;
    }
  }
  if (n == 0) {
    throw std::invalid_argument("final_average_dice: final record holds no Dice values");
  }
  return sum / static_cast<double>(n);
}

}  // namespace streammem
