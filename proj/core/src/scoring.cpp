#include "streammem/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace streammem {

namespace {

constexpr double kZeroNorm = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < kZeroNorm || nb < kZeroNorm) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  return dot / (na * nb);
}

std::vector<double> update_embedding_ema(std::span<const double> old_embedding,
                                         std::span<const double> fresh_embedding,
                                         const EmaConfig& cfg) {
  if (cfg.momentum <= 0.0 || cfg.momentum >= 1.0) {
    throw std::invalid_argument("update_embedding_ema: momentum must lie in (0, 1)");
  }
  if (old_embedding.size() != fresh_embedding.size()) {
    throw std::invalid_argument("update_embedding_ema: dimension mismatch");
  }
  std::vector<double> blended(old_embedding.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < blended.size(); ++i) {
    blended[i] = cfg.momentum * old_embedding[i] + (1.0 - cfg.momentum) * fresh_embedding[i];
    norm += blended[i] * blended[i];
  }
  norm = std::sqrt(norm);
  if (norm < kZeroNorm) {
    return std::vector<double>(fresh_embedding.begin(), fresh_embedding.end());
  }
  for (double& v : blended) v /= norm;
  return blended;
}

PenaltyVector normalized_size_weights(const std::map<int, std::int64_t>& sizes) {
  if (sizes.empty()) {
    throw std::invalid_argument("structure_penalty: no annotated structures (m = 0)");
  }
  double size_total = 0.0;
  for (const auto& [cls, size] : sizes) {
    if (size < 1) {
      throw std::invalid_argument("structure_penalty: class " + std::to_string(cls) +
                                  " has size < 1");
    }
    size_total += static_cast<double>(size);
  }
  const double m = static_cast<double>(sizes.size());
  std::map<int, double> raw;
  double raw_total = 0.0;
  for (const auto& [cls, size] : sizes) {
    const double r = size_total / static_cast<double>(size);
    raw.emplace(cls, r);
    raw_total += r;
  }
  // (raw * m) / raw_total rather than (raw / raw_total) * m: with equal sizes
  // numerator and denominator are the same double, so alpha comes out exactly 1.
  PenaltyVector hat;
  for (const auto& [cls, r] : raw) {
    hat.emplace(cls, (r * m) / raw_total);
  }
  return hat;
}

PenaltyVector structure_penalty_from_sizes(const std::map<int, std::int64_t>& sizes) {
  PenaltyVector alpha = normalized_size_weights(sizes);
  for (auto& [cls, hat] : alpha) {
    if (hat < 1.0 && hat > 0.0) hat = 1.0;
  }
  return alpha;
}

PenaltyVector structure_penalty(const std::map<int, MaskGrid>& ground_truth) {
  std::map<int, std::int64_t> sizes;
  for (const auto& [cls, grid] : ground_truth) {
    const std::int64_t n = positive_count(grid);
    if (n > 0) sizes.emplace(cls, n);
  }
  return structure_penalty_from_sizes(sizes);
}

double weighted_bce_uncertainty(const std::map<int, ProbGrid>& pred,
                                const std::map<int, MaskGrid>& ground_truth,
                                const std::vector<int>& mask,
                                const PenaltyVector& alpha) {
  for (const auto& [cls, weight] : alpha) {
    if (std::find(mask.begin(), mask.end(), cls) == mask.end()) {
      throw std::invalid_argument("weighted_bce_uncertainty: alpha class " +
                                  std::to_string(cls) + " missing from mask");
    }
  }
  double total = 0.0;
  for (int cls : mask) {
    const auto pred_it = pred.find(cls);
    const auto gt_it = ground_truth.find(cls);
    if (pred_it == pred.end() || gt_it == ground_truth.end()) {
      throw std::invalid_argument("weighted_bce_uncertainty: class " + std::to_string(cls) +
                                  " missing from prediction or ground truth");
    }
    const auto alpha_it = alpha.find(cls);
    if (alpha_it == alpha.end()) {
      throw std::invalid_argument("weighted_bce_uncertainty: no alpha for mask class " +
                                  std::to_string(cls));
    }
    const ProbGrid& p = pred_it->second;
    const MaskGrid& g = gt_it->second;
    if (p.height != g.height || p.width != g.width) {
      throw std::invalid_argument("weighted_bce_uncertainty: shape mismatch for class " +
                                  std::to_string(cls));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double pv = clamp_prob(p.data[i]);
      sum += g.data[i] ? -std::log(pv) : -std::log(1.0 - pv);
    }
    total += alpha_it->second * (sum / static_cast<double>(p.data.size()));
  }
  return total;
}

std::set<std::int64_t> topk_uncertain(
    const std::vector<std::pair<std::int64_t, double>>& uncertainties,
    double k_fraction) {
  if (k_fraction < 0.0 || k_fraction > 1.0) {
    throw std::invalid_argument("topk_uncertain: k_fraction outside [0, 1]");
  }
  const std::size_t n = uncertainties.size();
  const std::size_t k =
      static_cast<std::size_t>(std::ceil(k_fraction * static_cast<double>(n)));
  std::set<std::int64_t> top;
  if (k == 0 || n == 0) return top;

  std::vector<std::pair<std::int64_t, double>> sorted(uncertainties);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // ties: smaller id counts as more uncertain
  });
  for (std::size_t i = 0; i < std::min(k, n); ++i) top.insert(sorted[i].first);
  return top;
}

}  // namespace streammem
