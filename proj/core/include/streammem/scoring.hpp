#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "streammem/grid.hpp"

namespace streammem {

/// Predictions are clamped into [eps, 1-eps] before any log so BCE stays finite.
inline constexpr double kProbClamp = 1e-7;

/// dot(a,b) / (|a| |b|). Throws std::invalid_argument on dimension mismatch or
/// a (near-)zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct EmaConfig {
  double momentum = 0.9;  // must lie in (0, 1)
};

/// normalize(momentum * old + (1 - momentum) * fresh). Both inputs are expected
/// unit-norm; the result is renormalized to unit length. If the blend cancels
/// to (near) zero, returns `fresh` unchanged.
std::vector<double> update_embedding_ema(std::span<const double> old_embedding,
                                         std::span<const double> fresh_embedding,
                                         const EmaConfig& cfg);

/// Per-class loss penalty, keyed by class id. Every weight is >= 1 after
/// clamping; smaller structures carry larger weights.
using PenaltyVector = std::map<int, double>;

/// The normalized size-inverse weights before clamping:
///
///   raw_c    = (sum_c S_c) / S_c
///   alpha^_c = raw_c * m / (sum_c raw_c)
///
/// By construction sum_c alpha^_c = m. Sizes must be >= 1; throws
/// std::invalid_argument on an empty size map.
PenaltyVector normalized_size_weights(const std::map<int, std::int64_t>& sizes);

/// Size-inverse structure penalty over m classes:
///
///   alpha_c = alpha^_c   if alpha^_c >= 1 or alpha^_c <= 0
///           = 1          otherwise
///
/// Sum-normalized ratios are always positive, so the <= 0 branch never fires;
/// it is kept to mirror the piecewise rule exactly.
PenaltyVector structure_penalty_from_sizes(const std::map<int, std::int64_t>& sizes);

/// Counts positive pixels per class and delegates to the size-based overload.
/// Classes with zero positive pixels are excluded from m; throws if none remain.
PenaltyVector structure_penalty(const std::map<int, MaskGrid>& ground_truth);

/// Penalty-weighted BCE uncertainty:
///
///   U_x = sum_{c in mask} alpha_c * mean_pixels[ -g log p - (1-g) log(1-p) ]
///
/// `pred` may hold extra classes; only those in `mask` are scored. The mean
/// over pixels (rather than the sum) keeps U_x resolution-independent.
/// Throws on shape mismatch, on a mask class missing from pred/gt, and when
/// alpha's class set differs from the mask.
double weighted_bce_uncertainty(const std::map<int, ProbGrid>& pred,
                                const std::map<int, MaskGrid>& ground_truth,
                                const std::vector<int>& mask,
                                const PenaltyVector& alpha);

/// Ids of the ceil(k_fraction * n) largest uncertainties. Ties break toward
/// the smaller id so the set is deterministic. k_fraction must lie in [0, 1].
std::set<std::int64_t> topk_uncertain(
    const std::vector<std::pair<std::int64_t, double>>& uncertainties,
    double k_fraction);

}  // namespace streammem
