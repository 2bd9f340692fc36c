#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "streammem/rng.hpp"
#include "streammem/sample.hpp"

namespace streammem::test {

/// Gaussian direction normalized to unit length; redrawn on the (measure-zero)
/// degenerate draw.
inline std::vector<double> random_unit_embedding(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

inline std::vector<double> axis_embedding(std::size_t dim, std::size_t axis) {
  std::vector<double> v(dim, 0.0);
  v[axis] = 1.0;
  return v;
}

/// Minimal scored sample for buffer-level tests: embedding and uncertainty set,
/// no pixel payload, arrival index doubling as the id.
inline Sample scored_sample(std::int64_t id, std::vector<double> embedding, double uncertainty,
                            int source_id = 0) {
  Sample s;
  s.id = id;
  s.source_id = source_id;
  s.arrival_index = id;
  s.embedding = std::move(embedding);
  s.uncertainty = uncertainty;
  return s;
}

/// Bare sample for FIFO tests: no embedding, no uncertainty.
inline Sample bare_sample(std::int64_t id, int source_id = 0) {
  Sample s;
  s.id = id;
  s.source_id = source_id;
  s.arrival_index = id;
  return s;
}

}  // namespace streammem::test
