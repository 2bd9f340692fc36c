#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace streammem {

/// Dense row-major H x W grid.
template <typename T>
struct Grid2D {
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Grid2D() = default;
  Grid2D(int h, int w, T fill = T{})
      : height(h), width(w), data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  T& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  const T& at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

  std::size_t pixel_count() const { return data.size(); }
  bool same_shape(const Grid2D& other) const {
    return height == other.height && width == other.width;
  }
};

using MaskGrid = Grid2D<std::uint8_t>;
using ProbGrid = Grid2D<double>;

inline std::int64_t positive_count(const MaskGrid& mask) {
  std::int64_t n = 0;
  for (auto v : mask.data) n += (v != 0);
  return n;
}

/// Dense row-major H x W x C feature grid (channel fastest).
struct FeatureGrid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  FeatureGrid() = default;
  FeatureGrid(int h, int w, int c)
      : height(h),
        width(w),
        channels(c),
        data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c), 0.0) {}

  double& at(int r, int c, int ch) {
    return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  const double& at(int r, int c, int ch) const {
    return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }

  /// Pointer to the channel vector of one pixel.
  const double* pixel(int r, int c) const {
    return data.data() + (static_cast<std::size_t>(r) * width + c) * channels;
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
};

}  // namespace streammem
