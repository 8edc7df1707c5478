// Copyright 2026 The ISEC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isec {

// Error categories. The CLI maps them onto exit codes: validation -> 1,
// I/O -> 2, degenerate input -> 3.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

inline int clamp_coord(int v, int size) {
  return v < 0 ? 0 : (v >= size ? size - 1 : v);
}

}  // namespace detail

/// 8-bit RGB raster, row-major, origin top-left. x indexes columns,
/// y indexes rows. All types in this header are immutable by convention
/// once constructed; operations return new values.
struct RasterImage {
  static constexpr int kChannels = 3;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // height * width * 3 interleaved samples

  RasterImage(int w, int h) : width(w), height(h) {
    check_dims();
    data.assign(static_cast<std::size_t>(w) * h * kChannels, 0);
  }

  RasterImage(int w, int h, std::vector<std::uint8_t> samples)
      : width(w), height(h), data(std::move(samples)) {
    check_dims();
    detail::require(
        data.size() == static_cast<std::size_t>(w) * h * kChannels,
        "RasterImage: data length must equal width * height * 3");
  }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * kChannels + c;
  }
  std::uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }

  bool operator==(const RasterImage&) const = default;

 private:
  void check_dims() const {
    // 3x3 is the smallest raster the neighborhood kernels can process.
    detail::require(width >= 3 && height >= 3,
                    "RasterImage: width and height must be at least 3");
  }
};

/// Real-valued 3-channel raster produced by smoothing; same layout as
/// RasterImage but with double samples.
struct FloatImage {
  static constexpr int kChannels = 3;

  int width = 0;
  int height = 0;
  std::vector<double> data;

  FloatImage(int w, int h) : width(w), height(h) {
    detail::require(w >= 1 && h >= 1, "FloatImage: empty dimensions");
    data.assign(static_cast<std::size_t>(w) * h * kChannels, 0.0);
  }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * kChannels + c;
  }
  double at(int x, int y, int c) const { return data[index(x, y, c)]; }
  double& at(int x, int y, int c) { return data[index(x, y, c)]; }
};

/// Per-pixel gradient magnitude (non-negative) and orientation folded
/// into [0, pi).
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  std::vector<double> orientation;

  GradientField(int w, int h) : width(w), height(h) {
    detail::require(w >= 1 && h >= 1, "GradientField: empty dimensions");
    magnitude.assign(static_cast<std::size_t>(w) * h, 0.0);
    orientation.assign(static_cast<std::size_t>(w) * h, 0.0);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double mag(int x, int y) const { return magnitude[index(x, y)]; }
  double ori(int x, int y) const { return orientation[index(x, y)]; }
};

/// H x W boolean raster (stored as 0/1 bytes).
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMap(int w, int h) : width(w), height(h) {
    detail::require(w >= 1 && h >= 1, "BinaryMap: empty dimensions");
    bits.assign(static_cast<std::size_t>(w) * h, 0);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  bool get(int x, int y) const { return bits[index(x, y)] != 0; }
  void set(int x, int y, bool v) { bits[index(x, y)] = v ? 1 : 0; }

  /// Neighbor lookup with out-of-image treated as unset.
  bool get_or_zero(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return get(x, y);
  }

  std::int64_t count_set() const {
    std::int64_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }

  bool operator==(const BinaryMap&) const = default;
};

/// Dense labeling of every pixel: labels in [0, label_count), each label
/// occurring at least once. Connectivity of the label classes is a
/// property of the producers (the segmentation pipeline emits 4-connected
/// regions) and is not enforced here.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;
  std::int32_t label_count = 0;

  LabelMap(int w, int h, std::vector<std::int32_t> l, std::int32_t count)
      : width(w), height(h), labels(std::move(l)), label_count(count) {
    detail::require(w >= 1 && h >= 1, "LabelMap: empty dimensions");
    detail::require(labels.size() == static_cast<std::size_t>(w) * h,
                    "LabelMap: label buffer size mismatch");
    detail::require(count >= 1, "LabelMap: label_count must be >= 1");
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(count), 0);
    for (std::int32_t v : labels) {
      detail::require(v >= 0 && v < count,
                      "LabelMap: label outside [0, label_count)");
      seen[static_cast<std::size_t>(v)] = 1;
    }
    for (std::uint8_t s : seen)
      detail::require(s != 0, "LabelMap: unused label value");
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  std::int32_t at(int x, int y) const { return labels[index(x, y)]; }

  bool operator==(const LabelMap&) const = default;
};

/// Per-pixel displacement field. dx moves along columns (x), dy along
/// rows (y), in pixels.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  FlowField(int w, int h) : width(w), height(h) {
    detail::require(w >= 1 && h >= 1, "FlowField: empty dimensions");
    dx.assign(static_cast<std::size_t>(w) * h, 0.0);
    dy.assign(static_cast<std::size_t>(w) * h, 0.0);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double u(int x, int y) const { return dx[index(x, y)]; }
  double v(int x, int y) const { return dy[index(x, y)]; }
};

/// Magnitudes above this are treated as "unknown flow" markers (the
/// Sintel convention): such pixels neither transport labels nor
/// contribute flow gradient.
constexpr double kInvalidFlowMagnitude = 1e9;

inline bool flow_valid(double u, double v) {
  return std::abs(u) <= kInvalidFlowMagnitude &&
         std::abs(v) <= kInvalidFlowMagnitude;
}

/// Parameter bundle for the segmentation pipeline. Thresholds are
/// fractions of the image-wide maximum gradient magnitude, so they are
/// portable across images.
struct IsecParams {
  double low_threshold = 0.05;      // t: first (lowest) edge threshold
  double high_threshold_cap = 0.30; // T: last value of the threshold sweep
  double threshold_step = 0.05;     // increment of the sweep
  int filter_size = 11;             // S: edge-density window (odd)
  int min_filter_size = 3;          // floor of the per-iteration S decrement
  double high_low_ratio = 2.0;      // hysteresis: high = min(k * ratio, 1)
  double ed_binarize_threshold = 0.05;  // tau: density cut for clusters
  int min_superpixel_area = 16;     // regions below this get absorbed

  bool operator==(const IsecParams&) const = default;
};

/// Returns the params unchanged if every invariant holds; otherwise
/// throws naming the first violated invariant.
inline IsecParams validate_params(const IsecParams& p) {
  detail::require(p.low_threshold > 0.0 && p.low_threshold < 1.0,
                  "low_threshold must be in (0,1)");
  detail::require(p.low_threshold < p.high_threshold_cap, "t < T required");
  detail::require(p.high_threshold_cap <= 1.0,
                  "high_threshold_cap must be <= 1");
  detail::require(p.threshold_step > 0.0, "threshold_step must be positive");
  detail::require(p.filter_size % 2 == 1, "filter_size must be odd");
  detail::require(p.filter_size >= 3, "filter_size must be at least 3");
  detail::require(p.min_filter_size % 2 == 1, "min_filter_size must be odd");
  detail::require(p.min_filter_size >= 3, "min_filter_size must be at least 3");
  detail::require(p.min_filter_size <= p.filter_size,
                  "min_filter_size must not exceed filter_size");
  detail::require(p.high_low_ratio > 1.0, "high_low_ratio must exceed 1");
  detail::require(p.ed_binarize_threshold > 0.0 &&
                      p.ed_binarize_threshold <= 1.0,
                  "ed_binarize_threshold must be in (0,1]");
  detail::require(p.min_superpixel_area >= 1,
                  "min_superpixel_area must be at least 1");
  return p;
}

}  // namespace isec
