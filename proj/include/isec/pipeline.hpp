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

#include <chrono>
#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "isec/core.hpp"
#include "isec/gradient.hpp"
#include "isec/morphology.hpp"

namespace isec {

/// Diagnostic record of one loop iteration: filter sizes are
/// non-increasing and thresholds strictly increasing across a run.
struct IterationTrace {
  int index = 0;
  double low = 0.0;
  double high = 0.0;
  int filter_size = 0;
  std::int64_t edge_pixels = 0;
  std::int64_t border_pixels = 0;
};

struct SegmentTiming {
  double gradient_ms = 0.0;
  double loop_ms = 0.0;
  double refine_ms = 0.0;
  double total_ms() const { return gradient_ms + loop_ms + refine_ms; }
};

struct SegmentResult {
  LabelMap labels;
  std::vector<IterationTrace> trace;
  SegmentTiming timing;
};

/// Canny-style edge selection on a normalized gradient field:
/// non-maximum suppression along the quantized gradient direction (four
/// bins), then double thresholding with 8-connected hysteresis.
inline BinaryMap select_edges(const GradientField& g, double low,
                              double high) {
  detail::require(low > 0.0 && low < high && high <= 1.0,
                  "select_edges: need 0 < low < high <= 1");
  const int w = g.width, h = g.height;

  // Direction bins over [0,pi): 0 -> (1,0), pi/4 -> (1,1), pi/2 -> (0,1),
  // 3pi/4 -> (-1,1).
  static constexpr int kDx[4] = {1, 1, 0, -1};
  static constexpr int kDy[4] = {0, 1, 1, 1};

  BinaryMap weak(w, h);
  std::vector<std::size_t> strong;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double m = g.mag(x, y);
      if (m < low) continue;
      int bin = static_cast<int>(g.ori(x, y) / (kPi / 4.0) + 0.5) & 3;
      const int dx = kDx[bin], dy = kDy[bin];
      const auto mag_or_zero = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return 0.0;
        return g.mag(nx, ny);
      };
      // Survives when it is a maximum along the gradient direction; ties
      // break toward the forward neighbor so plateaus keep one pixel.
      if (m >= mag_or_zero(x - dx, y - dy) && m > mag_or_zero(x + dx, y + dy)) {
        weak.set(x, y, true);
        if (m >= high) strong.push_back(weak.index(x, y));
      }
    }

  // Hysteresis: flood the weak survivors from the strong ones.
  BinaryMap out(w, h);
  std::deque<std::size_t> queue(strong.begin(), strong.end());
  for (std::size_t i : strong) out.bits[i] = 1;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t ni = out.index(nx, ny);
        if (weak.bits[ni] && !out.bits[ni]) {
          out.bits[ni] = 1;
          queue.push_back(ni);
        }
      }
  }
  return out;
}

namespace detail {

// Density filtering, binarization, thinning and border extraction of an
// edge set: the body of one loop iteration after edge selection.
inline BinaryMap cluster_borders(const BinaryMap& edges, int S, double tau) {
  const DensityMap density = edge_density(edges, S);
  const BinaryMap clusters = binarize(density, tau);
  const BinaryMap thinned = thin(clusters, (S - 1) / 2);
  return border_extract(thinned);
}

}  // namespace detail

/// One clustering iteration: select edges, stretch them with the density
/// filter, binarize, thin (S-1)/2 times, and return the cluster border
/// pixels.
inline BinaryMap isec_iteration(const GradientField& g, double low,
                                double high, int S, double tau) {
  return detail::cluster_borders(select_edges(g, low, high), S, tau);
}

/// Pixel-wise OR used to accumulate borders across iterations.
inline BinaryMap accumulate(const BinaryMap& spx, const BinaryMap& c) {
  detail::require(spx.width == c.width && spx.height == c.height,
                  "accumulate: dimension mismatch");
  BinaryMap out = spx;
  for (std::size_t i = 0; i < out.bits.size(); ++i)
    out.bits[i] = out.bits[i] | c.bits[i];
  return out;
}

namespace detail {

// Deterministic wave-ordered flood that extends the region labeling over
// the border pixels through 4-adjacency. Each wave scans unlabeled
// pixels in raster order and assigns the label of the first labeled
// 4-neighbor in (N, W, E, S) order; assignments only take effect between
// waves. Growing by 4-adjacency keeps every label class 4-connected.
inline void assign_border_pixels(std::vector<std::int32_t>& labels, int w,
                                 int h) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0) pending.push_back(i);

  std::vector<std::pair<std::size_t, std::int32_t>> wave;
  while (!pending.empty()) {
    wave.clear();
    for (std::size_t i : pending) {
      const int x = static_cast<int>(i % static_cast<std::size_t>(w));
      const int y = static_cast<int>(i / static_cast<std::size_t>(w));
      std::int32_t found = -1;
      if (y > 0 && labels[i - static_cast<std::size_t>(w)] >= 0)
        found = labels[i - static_cast<std::size_t>(w)];
      else if (x > 0 && labels[i - 1] >= 0)
        found = labels[i - 1];
      else if (x + 1 < w && labels[i + 1] >= 0)
        found = labels[i + 1];
      else if (y + 1 < h && labels[i + static_cast<std::size_t>(w)] >= 0)
        found = labels[i + static_cast<std::size_t>(w)];
      if (found >= 0) wave.emplace_back(i, found);
    }
    if (wave.empty()) break;  // unreachable pixels; caller handles
    for (const auto& [i, l] : wave) labels[i] = l;
    std::vector<std::size_t> still;
    for (std::size_t i : pending)
      if (labels[i] < 0) still.push_back(i);
    pending.swap(still);
  }
}

// Absorbs regions smaller than min_area into the neighbor sharing the
// longest 4-adjacent boundary. Smallest regions go first; ties resolve
// to the smallest label.
inline void absorb_small_regions(std::vector<std::int32_t>& labels, int w,
                                 int h, std::int32_t region_count,
                                 int min_area) {
  std::vector<std::int64_t> area(static_cast<std::size_t>(region_count), 0);
  for (std::int32_t l : labels) ++area[static_cast<std::size_t>(l)];

  std::vector<std::map<std::int32_t, std::int64_t>> shared(
      static_cast<std::size_t>(region_count));
  const auto add_pair = [&](std::int32_t a, std::int32_t b) {
    if (a == b) return;
    ++shared[static_cast<std::size_t>(a)][b];
    ++shared[static_cast<std::size_t>(b)][a];
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) add_pair(labels[i], labels[i + 1]);
      if (y + 1 < h) add_pair(labels[i], labels[i + static_cast<std::size_t>(w)]);
    }

  // Union-find over region labels; merges accumulate areas and adjacency.
  std::vector<std::int32_t> parent(static_cast<std::size_t>(region_count));
  for (std::int32_t i = 0; i < region_count; ++i)
    parent[static_cast<std::size_t>(i)] = i;
  const auto find = [&](std::int32_t v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };

  std::int32_t alive = region_count;
  while (alive > 1) {
    // Smallest live region below the area floor; ties to smallest label.
    std::int32_t victim = -1;
    for (std::int32_t r = 0; r < region_count; ++r) {
      if (find(r) != r) continue;
      if (area[static_cast<std::size_t>(r)] >= min_area) continue;
      if (victim == -1 ||
          area[static_cast<std::size_t>(r)] < area[static_cast<std::size_t>(victim)])
        victim = r;
    }
    if (victim == -1) break;

    // Consolidate adjacency by live root before ranking candidates.
    std::map<std::int32_t, std::int64_t> rooted;
    for (const auto& [nbr, len] : shared[static_cast<std::size_t>(victim)]) {
      const std::int32_t root = find(nbr);
      if (root != victim) rooted[root] += len;
    }
    std::int32_t target = -1;
    std::int64_t best_shared = -1;
    for (const auto& [root, len] : rooted) {
      if (len > best_shared) {
        best_shared = len;
        target = root;
      }
    }
    if (target == -1) break;  // isolated region; nothing to merge into

    parent[static_cast<std::size_t>(victim)] = target;
    area[static_cast<std::size_t>(target)] +=
        area[static_cast<std::size_t>(victim)];
    for (const auto& [nbr, len] : shared[static_cast<std::size_t>(victim)]) {
      const std::int32_t root = find(nbr);
      if (root == target) continue;
      shared[static_cast<std::size_t>(target)][root] += len;
      shared[static_cast<std::size_t>(root)][target] += len;
    }
    shared[static_cast<std::size_t>(victim)].clear();
    --alive;
  }

  for (std::int32_t& l : labels) l = find(l);
}

}  // namespace detail

/// Turns the accumulated border mask into a total partition:
/// thin the mask to single-pixel width, drop isolated border pixels,
/// label the complement's 4-connected components, extend the labels over
/// the border pixels, and absorb regions below the area floor.
inline LabelMap refine(const BinaryMap& accumulated, int min_area) {
  detail::require(min_area >= 1, "refine: min_area must be at least 1");
  const int w = accumulated.width, h = accumulated.height;

  BinaryMap mask = thin_until_stable(accumulated);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y)) continue;
      bool lonely = true;
      for (int dy = -1; dy <= 1 && lonely; ++dy)
        for (int dx = -1; dx <= 1 && lonely; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (mask.get_or_zero(x + dx, y + dy)) lonely = false;
        }
      if (lonely) mask.set(x, y, false);
    }

  BinaryMap complement(w, h);
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    complement.bits[i] = mask.bits[i] ? 0 : 1;
  ComponentMap regions = connected_components(complement, 4);

  if (regions.count == 0) {
    // Degenerate all-border mask: the whole image is one superpixel.
    std::vector<std::int32_t> ones(static_cast<std::size_t>(w) * h, 0);
    return LabelMap(w, h, std::move(ones), 1);
  }

  std::vector<std::int32_t> labels = regions.labels;
  detail::assign_border_pixels(labels, w, h);
  detail::absorb_small_regions(labels, w, h, regions.count, min_area);

  // Compact to dense labels in raster order of first occurrence.
  std::vector<std::int32_t> dense(static_cast<std::size_t>(regions.count), -1);
  std::int32_t next = 0;
  for (std::int32_t& l : labels) {
    if (dense[static_cast<std::size_t>(l)] < 0)
      dense[static_cast<std::size_t>(l)] = next++;
    l = dense[static_cast<std::size_t>(l)];
  }
  return LabelMap(w, h, std::move(labels), next);
}

/// Full segmentation: extract the fused gradient once, then sweep the
/// edge-selection threshold from t to T, clustering the selected edges
/// and accumulating cluster borders, shrinking the density filter as the
/// sweep tightens; finally refine the accumulated borders into a
/// labeled partition. Deterministic for fixed input and parameters.
inline SegmentResult segment(const RasterImage& img, const IsecParams& params) {
  const IsecParams p = validate_params(params);
  using clock = std::chrono::steady_clock;
  const auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  auto t0 = clock::now();
  const FloatImage smoothed = smooth(img, kDefaultSmoothSigma);
  const GradientField g =
      normalize_magnitude(fuse_max(channel_gradients(smoothed)));
  SegmentTiming timing;
  timing.gradient_ms = ms_since(t0);

  // The density window cannot exceed the image, so clamp the initial
  // filter size to the largest odd value that fits; a constant image
  // must still segment (to one superpixel) rather than error out.
  const int max_fit = std::min(img.width, img.height);
  int S = std::min(p.filter_size, max_fit % 2 == 1 ? max_fit : max_fit - 1);
  const int min_S = std::min(p.min_filter_size, S);

  t0 = clock::now();
  BinaryMap spx(img.width, img.height);
  std::vector<IterationTrace> trace;
  for (int i = 0;; ++i) {
    const double k = p.low_threshold + i * p.threshold_step;
    if (k > p.high_threshold_cap + 1e-12) break;
    const double low = k;
    const double high = std::min(k * p.high_low_ratio, 1.0);
    if (low >= high) break;  // sweep reached the top of the range

    const BinaryMap edges = select_edges(g, low, high);
    const BinaryMap borders =
        detail::cluster_borders(edges, S, p.ed_binarize_threshold);
    spx = accumulate(spx, borders);
    trace.push_back({i, low, high, S, edges.count_set(), borders.count_set()});
    if (S > min_S) S -= 2;
  }
  timing.loop_ms = ms_since(t0);

  t0 = clock::now();
  LabelMap labels = refine(spx, p.min_superpixel_area);
  timing.refine_ms = ms_since(t0);
  return {std::move(labels), std::move(trace), timing};
}

}  // namespace isec
