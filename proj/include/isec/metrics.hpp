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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "isec/core.hpp"
#include "isec/morphology.hpp"

namespace isec {

/// One metric evaluation, as aggregated by the benchmark harness.
struct MetricReport {
  std::string image;
  std::string metric;
  double value = 0.0;
  int superpixels = 0;
};

/// Labeling where some pixels may be unlabeled (-1): the result of
/// transporting labels through a flow field.
struct PartialLabels {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // -1 where no source pixel landed

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

/// Transports each frame-1 label to round(p + f(p)) on the frame-2 grid.
/// Targets outside the image are dropped; when several sources collide,
/// the smallest row-major source index wins. Pixels with unknown flow
/// transport nothing.
inline PartialLabels flow_warp_labels(const LabelMap& l1, const FlowField& f) {
  detail::require(l1.width == f.width && l1.height == f.height,
                  "flow_warp_labels: dimension mismatch");
  PartialLabels out;
  out.width = l1.width;
  out.height = l1.height;
  out.labels.assign(l1.labels.size(), -1);
  for (int y = 0; y < l1.height; ++y)
    for (int x = 0; x < l1.width; ++x) {
      const double u = f.u(x, y), v = f.v(x, y);
      if (!flow_valid(u, v)) continue;
      const long tx = std::lround(x + u);
      const long ty = std::lround(y + v);
      if (tx < 0 || ty < 0 || tx >= l1.width || ty >= l1.height) continue;
      std::int32_t& slot = out.labels[out.index(static_cast<int>(tx),
                                                static_cast<int>(ty))];
      if (slot < 0) slot = l1.at(x, y);
    }
  return out;
}

namespace detail {

// Sum over segment pairs (a,b) with nonempty overlap of
// min(|a n b|, |b \ a|), restricted to pixels where `a_of` is labeled.
inline std::int64_t leak_sum(const std::vector<std::int32_t>& a_of,
                             const LabelMap& b_of) {
  std::vector<std::int64_t> b_size(static_cast<std::size_t>(b_of.label_count),
                                   0);
  std::unordered_map<std::int64_t, std::int64_t> overlap;
  overlap.reserve(static_cast<std::size_t>(b_of.label_count) * 2);
  for (std::size_t i = 0; i < a_of.size(); ++i) {
    const std::int32_t a = a_of[i];
    if (a < 0) continue;
    const std::int32_t b = b_of.labels[i];
    ++b_size[static_cast<std::size_t>(b)];
    ++overlap[static_cast<std::int64_t>(a) * b_of.label_count + b];
  }
  std::int64_t sum = 0;
  for (const auto& [key, n] : overlap) {
    const std::int32_t b = static_cast<std::int32_t>(key % b_of.label_count);
    const std::int64_t b_out = b_size[static_cast<std::size_t>(b)] - n;
    sum += std::min(n, b_out);
  }
  return sum;
}

}  // namespace detail

/// Motion undersegmentation error: transport l1 through the flow, then
/// for every transported segment a and every overlapping segment b of
/// l2 accumulate min(b_in, b_out), normalized by the pixel count.
/// Unlabeled (dropped) pixels carry no evidence and are excluded.
inline double muse(const LabelMap& l1, const LabelMap& l2,
                   const FlowField& f) {
  detail::require(l1.width == l2.width && l1.height == l2.height &&
                      l1.width == f.width && l1.height == f.height,
                  "muse: dimension mismatch");
  const PartialLabels warped = flow_warp_labels(l1, f);
  const std::int64_t sum = detail::leak_sum(warped.labels, l2);
  return static_cast<double>(sum) /
         (static_cast<double>(l1.width) * l1.height);
}

/// Undersegmentation error against a ground-truth partition: the same
/// min(in, out) leak accumulation with ground-truth segments in place of
/// the transported ones.
inline double undersegmentation_error(const LabelMap& seg,
                                      const LabelMap& gt) {
  detail::require(seg.width == gt.width && seg.height == gt.height,
                  "undersegmentation_error: dimension mismatch");
  const std::int64_t sum = detail::leak_sum(gt.labels, seg);
  return static_cast<double>(sum) /
         (static_cast<double>(seg.width) * seg.height);
}

/// Pixels whose 8-neighborhood contains a different label.
inline BinaryMap seg_to_boundary(const LabelMap& seg) {
  BinaryMap out(seg.width, seg.height);
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x) {
      const std::int32_t l = seg.at(x, y);
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy)
        for (int dx = -1; dx <= 1 && !edge; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= seg.width || ny >= seg.height)
            continue;
          if (seg.at(nx, ny) != l) edge = true;
        }
      out.set(x, y, edge);
    }
  return out;
}

namespace detail {

// Frobenius norm of the flow Jacobian from central differences with
// replicated borders; samples touching unknown-flow pixels contribute 0.
inline std::vector<double> flow_gradient_norm(const FlowField& f) {
  const int w = f.width, h = f.height;
  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  const auto valid = [&](int x, int y) {
    return flow_valid(f.u(x, y), f.v(x, y));
  };
  for (int y = 0; y < h; ++y) {
    const int ym = clamp_coord(y - 1, h), yp = clamp_coord(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = clamp_coord(x - 1, w), xp = clamp_coord(x + 1, w);
      if (!valid(x, y) || !valid(xm, y) || !valid(xp, y) || !valid(x, ym) ||
          !valid(x, yp))
        continue;
      const double dudx = (f.u(xp, y) - f.u(xm, y)) / 2.0;
      const double dudy = (f.u(x, yp) - f.u(x, ym)) / 2.0;
      const double dvdx = (f.v(xp, y) - f.v(xm, y)) / 2.0;
      const double dvdy = (f.v(x, yp) - f.v(x, ym)) / 2.0;
      out[f.index(x, y)] =
          std::sqrt(dudx * dudx + dudy * dudy + dvdx * dvdx + dvdy * dvdy);
    }
  }
  return out;
}

}  // namespace detail

/// Motion discontinuity error: the flow-gradient-weighted mean distance
/// from motion discontinuities to the nearest segment boundary.
inline double mde(const BinaryMap& boundary, const FlowField& f) {
  detail::require(boundary.width == f.width && boundary.height == f.height,
                  "mde: dimension mismatch");
  const std::vector<double> grad = detail::flow_gradient_norm(f);
  double denom = 0.0;
  for (double g : grad) denom += g;
  if (denom == 0.0)
    throw DegenerateInputError("mde: constant flow has no discontinuities");
  const std::vector<double> dist = distance_transform(boundary);
  double num = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) num += grad[i] * dist[i];
  return num / denom;
}

inline double mde(const LabelMap& seg, const FlowField& f) {
  return mde(seg_to_boundary(seg), f);
}

/// Fraction of ground-truth boundary pixels with a predicted boundary
/// pixel within Chebyshev distance tol.
inline double boundary_recall(const LabelMap& seg,
                              const BinaryMap& gt_boundary, int tol) {
  detail::require(seg.width == gt_boundary.width &&
                      seg.height == gt_boundary.height,
                  "boundary_recall: dimension mismatch");
  detail::require(tol >= 0, "boundary_recall: negative tolerance");
  if (gt_boundary.count_set() == 0)
    throw DegenerateInputError("boundary_recall: empty ground-truth boundary");
  const BinaryMap predicted = seg_to_boundary(seg);
  std::int64_t total = 0, matched = 0;
  for (int y = 0; y < gt_boundary.height; ++y)
    for (int x = 0; x < gt_boundary.width; ++x) {
      if (!gt_boundary.get(x, y)) continue;
      ++total;
      bool hit = false;
      for (int dy = -tol; dy <= tol && !hit; ++dy)
        for (int dx = -tol; dx <= tol && !hit; ++dx)
          if (predicted.get_or_zero(x + dx, y + dy)) hit = true;
      if (hit) ++matched;
    }
  return static_cast<double>(matched) / static_cast<double>(total);
}

/// Regular-grid baseline: a near-square grid whose cell count is as
/// close to k as the row/column factorization allows; cell sides within
/// one cell differ by at most one pixel.
inline LabelMap box_baseline(int width, int height, int k) {
  detail::require(width >= 1 && height >= 1, "box_baseline: empty image");
  detail::require(k >= 1 && static_cast<std::int64_t>(k) <=
                                static_cast<std::int64_t>(width) * height,
                  "box_baseline: k out of range");
  const double cell = std::sqrt(static_cast<double>(width) * height / k);
  const auto candidates = [](double ideal, int limit) {
    std::vector<int> c;
    const int lo =
        std::min(limit, std::max(1, static_cast<int>(std::floor(ideal))));
    const int hi =
        std::min(limit, std::max(1, static_cast<int>(std::ceil(ideal))));
    for (int v = lo; v <= hi; ++v) c.push_back(v);
    return c;
  };
  int best_cols = 1, best_rows = 1;
  std::int64_t best_err = std::numeric_limits<std::int64_t>::max();
  int best_skew = std::numeric_limits<int>::max();
  for (int cols : candidates(width / cell, width))
    for (int rows : candidates(height / cell, height)) {
      const std::int64_t err =
          std::llabs(static_cast<std::int64_t>(cols) * rows - k);
      const int skew = std::abs(cols - rows);
      if (err < best_err || (err == best_err && skew < best_skew)) {
        best_cols = cols;
        best_rows = rows;
        best_err = err;
        best_skew = skew;
      }
    }

  std::vector<std::int32_t> labels(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const int ry = static_cast<int>((static_cast<std::int64_t>(y) * best_rows) /
                                    height);
    for (int x = 0; x < width; ++x) {
      const int cx = static_cast<int>(
          (static_cast<std::int64_t>(x) * best_cols) / width);
      labels[static_cast<std::size_t>(y) * width + x] =
          ry * best_cols + cx;
    }
  }
  return LabelMap(width, height, std::move(labels), best_rows * best_cols);
}

}  // namespace isec
