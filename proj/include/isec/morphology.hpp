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
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "isec/core.hpp"

namespace isec {

/// H x W edge densities, each the mean of a binary S x S window, so
/// every value lies in [0,1].
struct DensityMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DensityMap(int w, int h) : width(w), height(h) {
    detail::require(w >= 1 && h >= 1, "DensityMap: empty dimensions");
    values.assign(static_cast<std::size_t>(w) * h, 0.0);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double at(int x, int y) const { return values[index(x, y)]; }
};

/// Mean edge occupancy of the S x S window centered at each pixel.
/// Windows clipped at the image border still divide by S*S, i.e. the
/// outside of the image counts as edge-free.
inline DensityMap edge_density(const BinaryMap& edges, int S) {
  detail::require(S >= 1 && S % 2 == 1, "edge_density: S must be odd");
  detail::require(S <= edges.width && S <= edges.height,
                  "edge_density: S exceeds image dimensions");
  const int w = edges.width, h = edges.height, r = S / 2;

  // Summed-area table with a zero top row / left column.
  std::vector<std::int64_t> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  const auto sat_at = [&](int x, int y) -> std::int64_t& {
    return sat[static_cast<std::size_t>(y) * (w + 1) + x];
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      sat_at(x + 1, y + 1) = static_cast<std::int64_t>(edges.get(x, y)) +
                             sat_at(x, y + 1) + sat_at(x + 1, y) -
                             sat_at(x, y);

  DensityMap out(w, h);
  const double denom = static_cast<double>(S) * S;
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
      const std::int64_t count = sat_at(x1 + 1, y1 + 1) - sat_at(x0, y1 + 1) -
                                 sat_at(x1 + 1, y0) + sat_at(x0, y0);
      out.values[out.index(x, y)] = static_cast<double>(count) / denom;
    }
  }
  return out;
}

/// Bit set iff density >= tau.
inline BinaryMap binarize(const DensityMap& d, double tau) {
  BinaryMap out(d.width, d.height);
  for (std::size_t i = 0; i < d.values.size(); ++i)
    out.bits[i] = d.values[i] >= tau ? 1 : 0;
  return out;
}

namespace detail {

// 8-neighbor mask bit layout used by the thinning tables, row-major over
// the neighborhood with the center skipped:
//   bit 0 (-1,-1)  bit 1 (-1,0)  bit 2 (-1,+1)
//   bit 3 ( 0,-1)                bit 4 ( 0,+1)
//   bit 5 (+1,-1)  bit 6 (+1,0)  bit 7 (+1,+1)
inline bool guo_hall_delete(unsigned mask, int subiter) {
  const int nw = (mask >> 0) & 1, n = (mask >> 1) & 1, ne = (mask >> 2) & 1;
  const int we = (mask >> 3) & 1, ea = (mask >> 4) & 1;
  const int sw = (mask >> 5) & 1, s = (mask >> 6) & 1, se = (mask >> 7) & 1;
  // Guo-Hall deletion test (two-subiteration parallel thinning).
  const int c = ((!n) & (ne | ea)) + ((!ea) & (se | s)) +
                ((!s) & (sw | we)) + ((!we) & (nw | n));
  const int n1 = (nw | n) + (ne | ea) + (se | s) + (sw | we);
  const int n2 = (n | ne) + (ea | se) + (s | sw) + (we | nw);
  const int nmin = n1 < n2 ? n1 : n2;
  const int m = subiter == 0 ? ((s | sw | (!nw)) & we) : ((n | ne | (!se)) & ea);
  return c == 1 && nmin >= 2 && nmin <= 3 && m == 0;
}

inline const std::array<std::uint8_t, 256>& thin_lut(int subiter) {
  static const std::array<std::array<std::uint8_t, 256>, 2> luts = [] {
    std::array<std::array<std::uint8_t, 256>, 2> t{};
    for (int it = 0; it < 2; ++it)
      for (unsigned mask = 0; mask < 256; ++mask)
        t[static_cast<std::size_t>(it)][mask] =
            guo_hall_delete(mask, it) ? 1 : 0;
    return t;
  }();
  return luts[static_cast<std::size_t>(subiter)];
}

inline unsigned neighbor_mask(const BinaryMap& m, int x, int y) {
  unsigned mask = 0;
  int bit = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (m.get_or_zero(x + dx, y + dy)) mask |= 1u << bit;
      ++bit;
    }
  return mask;
}

// One parallel subiteration; returns whether any pixel was removed.
inline bool thin_subiteration(BinaryMap& m, int subiter) {
  const auto& lut = thin_lut(subiter);
  const int w = m.width, h = m.height;
  std::vector<std::size_t> removed;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y)) continue;
      if (lut[neighbor_mask(m, x, y)]) removed.push_back(m.index(x, y));
    }
  for (std::size_t i : removed) m.bits[i] = 0;
  return !removed.empty();
}

}  // namespace detail

/// Connectivity-preserving parallel thinning. One pass is a full
/// two-subiteration Guo-Hall cycle; deletions never disconnect a
/// component and never remove endpoints of 1-pixel-wide structures.
inline BinaryMap thin(const BinaryMap& clusters, int passes) {
  detail::require(passes >= 0, "thin: negative pass count");
  BinaryMap out = clusters;
  for (int p = 0; p < passes; ++p) {
    bool a = detail::thin_subiteration(out, 0);
    bool b = detail::thin_subiteration(out, 1);
    if (!a && !b) break;
  }
  return out;
}

/// Thins until a full pass removes nothing.
inline BinaryMap thin_until_stable(const BinaryMap& clusters) {
  BinaryMap out = clusters;
  while (true) {
    bool a = detail::thin_subiteration(out, 0);
    bool b = detail::thin_subiteration(out, 1);
    if (!a && !b) break;
  }
  return out;
}

namespace detail {

// 9-bit pattern index for the border table: bit k = neighborhood pixel
// at offset (dy,dx), enumerated row-major from (-1,-1) to (+1,+1), so
// the center is bit 4. Out-of-image samples contribute 0.
inline const std::array<std::uint8_t, 512>& border_lut() {
  static const std::array<std::uint8_t, 512> lut = [] {
    std::array<std::uint8_t, 512> t{};
    constexpr unsigned kCenter = 1u << 4;
    constexpr unsigned kNeighbors = 0x1FFu & ~kCenter;
    for (unsigned pattern = 0; pattern < 512; ++pattern) {
      const bool center = (pattern & kCenter) != 0;
      const bool all_neighbors = (pattern & kNeighbors) == kNeighbors;
      t[pattern] = (center && !all_neighbors) ? 1 : 0;
    }
    return t;
  }();
  return lut;
}

}  // namespace detail

/// Border pixels of binary clusters: set pixels with at least one unset
/// pixel (or the image exterior) in their 3x3 neighborhood, resolved by
/// indexing a precomputed 512-entry pattern table.
inline BinaryMap border_extract(const BinaryMap& clusters) {
  const auto& lut = detail::border_lut();
  const int w = clusters.width, h = clusters.height;
  BinaryMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      unsigned pattern = 0;
      int bit = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (clusters.get_or_zero(x + dx, y + dy)) pattern |= 1u << bit;
          ++bit;
        }
      out.bits[out.index(x, y)] = lut[pattern];
    }
  return out;
}

/// Labels over the set pixels of a binary map; unset pixels carry -1.
struct ComponentMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // -1 on background
  std::int32_t count = 0;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  std::int32_t at(int x, int y) const { return labels[index(x, y)]; }
};

/// Two-pass union-find labeling of the set pixels. Labels are dense from
/// 0 in raster order of first occurrence.
inline ComponentMap connected_components(const BinaryMap& bits,
                                         int connectivity) {
  detail::require(connectivity == 4 || connectivity == 8,
                  "connected_components: connectivity must be 4 or 8");
  const int w = bits.width, h = bits.height;
  ComponentMap out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<std::size_t>(w) * h, -1);

  std::vector<std::int32_t> parent;
  const auto find = [&](std::int32_t v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  const auto unite = [&](std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };

  std::vector<std::int32_t> provisional(static_cast<std::size_t>(w) * h, -1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!bits.get(x, y)) continue;
      const std::size_t idx = bits.index(x, y);
      std::int32_t best = -1;
      const auto consider = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
        if (!bits.get(nx, ny)) return;
        const std::int32_t l = provisional[bits.index(nx, ny)];
        if (best == -1)
          best = l;
        else
          unite(best, l);
      };
      consider(x - 1, y);
      consider(x, y - 1);
      if (connectivity == 8) {
        consider(x - 1, y - 1);
        consider(x + 1, y - 1);
      }
      if (best == -1) {
        best = static_cast<std::int32_t>(parent.size());
        parent.push_back(best);
      } else {
        best = find(best);
      }
      provisional[idx] = best;
    }

  std::vector<std::int32_t> dense(parent.size(), -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] < 0) continue;
    const std::int32_t root = find(provisional[i]);
    if (dense[static_cast<std::size_t>(root)] < 0)
      dense[static_cast<std::size_t>(root)] = next++;
    out.labels[i] = dense[static_cast<std::size_t>(root)];
  }
  out.count = next;
  return out;
}

namespace detail {

// 1D lower-envelope pass of the squared Euclidean distance transform.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d,
                   int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int vk = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
           (f[static_cast<std::size_t>(vk)] + static_cast<double>(vk) * vk)) /
          (2.0 * q - 2.0 * vk);
      if (s > z[static_cast<std::size_t>(k)]) break;
      --k;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] =
        std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int vk = v[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(q)] =
        static_cast<double>(q - vk) * (q - vk) + f[static_cast<std::size_t>(vk)];
  }
}

}  // namespace detail

/// Exact Euclidean distance from every pixel to the nearest set pixel
/// (two-pass lower-envelope method). Zero on set pixels.
inline std::vector<double> distance_transform(const BinaryMap& boundary) {
  const int w = boundary.width, h = boundary.height;
  if (boundary.count_set() == 0)
    throw DegenerateInputError("distance_transform: empty boundary map");

  // Per-column vertical distance to the nearest set pixel. Columns with
  // no set pixel get a finite sentinel larger than any true distance so
  // their parabolas never win the row envelope.
  const double far = static_cast<double>(w) + h;
  std::vector<double> coldist(static_cast<std::size_t>(w) * h, far);
  for (int x = 0; x < w; ++x) {
    double d = far;
    for (int y = 0; y < h; ++y) {
      d = boundary.get(x, y) ? 0.0 : d + 1.0;
      coldist[boundary.index(x, y)] = std::min(coldist[boundary.index(x, y)], d);
    }
    d = far;
    for (int y = h - 1; y >= 0; --y) {
      d = boundary.get(x, y) ? 0.0 : d + 1.0;
      coldist[boundary.index(x, y)] = std::min(coldist[boundary.index(x, y)], d);
    }
  }

  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> f(static_cast<std::size_t>(w));
  std::vector<double> drow(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double cd =
          std::min(coldist[boundary.index(x, y)], far);
      f[static_cast<std::size_t>(x)] = cd * cd;
    }
    detail::edt_1d(f, drow, w);
    for (int x = 0; x < w; ++x)
      out[boundary.index(x, y)] = std::sqrt(drow[static_cast<std::size_t>(x)]);
  }
  return out;
}

}  // namespace isec
