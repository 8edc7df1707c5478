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

#include "isec/core.hpp"

namespace isec {

inline constexpr double kPi = 3.14159265358979323846;

/// Default Gaussian sigma used by the segmentation pipeline before
/// differentiation.
inline constexpr double kDefaultSmoothSigma = 1.0;

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma) {
  int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

}  // namespace detail

/// Convolves each channel with a truncated (3 sigma), unit-sum Gaussian.
/// Borders replicate the nearest sample.
inline FloatImage smooth(const RasterImage& img, double sigma) {
  detail::require(sigma > 0.0, "smooth: sigma must be positive");
  const std::vector<double> kernel = detail::gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width, h = img.height;

  FloatImage tmp(w, h);  // horizontal pass
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int xi = detail::clamp_coord(x + i, w);
          acc += kernel[i + radius] * img.at(xi, y, c);
        }
        tmp.at(x, y, c) = acc;
      }
    }
  }
  FloatImage out(w, h);  // vertical pass
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int yi = detail::clamp_coord(y + i, h);
          acc += kernel[i + radius] * tmp.at(x, yi, c);
        }
        out.at(x, y, c) = acc;
      }
    }
  }
  return out;
}

/// Per-channel 3x3 Sobel derivatives with replicated borders.
/// magnitude = hypot(gx, gy); orientation = atan2 folded into [0, pi).
inline std::array<GradientField, 3> channel_gradients(const FloatImage& img) {
  const int w = img.width, h = img.height;
  std::array<GradientField, 3> fields{GradientField(w, h),
                                      GradientField(w, h),
                                      GradientField(w, h)};
  for (int y = 0; y < h; ++y) {
    const int ym = detail::clamp_coord(y - 1, h);
    const int yp = detail::clamp_coord(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = detail::clamp_coord(x - 1, w);
      const int xp = detail::clamp_coord(x + 1, w);
      for (int c = 0; c < 3; ++c) {
        const double tl = img.at(xm, ym, c), tc = img.at(x, ym, c),
                     tr = img.at(xp, ym, c);
        const double ml = img.at(xm, y, c), mr = img.at(xp, y, c);
        const double bl = img.at(xm, yp, c), bc = img.at(x, yp, c),
                     br = img.at(xp, yp, c);
        const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
        const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        double theta = std::atan2(gy, gx);
        if (theta < 0.0) theta += kPi;
        if (theta >= kPi) theta -= kPi;
        auto& f = fields[static_cast<std::size_t>(c)];
        const std::size_t i = f.index(x, y);
        f.magnitude[i] = std::sqrt(gx * gx + gy * gy);
        f.orientation[i] = theta;
      }
    }
  }
  return fields;
}

/// Keeps, per pixel, the channel with the highest magnitude; its
/// orientation comes along. Ties go to the earlier channel (R over G
/// over B) so the fusion is a pure function.
inline GradientField fuse_max(const std::array<GradientField, 3>& channels) {
  const int w = channels[0].width, h = channels[0].height;
  for (const auto& f : channels)
    detail::require(f.width == w && f.height == h,
                    "fuse_max: channel dimension mismatch");
  GradientField out(w, h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < n; ++i) {
    double best = channels[0].magnitude[i];
    double ori = channels[0].orientation[i];
    for (int c = 1; c < 3; ++c) {
      const auto& f = channels[static_cast<std::size_t>(c)];
      if (f.magnitude[i] > best) {
        best = f.magnitude[i];
        ori = f.orientation[i];
      }
    }
    out.magnitude[i] = best;
    out.orientation[i] = ori;
  }
  return out;
}

/// Rescales magnitudes into [0,1] by the field-wide maximum, so the
/// sweep thresholds are image-independent fractions. An all-zero field
/// stays zero.
inline GradientField normalize_magnitude(const GradientField& g) {
  GradientField out = g;
  double maxmag = 0.0;
  for (double m : out.magnitude) maxmag = std::max(maxmag, m);
  if (maxmag > 0.0)
    for (double& m : out.magnitude) m /= maxmag;
  return out;
}

}  // namespace isec
