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
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "isec/core.hpp"
#include "isec/io.hpp"
#include "isec/metrics.hpp"
#include "isec/pipeline.hpp"

namespace isec {

/// Benchmark configuration: which corpus, which algorithm, and the list
/// of sweep points (threshold_step values for isec, target superpixel
/// counts for box).
struct BenchConfig {
  std::filesystem::path corpus;
  std::string algorithm = "isec";  // "isec" | "box"
  IsecParams params;
  std::vector<double> sweep;
  std::filesystem::path report;
  int br_tolerance = 2;
};

struct BenchRow {
  std::string image;
  std::string algorithm;
  double sweep_value = 0.0;
  double superpixels = 0.0;
  std::string metric;
  double value = 0.0;
};

struct BenchSummary {
  int images_ok = 0;
  int images_failed = 0;
  std::vector<BenchRow> rows;
};

namespace detail {

inline std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// Fixed emission order, so reports are reproducible byte for byte.
inline const std::vector<std::string>& metric_order() {
  static const std::vector<std::string> order = {"superpixels", "br", "ue",
                                                 "muse", "mde", "error"};
  return order;
}

inline std::vector<BenchRow> bench_one_image(const BenchConfig& cfg,
                                             const DatasetEntry& entry,
                                             double sweep_value) {
  std::vector<BenchRow> rows;
  const auto emit = [&](const std::string& metric, double value,
                        double superpixels) {
    rows.push_back({entry.id, cfg.algorithm, sweep_value, superpixels, metric,
                    value});
  };
  try {
    const RasterImage img = read_image(entry.image);
    LabelMap seg = [&] {
      if (cfg.algorithm == "box")
        return box_baseline(img.width, img.height,
                            static_cast<int>(std::lround(sweep_value)));
      IsecParams p = cfg.params;
      p.threshold_step = sweep_value;
      return segment(img, validate_params(p)).labels;
    }();
    const double count = seg.label_count;
    emit("superpixels", count, count);

    if (entry.gt) {
      const LabelMap gt = read_labels(*entry.gt);
      detail::require(gt.width == img.width && gt.height == img.height,
                      "ground truth dimensions disagree with image");
      emit("br",
           boundary_recall(seg, seg_to_boundary(gt), cfg.br_tolerance),
           count);
      emit("ue", undersegmentation_error(seg, gt), count);
    }
    if (entry.flow) {
      const FlowField flow = read_flo(*entry.flow);
      detail::require(flow.width == img.width && flow.height == img.height,
                      "flow dimensions disagree with image");
      if (entry.next) {
        const RasterImage next = read_image(*entry.next);
        LabelMap seg2 = [&] {
          if (cfg.algorithm == "box")
            return box_baseline(next.width, next.height,
                                static_cast<int>(std::lround(sweep_value)));
          IsecParams p = cfg.params;
          p.threshold_step = sweep_value;
          return segment(next, validate_params(p)).labels;
        }();
        emit("muse", muse(seg, seg2, flow), count);
      }
      emit("mde", mde(seg, flow), count);
    }
  } catch (const std::exception&) {
    rows.clear();
    emit("error", 1.0, 0.0);
  }
  return rows;
}

}  // namespace detail

/// Runs the sweep over the corpus and writes the CSV report:
/// a header, then per-image rows plus one per-metric average row
/// ("mean") for every sweep point. Images within a sweep point are
/// processed concurrently; rows are emitted in deterministic order.
inline BenchSummary run_bench(const BenchConfig& cfg) {
  detail::require(!cfg.sweep.empty(), "bench: sweep list must be non-empty");
  if (cfg.algorithm != "isec" && cfg.algorithm != "box")
    throw ValidationError("bench: unknown algorithm " + cfg.algorithm);
  if (cfg.algorithm == "isec") {
    for (double step : cfg.sweep) {
      IsecParams p = cfg.params;
      p.threshold_step = step;
      validate_params(p);
    }
  }
  const std::vector<DatasetEntry> entries = scan_corpus(cfg.corpus);
  if (entries.empty()) throw IoError("bench: corpus has no images");

  BenchSummary summary;
  for (double sweep_value : cfg.sweep) {
    std::vector<std::future<std::vector<BenchRow>>> futures;
    futures.reserve(entries.size());
    for (const DatasetEntry& entry : entries)
      futures.push_back(std::async(std::launch::async, [&cfg, &entry,
                                                        sweep_value] {
        return detail::bench_one_image(cfg, entry, sweep_value);
      }));

    std::vector<BenchRow> point_rows;
    for (auto& fut : futures) {
      std::vector<BenchRow> rows = fut.get();
      const bool failed =
          rows.size() == 1 && rows.front().metric == "error";
      if (failed)
        ++summary.images_failed;
      else
        ++summary.images_ok;
      point_rows.insert(point_rows.end(), rows.begin(), rows.end());
    }

    // Per-sweep-point averages, one row per metric present.
    for (const std::string& metric : detail::metric_order()) {
      if (metric == "error") continue;
      double value_sum = 0.0, count_sum = 0.0;
      int n = 0;
      for (const BenchRow& r : point_rows)
        if (r.metric == metric) {
          value_sum += r.value;
          count_sum += r.superpixels;
          ++n;
        }
      if (n == 0) continue;
      point_rows.push_back({"mean", cfg.algorithm, sweep_value, count_sum / n,
                            metric, value_sum / n});
    }
    summary.rows.insert(summary.rows.end(), point_rows.begin(),
                        point_rows.end());
  }

  if (!cfg.report.empty()) {
    std::ofstream out(cfg.report, std::ios::trunc);
    if (!out) throw IoError("cannot create report " + cfg.report.string());
    out << "image,algorithm,sweep_value,superpixels,metric,value\n";
    for (const BenchRow& r : summary.rows)
      out << r.image << ',' << r.algorithm << ','
          << detail::format_value(r.sweep_value) << ','
          << detail::format_value(r.superpixels) << ',' << r.metric << ','
          << detail::format_value(r.value) << '\n';
    if (!out) throw IoError("write failed: " + cfg.report.string());
  }
  return summary;
}

}  // namespace isec
