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

#include <CLI11.hpp>

#include <array>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "isec/bench.hpp"
#include "isec/core.hpp"
#include "isec/io.hpp"
#include "isec/metrics.hpp"
#include "isec/pipeline.hpp"

namespace isec {

namespace detail {

// Exit codes: 0 success, 1 usage/validation, 2 I/O, 3 degenerate input.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const DegenerateInputError& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

inline void add_param_flags(CLI::App* cmd, IsecParams& p) {
  cmd->add_option("--low", p.low_threshold, "first edge threshold t");
  cmd->add_option("--high-cap", p.high_threshold_cap,
                  "last value T of the threshold sweep");
  cmd->add_option("--step", p.threshold_step, "threshold increment");
  cmd->add_option("--filter-size", p.filter_size,
                  "initial edge-density window (odd)");
  cmd->add_option("--min-filter-size", p.min_filter_size,
                  "smallest edge-density window (odd)");
  cmd->add_option("--ratio", p.high_low_ratio,
                  "high threshold = min(low * ratio, 1)");
  cmd->add_option("--tau", p.ed_binarize_threshold,
                  "edge-density binarization threshold");
  cmd->add_option("--min-area", p.min_superpixel_area,
                  "smallest surviving superpixel, in pixels");
}

inline void write_labels_by_extension(const LabelMap& labels,
                                      const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm")
    write_labels(labels, path, LabelFormat::kPgm16);
  else if (ext == ".csv")
    write_labels(labels, path, LabelFormat::kCsv);
  else
    throw ValidationError("label output must end in .pgm or .csv");
}

inline void print_metric_row(const std::string& image,
                             const std::string& metric, double value,
                             int superpixels) {
  std::cout << image << ',' << metric << ',' << format_value(value) << ','
            << superpixels << '\n';
}

}  // namespace detail

/// Entry point shared by the command-line tool and the test suite.
inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"ISEC superpixel segmentation and evaluation"};
  app.require_subcommand(1);

  // segment
  auto* seg_cmd =
      app.add_subcommand("segment", "segment one image into superpixels");
  std::string seg_input, seg_labels, seg_overlay;
  IsecParams seg_params;
  seg_cmd->add_option("--input", seg_input, "input image (.ppm or .png)")
      ->required();
  seg_cmd->add_option("--labels", seg_labels,
                      "label map output (.pgm or .csv)");
  seg_cmd->add_option("--overlay", seg_overlay,
                      "boundary overlay output (.ppm or .png)");
  detail::add_param_flags(seg_cmd, seg_params);

  // metrics
  auto* met_cmd = app.add_subcommand("metrics", "evaluate a segmentation");
  met_cmd->require_subcommand(1);
  std::string met_seg, met_seg2, met_gt, met_flow;
  int met_tol = 2;
  auto* muse_cmd = met_cmd->add_subcommand(
      "muse", "stability of two segmentations under flow-transported labels");
  muse_cmd->add_option("--seg1", met_seg, "first frame label map")->required();
  muse_cmd->add_option("--seg2", met_seg2, "second frame label map")
      ->required();
  muse_cmd->add_option("--flow", met_flow, "ground-truth flow (.flo)")
      ->required();
  auto* mde_cmd = met_cmd->add_subcommand(
      "mde", "flow-weighted distance from motion discontinuities to boundaries");
  mde_cmd->add_option("--seg", met_seg, "label map")->required();
  mde_cmd->add_option("--flow", met_flow, "ground-truth flow (.flo)")
      ->required();
  auto* br_cmd =
      met_cmd->add_subcommand("br", "boundary recall against ground truth");
  br_cmd->add_option("--seg", met_seg, "label map")->required();
  br_cmd->add_option("--gt", met_gt, "ground-truth label map")->required();
  br_cmd->add_option("--tol", met_tol, "match tolerance in pixels");
  auto* ue_cmd = met_cmd->add_subcommand(
      "ue", "undersegmentation error against ground truth");
  ue_cmd->add_option("--seg", met_seg, "label map")->required();
  ue_cmd->add_option("--gt", met_gt, "ground-truth label map")->required();

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "sweep a corpus and write a CSV report");
  BenchConfig bench;
  std::string bench_corpus, bench_report;
  bench_cmd->add_option("--corpus", bench_corpus, "corpus directory")
      ->required();
  bench_cmd->add_option("--algo", bench.algorithm, "isec or box");
  bench_cmd
      ->add_option("--sweep", bench.sweep,
                   "comma-separated sweep values (threshold steps for isec, "
                   "target counts for box)")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--report", bench_report, "CSV report path");
  bench_cmd->add_option("--tol", bench.br_tolerance,
                        "boundary recall tolerance");
  detail::add_param_flags(bench_cmd, bench.params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (seg_cmd->parsed())
    return detail::guarded([&] {
      const RasterImage img = read_image(seg_input);
      const IsecParams params = validate_params(seg_params);
      const SegmentResult result = segment(img, params);
      if (!seg_labels.empty())
        detail::write_labels_by_extension(result.labels, seg_labels);
      if (!seg_overlay.empty())
        write_image(render_overlay(img, result.labels, {255, 0, 0}),
                    seg_overlay);
      std::cout << "superpixels: " << result.labels.label_count << '\n'
                << "gradient: " << result.timing.gradient_ms << " ms\n"
                << "loop: " << result.timing.loop_ms << " ms\n"
                << "refine: " << result.timing.refine_ms << " ms\n"
                << "total: " << result.timing.total_ms() << " ms\n";
      return 0;
    });

  if (met_cmd->parsed())
    return detail::guarded([&] {
      const std::string image =
          std::filesystem::path(met_seg).stem().string();
      if (muse_cmd->parsed()) {
        const LabelMap l1 = read_labels(met_seg);
        const LabelMap l2 = read_labels(met_seg2);
        const FlowField flow = read_flo(met_flow);
        detail::print_metric_row(image, "muse", muse(l1, l2, flow),
                                 l1.label_count);
      } else if (mde_cmd->parsed()) {
        const LabelMap seg = read_labels(met_seg);
        const FlowField flow = read_flo(met_flow);
        detail::print_metric_row(image, "mde", mde(seg, flow),
                                 seg.label_count);
      } else if (br_cmd->parsed()) {
        const LabelMap seg = read_labels(met_seg);
        const LabelMap gt = read_labels(met_gt);
        detail::print_metric_row(
            image, "br", boundary_recall(seg, seg_to_boundary(gt), met_tol),
            seg.label_count);
      } else {
        const LabelMap seg = read_labels(met_seg);
        const LabelMap gt = read_labels(met_gt);
        detail::print_metric_row(image, "ue",
                                 undersegmentation_error(seg, gt),
                                 seg.label_count);
      }
      return 0;
    });

  return detail::guarded([&] {
    bench.corpus = bench_corpus;
    bench.report = bench_report;
    validate_params(bench.params);
    const BenchSummary summary = run_bench(bench);
    std::cout << "images ok: " << summary.images_ok
              << ", failed: " << summary.images_failed << '\n';
    if (summary.images_ok == 0)
      throw IoError("bench: every image failed");
    return 0;
  });
}

}  // namespace isec
