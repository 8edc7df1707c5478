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

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isec/core.hpp"
#include "isec/metrics.hpp"

namespace isec {

namespace detail {

constexpr int kMaxImageDim = 1 << 16;

inline std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

inline std::ofstream create_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  return out;
}

// Reads one PNM header token, skipping whitespace and '#' comments.
inline std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw IoError("malformed PNM header: unexpected end of file");
  return tok;
}

inline int pnm_int(std::istream& in, const char* what) {
  const std::string tok = pnm_token(in);
  if (tok.size() > 8)
    throw IoError(std::string("malformed PNM header: ") + what +
                  " out of range");
  int value = 0;
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw IoError(std::string("malformed PNM header: bad ") + what);
    value = value * 10 + (ch - '0');
  }
  return value;
}

inline RasterImage read_ppm(std::istream& in) {
  const std::string magic = pnm_token(in);
  if (magic != "P6") throw IoError("malformed PPM header: expected P6");
  const int w = pnm_int(in, "width");
  const int h = pnm_int(in, "height");
  const int maxval = pnm_int(in, "maxval");
  if (w < 3 || h < 3 || w > kMaxImageDim || h > kMaxImageDim)
    throw IoError("malformed PPM header: unsupported dimensions");
  if (maxval > 255) throw IoError("unsupported bit depth in PPM (maxval > 255)");
  if (maxval < 1) throw IoError("malformed PPM header: bad maxval");
  // The header terminator is exactly one whitespace byte, already
  // consumed by the token reader.
  const std::size_t expect = static_cast<std::size_t>(w) * h * 3;
  std::vector<std::uint8_t> data(expect);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(expect));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != expect)
    throw IoError("truncated PPM payload: expected " + std::to_string(expect) +
                  " bytes, got " + std::to_string(got));
  return RasterImage(w, h, std::move(data));
}

inline RasterImage read_png(const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "rb");
  if (!fp) throw IoError("cannot open " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  int w = 0, h = 0;
  bool ok = false;
  std::string error = "png decode failed";

  if (png && info && setjmp(png_jmpbuf(png)) == 0) {
    png_init_io(png, fp);
    png_read_info(png, info);
    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (w < 3 || h < 3 || w > kMaxImageDim || h > kMaxImageDim) {
      error = "unsupported PNG dimensions";
    } else if (depth != 8) {
      error = "unsupported bit depth in PNG (must be 8)";
    } else if (color != PNG_COLOR_TYPE_RGB && color != PNG_COLOR_TYPE_GRAY) {
      error = "unsupported PNG color type (need 8-bit RGB or grayscale)";
    } else {
      if (color == PNG_COLOR_TYPE_GRAY) png_set_gray_to_rgb(png);
      png_set_interlace_handling(png);
      png_read_update_info(png, info);
      data.assign(static_cast<std::size_t>(w) * h * 3, 0);
      rows.resize(static_cast<std::size_t>(h));
      for (int y = 0; y < h; ++y)
        rows[static_cast<std::size_t>(y)] =
            data.data() + static_cast<std::size_t>(y) * w * 3;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
      ok = true;
    }
  }
  if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  std::fclose(fp);
  if (!ok) throw IoError(error + ": " + path.string());
  return RasterImage(w, h, std::move(data));
}

inline void write_png(const RasterImage& img,
                      const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw IoError("cannot create " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  bool ok = false;

  if (png && info && setjmp(png_jmpbuf(png)) == 0) {
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
      rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
          img.data.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    ok = true;
  }
  if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  std::fclose(fp);
  if (!ok) throw IoError("png encode failed: " + path.string());
}

}  // namespace detail

/// Decodes a binary PPM (P6) or an 8-bit PNG (RGB, or grayscale
/// replicated to three channels). The format is sniffed from the file's
/// leading bytes.
inline RasterImage read_image(const std::filesystem::path& path) {
  {
    std::ifstream probe = detail::open_binary(path);
    std::array<char, 2> magic{};
    probe.read(magic.data(), 2);
    if (probe.gcount() < 2) throw IoError("truncated file: " + path.string());
    if (magic[0] == 'P' && magic[1] == '6') {
      probe.seekg(0);
      return detail::read_ppm(probe);
    }
    if (magic[0] != '\x89' || magic[1] != 'P')
      throw IoError("unrecognized image format: " + path.string());
  }
  return detail::read_png(path);
}

/// Writes binary PPM (.ppm) or PNG (.png), chosen by extension.
inline void write_image(const RasterImage& img,
                        const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".png") {
    detail::write_png(img, path);
    return;
  }
  if (ext != ".ppm")
    throw IoError("write_image: unsupported extension " + ext);
  std::ofstream out = detail::create_binary(path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

namespace detail {

constexpr float kFloMagic = 202021.25f;

template <typename T>
T read_le(std::istream& in, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != sizeof(T))
    throw IoError(std::string("truncated .flo file: missing ") + what);
  return v;
}

}  // namespace detail

/// Parses a Middlebury .flo file: float magic 202021.25, little-endian
/// int32 width and height, then row-major interleaved float32 (u,v).
inline FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in = detail::open_binary(path);
  const float magic = detail::read_le<float>(in, "magic");
  if (magic != detail::kFloMagic) throw IoError("bad magic in .flo file");
  const std::int32_t w = detail::read_le<std::int32_t>(in, "width");
  const std::int32_t h = detail::read_le<std::int32_t>(in, "height");
  if (w < 1 || h < 1 || w > detail::kMaxImageDim || h > detail::kMaxImageDim)
    throw IoError(".flo dimension overflow");
  FlowField f(w, h);
  std::vector<float> row(static_cast<std::size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != row.size() * sizeof(float))
      throw IoError("truncated .flo payload");
    for (int x = 0; x < w; ++x) {
      f.dx[f.index(x, y)] = row[static_cast<std::size_t>(x) * 2];
      f.dy[f.index(x, y)] = row[static_cast<std::size_t>(x) * 2 + 1];
    }
  }
  return f;
}

inline void write_flo(const FlowField& f, const std::filesystem::path& path) {
  std::ofstream out = detail::create_binary(path);
  const float magic = detail::kFloMagic;
  const std::int32_t w = f.width, h = f.height;
  out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
  out.write(reinterpret_cast<const char*>(&w), sizeof(w));
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  std::vector<float> row(static_cast<std::size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      row[static_cast<std::size_t>(x) * 2] =
          static_cast<float>(f.u(x, y));
      row[static_cast<std::size_t>(x) * 2 + 1] =
          static_cast<float>(f.v(x, y));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

enum class LabelFormat { kPgm16, kCsv };

/// Writes a label map either as binary PGM (P5, 16-bit big-endian
/// samples) or as CSV (one raster row per line). read_labels inverts
/// both exactly.
inline void write_labels(const LabelMap& l, const std::filesystem::path& path,
                         LabelFormat format) {
  if (format == LabelFormat::kPgm16) {
    detail::require(l.label_count <= 65536,
                    "write_labels: label_count exceeds the pgm16 range");
    std::ofstream out = detail::create_binary(path);
    out << "P5\n" << l.width << " " << l.height << "\n65535\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(l.width) * 2);
    for (int y = 0; y < l.height; ++y) {
      for (int x = 0; x < l.width; ++x) {
        const std::uint16_t v = static_cast<std::uint16_t>(l.at(x, y));
        row[static_cast<std::size_t>(x) * 2] =
            static_cast<std::uint8_t>(v >> 8);
        row[static_cast<std::size_t>(x) * 2 + 1] =
            static_cast<std::uint8_t>(v & 0xFF);
      }
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed: " + path.string());
    return;
  }
  std::ofstream out = detail::create_binary(path);
  for (int y = 0; y < l.height; ++y) {
    for (int x = 0; x < l.width; ++x) {
      if (x) out << ',';
      out << l.at(x, y);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

namespace detail {

// Renumbers raw label values densely by ascending original value, so
// dense inputs come back identical and sparse ground truth still forms
// a valid LabelMap.
inline LabelMap labels_from_raw(int w, int h,
                                const std::vector<std::int64_t>& raw) {
  std::vector<std::int64_t> sorted(raw);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::int32_t> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), raw[i]);
    labels[i] = static_cast<std::int32_t>(it - sorted.begin());
  }
  return LabelMap(w, h, std::move(labels),
                  static_cast<std::int32_t>(sorted.size()));
}

inline LabelMap read_labels_pgm(std::istream& in) {
  const std::string magic = pnm_token(in);
  if (magic != "P5") throw IoError("malformed PGM header: expected P5");
  const int w = pnm_int(in, "width");
  const int h = pnm_int(in, "height");
  const int maxval = pnm_int(in, "maxval");
  if (w < 1 || h < 1 || w > kMaxImageDim || h > kMaxImageDim)
    throw IoError("malformed PGM header: unsupported dimensions");
  if (maxval < 1 || maxval > 65535)
    throw IoError("malformed PGM header: bad maxval");
  const int bytes = maxval > 255 ? 2 : 1;
  const std::size_t expect = static_cast<std::size_t>(w) * h * bytes;
  std::vector<std::uint8_t> payload(expect);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(expect));
  if (static_cast<std::size_t>(in.gcount()) != expect)
    throw IoError("truncated PGM payload");
  std::vector<std::int64_t> raw(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = bytes == 2 ? (static_cast<std::int64_t>(payload[i * 2]) << 8) |
                              payload[i * 2 + 1]
                        : payload[i];
  return labels_from_raw(w, h, raw);
}

inline LabelMap read_labels_csv(std::istream& in) {
  std::vector<std::int64_t> raw;
  int w = -1, h = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    int row_w = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string cell = line.substr(pos, comma - pos);
      if (cell.empty() ||
          cell.find_first_not_of("0123456789") != std::string::npos)
        throw IoError("malformed CSV label map: bad cell '" + cell + "'");
      if (cell.size() > 10) throw IoError("malformed CSV label map: huge label");
      raw.push_back(std::stoll(cell));
      ++row_w;
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (w < 0)
      w = row_w;
    else if (w != row_w)
      throw IoError("malformed CSV label map: ragged rows");
    ++h;
  }
  if (w < 1 || h < 1) throw IoError("malformed CSV label map: empty");
  return labels_from_raw(w, h, raw);
}

}  // namespace detail

/// Reads a label map written by write_labels; the format is sniffed
/// from the content (P5 header vs. CSV digits).
inline LabelMap read_labels(const std::filesystem::path& path) {
  std::ifstream in = detail::open_binary(path);
  const int first = in.peek();
  if (first == 'P') return detail::read_labels_pgm(in);
  return detail::read_labels_csv(in);
}

/// Copy of the image with the inter-superpixel boundary pixels painted
/// in the given color.
inline RasterImage render_overlay(const RasterImage& img, const LabelMap& seg,
                                  std::array<std::uint8_t, 3> color) {
  detail::require(img.width == seg.width && img.height == seg.height,
                  "render_overlay: dimension mismatch");
  const BinaryMap boundary = seg_to_boundary(seg);
  RasterImage out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (boundary.get(x, y))
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = color[static_cast<std::size_t>(c)];
  return out;
}

/// One benchmark corpus entry: an image, an optional ground-truth label
/// map, an optional successor frame, and optional ground-truth flow.
struct DatasetEntry {
  std::string id;
  std::filesystem::path image;
  std::optional<std::filesystem::path> gt;
  std::optional<std::filesystem::path> next;
  std::optional<std::filesystem::path> flow;
};

/// Scans the normalized corpus layout: images/ plus optional gt/, next/
/// and flow/ directories whose files share the image's stem. Entries
/// come back sorted by id.
inline std::vector<DatasetEntry> scan_corpus(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path images = dir / "images";
  if (!fs::is_directory(images))
    throw IoError("corpus has no images/ directory: " + dir.string());
  std::vector<DatasetEntry> entries;
  for (const auto& e : fs::directory_iterator(images)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (ext != ".ppm" && ext != ".png") continue;
    DatasetEntry entry;
    entry.id = e.path().stem().string();
    entry.image = e.path();
    for (const char* gt_ext : {".pgm", ".csv"}) {
      const fs::path p = dir / "gt" / (entry.id + gt_ext);
      if (fs::exists(p)) {
        entry.gt = p;
        break;
      }
    }
    for (const char* img_ext : {".ppm", ".png"}) {
      const fs::path p = dir / "next" / (entry.id + img_ext);
      if (fs::exists(p)) {
        entry.next = p;
        break;
      }
    }
    const fs::path flo = dir / "flow" / (entry.id + ".flo");
    if (fs::exists(flo)) entry.flow = flo;
    entries.push_back(std::move(entry));
  }
  std::sort(entries.begin(), entries.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) {
              return a.id < b.id;
            });
  return entries;
}

}  // namespace isec
