/* Copyright 2026 The shapeseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "shapeseg/io.hpp"

#include <png.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "shapeseg/errors.hpp"

namespace shapeseg {
namespace fs = std::filesystem;
namespace {

struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> values;
};

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError(path.string(), std::strerror(errno));
  return f;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PngError {
  std::jmp_buf jump;
  char message[256] = {0};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  std::longjmp(err->jump, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

bool has_png_signature(const std::string& bytes) {
  return bytes.size() >= 8 &&
         png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

GrayImage read_png_gray(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  PngError err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_handler, png_warning_handler);
  if (!png) throw IoError(path.string(), "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  GrayImage image;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  std::string failure;
  int color_type = 0;
  if (setjmp(err.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string(), std::string("PNG decode failed: ") + err.message);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    failure = color_type == PNG_COLOR_TYPE_PALETTE
                  ? "palette PNG not supported, expected single-channel grayscale"
                  : "multi-channel PNG, expected single-channel grayscale";
  } else {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    image.bit_depth = depth == 16 ? 16 : 8;
    png_read_update_info(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer.resize(row_bytes * image.height);
    rows.resize(image.height);
    for (int y = 0; y < image.height; ++y) rows[y] = buffer.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!failure.empty()) throw IoError(path.string(), failure);

  image.values.resize(static_cast<std::size_t>(image.width) * image.height);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    image.values[i] = image.bit_depth == 16
                          ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                          : buffer[i];
  }
  return image;
}

void write_png_gray(const fs::path& path, const GrayImage& image) {
  FilePtr file = open_file(path, "wb");
  PngError err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_handler, png_warning_handler);
  if (!png) throw IoError(path.string(), "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  const std::size_t bytes_per = image.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(image.values.size() * bytes_per);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    if (bytes_per == 2) {
      buffer[2 * i] = static_cast<png_byte>(image.values[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(image.values[i] & 0xFF);
    } else {
      buffer[i] = static_cast<png_byte>(image.values[i]);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = buffer.data() + static_cast<std::size_t>(y) * image.width * bytes_per;
  }
  if (setjmp(err.jump)) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string(), std::string("PNG encode failed: ") + err.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, image.bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError(path.string(), std::strerror(errno));
}

GrayImage parse_pgm(const fs::path& path, const std::string& bytes) {
  std::size_t pos = 2;
  auto fail = [&](const std::string& what) -> IoError {
    return IoError(path.string(), "PGM decode failed: " + what);
  };
  auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      throw fail("truncated header");
    }
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos++] - '0');
      if (value > 1 << 24) throw fail("header value too large");
    }
    return static_cast<int>(value);
  };
  const bool binary = bytes[1] == '5';
  GrayImage image;
  image.width = next_int();
  image.height = next_int();
  const int maxval = next_int();
  if (image.width < 1 || image.height < 1) throw fail("empty image");
  if (maxval < 1 || maxval > 255) throw fail("only maxval <= 255 is supported");
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  image.values.resize(n);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + n) throw fail("truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      image.values[i] = static_cast<unsigned char>(bytes[pos + i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) image.values[i] = static_cast<std::uint16_t>(next_int());
  }
  return image;
}

GrayImage read_gray(const fs::path& path) {
  const std::string bytes = read_all(path);
  if (has_png_signature(bytes)) return read_png_gray(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) {
    return parse_pgm(path, bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3')) {
    throw IoError(path.string(), "multi-channel PPM, expected single-channel grayscale");
  }
  throw IoError(path.string(), "unrecognised image format (expected PNG or PGM)");
}

void write_gray(const fs::path& path, const GrayImage& image) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == ".pgm" && image.bit_depth == 8) {
    FilePtr file = open_file(path, "wb");
    std::string header = "P5\n" + std::to_string(image.width) + " " +
                         std::to_string(image.height) + "\n255\n";
    std::vector<unsigned char> data(image.values.begin(), image.values.end());
    if (std::fwrite(header.data(), 1, header.size(), file.get()) != header.size() ||
        std::fwrite(data.data(), 1, data.size(), file.get()) != data.size() ||
        std::fflush(file.get()) != 0) {
      throw IoError(path.string(), std::strerror(errno));
    }
    return;
  }
  write_png_gray(path, image);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

long long parse_integer(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("manifest: " + what + " '" + text + "' is not an integer");
}

}  // namespace

LabelMap read_label_map(const fs::path& path, std::optional<int> num_classes) {
  const GrayImage image = read_gray(path);
  if (image.bit_depth != 8) {
    throw IoError(path.string(), "16-bit image, expected 8-bit label map");
  }
  std::vector<ClassId> ids(image.values.begin(), image.values.end());
  const int max_id = *std::max_element(ids.begin(), ids.end());
  const int classes = num_classes.value_or(max_id + 1);
  if (max_id >= classes) {
    throw ValidationError(path.string() + ": class id " + std::to_string(max_id) +
                          " exceeds declared num_classes " + std::to_string(classes));
  }
  return LabelMap(image.width, image.height, std::move(ids), classes);
}

void write_label_map(const LabelMap& map, const fs::path& path) {
  if (map.num_classes() > 256) {
    throw ValidationError(path.string() + ": more than 256 classes cannot be stored in 8 bits");
  }
  GrayImage image{map.width(), map.height(), 8,
                  std::vector<std::uint16_t>(map.ids().begin(), map.ids().end())};
  write_gray(path, image);
}

void write_binary_mask(const BinaryMask& mask, const fs::path& path) {
  GrayImage image{mask.width(), mask.height(), 8,
                  std::vector<std::uint16_t>(mask.bits().begin(), mask.bits().end())};
  write_gray(path, image);
}

fs::path range_sidecar(const fs::path& path) {
  fs::path out = path;
  out += ".range";
  return out;
}

void write_scalar_field(const ScalarField& field, const fs::path& path) {
  const auto values = field.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double range = hi - lo;
  GrayImage image{field.width(), field.height(), 16, std::vector<std::uint16_t>(values.size())};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double q = range > 0.0 ? std::round((values[i] - lo) / range * 65535.0) : 0.0;
    image.values[i] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
  }
  write_png_gray(path, image);

  const fs::path sidecar = range_sidecar(path);
  std::ofstream out(sidecar);
  if (!out) throw IoError(sidecar.string(), "cannot open for writing");
  char line[128];
  std::snprintf(line, sizeof(line), "min %.17g\nmax %.17g\n", lo, hi);
  out << line;
  if (!out.flush()) throw IoError(sidecar.string(), "write failed");
}

ScalarField read_scalar_field(const fs::path& path) {
  const GrayImage image = read_gray(path);
  std::vector<double> values(image.values.begin(), image.values.end());
  const fs::path sidecar = range_sidecar(path);
  if (image.bit_depth == 16 && fs::exists(sidecar)) {
    std::ifstream in(sidecar);
    std::string key_lo, key_hi;
    double lo = 0.0, hi = 0.0;
    if (!(in >> key_lo >> lo >> key_hi >> hi) || key_lo != "min" || key_hi != "max") {
      throw IoError(sidecar.string(), "malformed range sidecar");
    }
    for (auto& v : values) v = lo + v / 65535.0 * (hi - lo);
  }
  return ScalarField(image.width, image.height, std::move(values));
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  Manifest manifest;
  bool have_magic = false, have_classes = false, have_target = false, have_columns = false;
  std::set<std::string> ids;
  std::set<fs::path> predictions, truths;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    const auto cols = split_tabs(line);
    if (line[0] == '#') {
      if (cols.size() != 2) throw ValidationError(where + "header line needs key<TAB>value");
      const std::string key = cols[0].substr(1);
      if (key == "shapeseg-manifest") {
        if (cols[1] != "1") throw ValidationError(where + "unsupported manifest version");
        have_magic = true;
      } else if (key == "num_classes") {
        manifest.num_classes = static_cast<int>(parse_integer(cols[1], "num_classes"));
        have_classes = true;
      } else if (key == "target_class") {
        manifest.target_class = static_cast<ClassId>(parse_integer(cols[1], "target_class"));
        have_target = true;
      } else if (key == "seed") {
        if (cols[1].empty() || cols[1].find_first_not_of("0123456789") != std::string::npos) {
          throw ValidationError(where + "seed '" + cols[1] + "' is not an unsigned integer");
        }
        manifest.seed = std::stoull(cols[1]);
      } else {
        throw ValidationError(where + "unknown header key '" + key + "'");
      }
      continue;
    }
    if (!have_columns) {
      if (cols != std::vector<std::string>{"id", "prediction", "ground_truth"}) {
        throw ValidationError(where + "expected column header id<TAB>prediction<TAB>ground_truth");
      }
      have_columns = true;
      continue;
    }
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw ValidationError(where + "entry needs three non-empty tab-separated columns");
    }
    ManifestEntry entry{cols[0], resolve(cols[1]), resolve(cols[2])};
    if (!ids.insert(entry.id).second) {
      throw ValidationError(where + "duplicate id '" + entry.id + "'");
    }
    if (!predictions.insert(entry.prediction.lexically_normal()).second ||
        !truths.insert(entry.ground_truth.lexically_normal()).second) {
      throw ValidationError(where + "path already used by another entry");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (!have_magic) throw ValidationError(path.string() + ": missing #shapeseg-manifest header");
  if (!have_classes || manifest.num_classes < 1) {
    throw ValidationError(path.string() + ": missing or invalid #num_classes");
  }
  if (!have_target || manifest.target_class < 0 ||
      manifest.target_class >= manifest.num_classes) {
    throw ValidationError(path.string() + ": missing or invalid #target_class");
  }
  if (!have_columns) throw ValidationError(path.string() + ": missing column header");
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "#shapeseg-manifest\t1\n";
  out << "#num_classes\t" << manifest.num_classes << "\n";
  out << "#target_class\t" << manifest.target_class << "\n";
  if (manifest.seed) out << "#seed\t" << *manifest.seed << "\n";
  out << "id\tprediction\tground_truth\n";
  const fs::path base = fs::absolute(path).parent_path();
  const auto relative = [&](const fs::path& p) {
    if (!p.is_absolute()) return p.generic_string();
    const fs::path rel = p.lexically_normal().lexically_relative(base.lexically_normal());
    return rel.empty() ? p.generic_string() : rel.generic_string();
  };
  for (const auto& e : manifest.entries) {
    out << e.id << "\t" << relative(e.prediction) << "\t" << relative(e.ground_truth) << "\n";
  }
  if (!out.flush()) throw IoError(path.string(), "write failed");
}

}  // namespace shapeseg
