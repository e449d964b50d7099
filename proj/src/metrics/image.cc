// Copyright 2026 The IQDZ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iqdz/metrics/image.h"

#include <algorithm>
#include <cctype>
#include <string>

#include "iqdz/common/byte_io.h"
#include "iqdz/common/error.h"

namespace iqdz::metrics {
namespace {

class PnmHeaderParser {
 public:
  explicit PnmHeaderParser(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a decimal field.
  int NextInt(const char* what) {
    SkipSpaceAndComments();
    int64_t v = 0;
    size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1 << 20) Fail(ErrorKind::kFormat, std::string("PNM ") + what + " too large");
      ++digits;
    }
    if (digits == 0) Fail(ErrorKind::kFormat, std::string("PNM header: missing ") + what);
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void EndOfHeader() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      Fail(ErrorKind::kFormat, "PNM header: no whitespace before raster");
    }
    ++pos_;
  }

  size_t position() const { return pos_; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

}  // namespace

Image::Image(int w, int h, int c) : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0 || (c != 1 && c != 3)) {
    Fail(ErrorKind::kConfiguration, "invalid image shape " + std::to_string(w) + "x" +
                                        std::to_string(h) + "x" + std::to_string(c));
  }
  pixels.assign(static_cast<size_t>(w) * h * c, 0);
}

Image DecodePnm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    Fail(ErrorKind::kFormat, "not a binary PGM/PPM file (expected P5 or P6)");
  }
  const int channels = bytes[1] == '6' ? 3 : 1;
  PnmHeaderParser p(bytes);
  const int width = p.NextInt("width");
  const int height = p.NextInt("height");
  const int maxval = p.NextInt("maxval");
  if (maxval != 255) {
    Fail(ErrorKind::kFormat, "unsupported PNM maxval " + std::to_string(maxval) +
                                 " (only 255)");
  }
  if (width == 0 || height == 0) Fail(ErrorKind::kFormat, "PNM image has zero size");
  p.EndOfHeader();
  Image img(width, height, channels);
  if (bytes.size() - p.position() != img.pixels.size()) {
    Fail(ErrorKind::kFormat, "PNM raster has " + std::to_string(bytes.size() - p.position()) +
                                 " bytes, expected " + std::to_string(img.pixels.size()));
  }
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(p.position()), bytes.end(),
            img.pixels.begin());
  return img;
}

std::vector<uint8_t> EncodePnm(const Image& image) {
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image LoadPnm(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodePnm(bytes);
  } catch (const Error& e) {
    Fail(e.kind(), path + ": " + e.what());
  }
}

void SavePnm(const std::string& path, const Image& image) {
  WriteFileBytes(path, EncodePnm(image));
}

}  // namespace iqdz::metrics
