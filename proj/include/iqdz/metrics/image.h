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

#ifndef IQDZ_METRICS_IMAGE_H_
#define IQDZ_METRICS_IMAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace iqdz::metrics {

// 8-bit image, row-major with interleaved channels (1 or 3).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c);

  size_t Index(int x, int y, int c) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  uint8_t at(int x, int y, int c) const { return pixels[Index(x, y, c)]; }
  uint8_t& at(int x, int y, int c) { return pixels[Index(x, y, c)]; }

  bool operator==(const Image&) const = default;
};

// Binary PGM (P5) or PPM (P6) with maxval 255. Malformed input raises
// kFormat.
Image DecodePnm(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodePnm(const Image& image);

Image LoadPnm(const std::string& path);
void SavePnm(const std::string& path, const Image& image);

}  // namespace iqdz::metrics

#endif  // IQDZ_METRICS_IMAGE_H_
