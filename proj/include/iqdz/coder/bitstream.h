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

#ifndef IQDZ_CODER_BITSTREAM_H_
#define IQDZ_CODER_BITSTREAM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace iqdz::coder {

inline constexpr uint8_t kBitstreamVersion = 1;
// flags bit 0: latents were median-centered before quantization.
inline constexpr uint8_t kFlagMedianCentered = 1u << 0;

struct SymbolBounds {
  int16_t s_min = 0;
  int16_t s_max = 0;
  bool operator==(const SymbolBounds&) const = default;
};

struct BitstreamHeader {
  uint8_t version = kBitstreamVersion;
  uint8_t flags = kFlagMedianCentered;
  uint16_t width = 0;
  uint16_t height = 0;
  uint8_t channels = 0;
  uint8_t patch_size = 0;
  uint16_t latent_dim = 0;
  float step = 1.0f;
  float offset = 0.5f;
  uint64_t model_hash = 0;
  std::vector<SymbolBounds> bounds;  // latent_dim entries
  bool operator==(const BitstreamHeader&) const = default;
};

struct CompressedImage {
  BitstreamHeader header;
  std::vector<uint8_t> payload;
  bool operator==(const CompressedImage&) const = default;
};

// Layout, little-endian:
//   "IQDZ" | version u8 | flags u8 | width u16 | height u16 | channels u8 |
//   patch_size u8 | latent_dim u16 | Q f32 | offset f32 | model_hash u64 |
//   latent_dim x (s_min i16, s_max i16) | payload_len u32 |
//   header_crc32 u32 | payload
// The CRC covers every byte before the CRC field.
std::vector<uint8_t> WriteBitstream(const CompressedImage& image);

// Bad magic, version, CRC or trailing bytes raise kFormat. A payload shorter
// than payload_len raises kDecode.
CompressedImage ReadBitstream(std::span<const uint8_t> bytes);

uint32_t Crc32(std::span<const uint8_t> bytes);

}  // namespace iqdz::coder

#endif  // IQDZ_CODER_BITSTREAM_H_
