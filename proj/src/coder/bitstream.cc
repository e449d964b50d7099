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

#include "iqdz/coder/bitstream.h"

#include <zlib.h>

#include <algorithm>
#include <string>

#include "iqdz/common/byte_io.h"
#include "iqdz/common/error.h"

namespace iqdz::coder {
namespace {

constexpr char kMagic[4] = {'I', 'Q', 'D', 'Z'};

}  // namespace

uint32_t Crc32(std::span<const uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<uint32_t>(crc);
}

std::vector<uint8_t> WriteBitstream(const CompressedImage& image) {
  const BitstreamHeader& h = image.header;
  if (h.bounds.size() != h.latent_dim) {
    Fail(ErrorKind::kConfiguration, "header has " + std::to_string(h.bounds.size()) +
                                        " bounds for latent_dim " +
                                        std::to_string(h.latent_dim));
  }
  ByteWriter w;
  w.Chars(std::string_view(kMagic, 4));
  w.U8(h.version);
  w.U8(h.flags);
  w.U16(h.width);
  w.U16(h.height);
  w.U8(h.channels);
  w.U8(h.patch_size);
  w.U16(h.latent_dim);
  w.F32(h.step);
  w.F32(h.offset);
  w.U64(h.model_hash);
  for (const SymbolBounds& b : h.bounds) {
    w.I16(b.s_min);
    w.I16(b.s_max);
  }
  w.U32(static_cast<uint32_t>(image.payload.size()));
  w.U32(Crc32(w.bytes()));
  w.Bytes(image.payload);
  return w.Take();
}

CompressedImage ReadBitstream(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.Bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    Fail(ErrorKind::kFormat, "bad magic, not an IQDZ bitstream");
  }
  CompressedImage out;
  BitstreamHeader& h = out.header;
  h.version = r.U8();
  if (h.version != kBitstreamVersion) {
    Fail(ErrorKind::kFormat, "unsupported bitstream version " + std::to_string(h.version));
  }
  h.flags = r.U8();
  h.width = r.U16();
  h.height = r.U16();
  h.channels = r.U8();
  h.patch_size = r.U8();
  h.latent_dim = r.U16();
  h.step = r.F32();
  h.offset = r.F32();
  h.model_hash = r.U64();
  h.bounds.resize(h.latent_dim);
  for (SymbolBounds& b : h.bounds) {
    b.s_min = r.I16();
    b.s_max = r.I16();
  }
  const uint32_t payload_len = r.U32();
  const uint32_t expected_crc = Crc32(bytes.first(r.position()));
  if (r.U32() != expected_crc) Fail(ErrorKind::kFormat, "header CRC mismatch");
  if (r.remaining() < payload_len) {
    Fail(ErrorKind::kDecode, "payload truncated: " + std::to_string(r.remaining()) +
                                 " of " + std::to_string(payload_len) + " bytes");
  }
  const auto payload = r.Bytes(payload_len);
  if (r.remaining() != 0) {
    Fail(ErrorKind::kFormat, std::to_string(r.remaining()) + " trailing bytes after payload");
  }
  out.payload.assign(payload.begin(), payload.end());
  return out;
}

}  // namespace iqdz::coder
