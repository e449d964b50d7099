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

#ifndef IQDZ_CODER_RANGE_CODER_H_
#define IQDZ_CODER_RANGE_CODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "iqdz/coder/frequency_table.h"

namespace iqdz::coder {

// Carry-less 32-bit range coder (Subbotin) with byte-wise renormalization.
// Integer-only, so output bytes are identical on every platform.
class RangeEncoder {
 public:
  void Encode(const FrequencyTable& table, int32_t symbol);
  // Emits the final four bytes; the encoder must not be used afterwards.
  std::vector<uint8_t> Finish();

 private:
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> payload);
  int32_t Decode(const FrequencyTable& table);

 private:
  uint8_t NextByte();

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Symbol i is coded with tables[i % tables.size()] (patch-major,
// channel-minor order).
std::vector<uint8_t> RangeEncode(std::span<const int32_t> symbols,
                                 std::span<const FrequencyTable> tables);
std::vector<int32_t> RangeDecode(std::span<const uint8_t> payload,
                                 std::span<const FrequencyTable> tables, size_t count);

// Sum of ideal code lengths under the tables, in bits.
double IdealCostBits(std::span<const int32_t> symbols,
                     std::span<const FrequencyTable> tables);

}  // namespace iqdz::coder

#endif  // IQDZ_CODER_RANGE_CODER_H_
