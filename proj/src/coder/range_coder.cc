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

#include "iqdz/coder/range_coder.h"

#include <string>

#include "iqdz/common/error.h"

namespace iqdz::coder {
namespace {

constexpr uint32_t kTop = 1u << 24;
constexpr uint32_t kBottom = 1u << 16;

}  // namespace

void RangeEncoder::Encode(const FrequencyTable& table, int32_t symbol) {
  range_ >>= kFrequencyBits;
  low_ += range_ * table.cumulative(symbol);
  range_ *= table.frequency(symbol);
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

std::vector<uint8_t> RangeEncoder::Finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> payload) : in_(payload) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

uint8_t RangeDecoder::NextByte() {
  if (pos_ >= in_.size()) {
    Fail(ErrorKind::kDecode, "payload truncated after " + std::to_string(in_.size()) +
                                 " bytes");
  }
  return in_[pos_++];
}

int32_t RangeDecoder::Decode(const FrequencyTable& table) {
  range_ >>= kFrequencyBits;
  const uint32_t count = (code_ - low_) / range_;
  if (count >= kFrequencyTotal) Fail(ErrorKind::kDecode, "corrupt payload");
  const int32_t symbol = table.SymbolForCount(count);
  low_ += range_ * table.cumulative(symbol);
  range_ *= table.frequency(symbol);
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
    code_ = (code_ << 8) | NextByte();
    low_ <<= 8;
    range_ <<= 8;
  }
  return symbol;
}

std::vector<uint8_t> RangeEncode(std::span<const int32_t> symbols,
                                 std::span<const FrequencyTable> tables) {
  if (tables.empty() && !symbols.empty()) {
    Fail(ErrorKind::kConfiguration, "no frequency tables supplied");
  }
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const size_t channel = i % tables.size();
    const FrequencyTable& t = tables[channel];
    if (!t.Contains(symbols[i])) {
      Fail(ErrorKind::kEncoding,
           "symbol " + std::to_string(symbols[i]) + " at index " + std::to_string(i) +
               " (channel " + std::to_string(channel) + ") outside [" +
               std::to_string(t.s_min()) + ", " + std::to_string(t.s_max()) + "]");
    }
    enc.Encode(t, symbols[i]);
  }
  return enc.Finish();
}

std::vector<int32_t> RangeDecode(std::span<const uint8_t> payload,
                                 std::span<const FrequencyTable> tables, size_t count) {
  if (tables.empty() && count > 0) {
    Fail(ErrorKind::kConfiguration, "no frequency tables supplied");
  }
  RangeDecoder dec(payload);
  std::vector<int32_t> symbols(count);
  for (size_t i = 0; i < count; ++i) symbols[i] = dec.Decode(tables[i % tables.size()]);
  return symbols;
}

double IdealCostBits(std::span<const int32_t> symbols,
                     std::span<const FrequencyTable> tables) {
  double bits = 0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    bits += tables[i % tables.size()].CostBits(symbols[i]);
  }
  return bits;
}

}  // namespace iqdz::coder
