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

#ifndef IQDZ_CODER_FREQUENCY_TABLE_H_
#define IQDZ_CODER_FREQUENCY_TABLE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace iqdz::coder {

inline constexpr uint32_t kFrequencyBits = 16;
inline constexpr uint32_t kFrequencyTotal = 1u << kFrequencyBits;

// Integer symbol distribution over the contiguous alphabet [s_min, s_max].
// Every frequency is at least 1 and they sum to kFrequencyTotal.
class FrequencyTable {
 public:
  FrequencyTable(int32_t s_min, std::vector<uint32_t> frequencies);

  int32_t s_min() const { return s_min_; }
  int32_t s_max() const { return s_min_ + static_cast<int32_t>(freqs_.size()) - 1; }
  size_t num_symbols() const { return freqs_.size(); }
  bool Contains(int32_t s) const { return s >= s_min() && s <= s_max(); }

  uint32_t frequency(int32_t s) const { return freqs_[Index(s)]; }
  // Sum of frequencies of all symbols below s.
  uint32_t cumulative(int32_t s) const { return cumulative_[Index(s)]; }
  // Symbol whose cumulative range [cum, cum + freq) holds count.
  int32_t SymbolForCount(uint32_t count) const;

  std::span<const uint32_t> frequencies() const { return freqs_; }

  // Ideal code length of s in bits.
  double CostBits(int32_t s) const;

 private:
  size_t Index(int32_t s) const { return static_cast<size_t>(s - s_min_); }

  int32_t s_min_;
  std::vector<uint32_t> freqs_;
  std::vector<uint32_t> cumulative_;  // size num_symbols() + 1
};

}  // namespace iqdz::coder

#endif  // IQDZ_CODER_FREQUENCY_TABLE_H_
