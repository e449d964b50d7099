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

#include "iqdz/coder/frequency_table.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "iqdz/common/error.h"

namespace iqdz::coder {

FrequencyTable::FrequencyTable(int32_t s_min, std::vector<uint32_t> frequencies)
    : s_min_(s_min), freqs_(std::move(frequencies)) {
  if (freqs_.empty()) Fail(ErrorKind::kConfiguration, "frequency table is empty");
  cumulative_.resize(freqs_.size() + 1);
  uint64_t sum = 0;
  for (size_t i = 0; i < freqs_.size(); ++i) {
    if (freqs_[i] == 0) {
      Fail(ErrorKind::kConfiguration,
           "zero frequency for symbol " + std::to_string(s_min_ + static_cast<int64_t>(i)));
    }
    cumulative_[i] = static_cast<uint32_t>(sum);
    sum += freqs_[i];
    if (sum > kFrequencyTotal) break;
  }
  if (sum != kFrequencyTotal) {
    Fail(ErrorKind::kConfiguration,
         "frequencies sum to " + std::to_string(sum) + ", expected " +
             std::to_string(kFrequencyTotal));
  }
  cumulative_.back() = kFrequencyTotal;
}

int32_t FrequencyTable::SymbolForCount(uint32_t count) const {
  // First cumulative entry strictly greater than count, minus one.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), count);
  return s_min_ + static_cast<int32_t>(it - cumulative_.begin()) - 1;
}

double FrequencyTable::CostBits(int32_t s) const {
  return kFrequencyBits - std::log2(static_cast<double>(frequency(s)));
}

}  // namespace iqdz::coder
