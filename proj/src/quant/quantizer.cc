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

#include "iqdz/quant/quantizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "iqdz/common/error.h"

namespace iqdz::quant {
namespace {

double Sign(double v) { return (v > 0) - (v < 0); }

using u128 = unsigned __int128;

}  // namespace

void QuantConfig::Validate() const {
  if (!(step > 0) || !std::isfinite(step)) {
    Fail(ErrorKind::kConfiguration, "Q must be finite and > 0, got " + std::to_string(step));
  }
  if (!(offset > 0 && offset <= 0.5)) {
    Fail(ErrorKind::kConfiguration, "offset must be in (0, 0.5], got " + std::to_string(offset));
  }
  if (!(omega > 0 && omega < 1)) {
    Fail(ErrorKind::kConfiguration, "omega must be in (0, 1), got " + std::to_string(omega));
  }
}

int64_t DeadZoneQuantize(double y, const QuantConfig& cfg) {
  const double mag = std::floor(std::fabs(y) / cfg.step + cfg.offset);
  int64_t s = static_cast<int64_t>(Sign(y) * mag);
  // The division can round across a boundary; the interval table decides.
  for (int i = 0; i < 2; ++i) {
    const SymbolInterval iv = GetSymbolInterval(s, cfg);
    if (iv.Contains(y)) break;
    s += y >= iv.upper ? 1 : -1;
  }
  return s;
}

double Dequantize(int64_t s, const QuantConfig& cfg) {
  return static_cast<double>(s) * cfg.step;
}

bool SymbolInterval::Contains(double y) const {
  if (symbol > 0) return y >= lower && y < upper;
  if (symbol < 0) return y > lower && y <= upper;
  return y > lower && y < upper;
}

SymbolInterval GetSymbolInterval(int64_t s, const QuantConfig& cfg) {
  const double sd = static_cast<double>(s);
  const double shrink = 0.5 - cfg.offset;
  const double upper = (sd + 0.5 + Sign(sd + cfg.omega) * shrink) * cfg.step;
  const double lower = (sd - 0.5 + Sign(sd - cfg.omega) * shrink) * cfg.step;
  return {lower, upper, s};
}

double SymbolProbability(const CdfFunction& cdf, int64_t s, const QuantConfig& cfg,
                         double median) {
  const SymbolInterval iv = GetSymbolInterval(s, cfg);
  return std::max(0.0, cdf(median + iv.upper) - cdf(median + iv.lower));
}

SymbolRange ChannelSymbolRange(double y_min, double y_max, double median,
                               const QuantConfig& cfg) {
  const int64_t lo = DeadZoneQuantize(y_min - median, cfg);
  const int64_t hi = DeadZoneQuantize(y_max - median, cfg);
  if (hi < lo) {
    Fail(ErrorKind::kConfiguration, "symbol range [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "] is empty");
  }
  constexpr int64_t kLimit = std::numeric_limits<int16_t>::max();
  if (lo < -kLimit - 1 || hi > kLimit || hi - lo + 1 > coder::kFrequencyTotal) {
    Fail(ErrorKind::kConfiguration,
         "symbol range [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "] too wide for Q=" + std::to_string(cfg.step));
  }
  return {static_cast<int32_t>(lo), static_cast<int32_t>(hi)};
}

coder::FrequencyTable FrequencyTableFromProbabilities(int32_t s_min,
                                                      const std::vector<double>& probs) {
  const size_t k = probs.size();
  if (k == 0 || k > coder::kFrequencyTotal) {
    Fail(ErrorKind::kConfiguration, "cannot build a 16-bit table over " + std::to_string(k) +
                                        " symbols");
  }
  // Each floored probability is m * 2^e exactly; rescale to a common exponent.
  std::vector<int64_t> mant(k);
  std::vector<int> expo(k);
  int min_exp = std::numeric_limits<int>::max();
  for (size_t i = 0; i < k; ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0) {
      Fail(ErrorKind::kNumeric, "invalid probability for symbol " +
                                    std::to_string(s_min + static_cast<int64_t>(i)));
    }
    const double p = std::min(1.0, std::max(probs[i], kProbabilityFloor));
    int e;
    const double frac = std::frexp(p, &e);
    mant[i] = static_cast<int64_t>(std::ldexp(frac, 53));
    expo[i] = e - 53;
    min_exp = std::min(min_exp, expo[i]);
  }
  std::vector<u128> weight(k);
  u128 total = 0;
  for (size_t i = 0; i < k; ++i) {
    weight[i] = static_cast<u128>(mant[i]) << (expo[i] - min_exp);
    total += weight[i];
  }
  const uint32_t spare = coder::kFrequencyTotal - static_cast<uint32_t>(k);
  std::vector<uint32_t> freqs(k);
  std::vector<u128> rem(k);
  uint32_t assigned = 0;
  for (size_t i = 0; i < k; ++i) {
    const u128 scaled = weight[i] * spare;
    freqs[i] = 1 + static_cast<uint32_t>(scaled / total);
    rem[i] = scaled % total;
    assigned += freqs[i] - 1;
  }
  std::vector<size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return rem[a] > rem[b]; });
  for (uint32_t j = 0; j < spare - assigned; ++j) ++freqs[order[j]];
  return coder::FrequencyTable(s_min, std::move(freqs));
}

coder::FrequencyTable BuildFrequencyTable(const CdfFunction& cdf, const QuantConfig& cfg,
                                          double median, SymbolRange range) {
  if (range.s_max < range.s_min) {
    Fail(ErrorKind::kConfiguration, "s_max < s_min in frequency table request");
  }
  std::vector<double> probs;
  probs.reserve(static_cast<size_t>(range.s_max - range.s_min + 1));
  for (int32_t s = range.s_min; s <= range.s_max; ++s) {
    probs.push_back(SymbolProbability(cdf, s, cfg, median));
  }
  return FrequencyTableFromProbabilities(range.s_min, probs);
}

}  // namespace iqdz::quant
