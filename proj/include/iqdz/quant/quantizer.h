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

#ifndef IQDZ_QUANT_QUANTIZER_H_
#define IQDZ_QUANT_QUANTIZER_H_

#include <cstdint>
#include <functional>

#include "iqdz/coder/frequency_table.h"

namespace iqdz::quant {

struct QuantConfig {
  double step = 1.0;    // Q > 0
  double offset = 0.5;  // (0, 0.5]; 0.5 is round-to-nearest
  double omega = 0.5;   // (0, 1)

  // Raises kConfiguration when a field is out of range.
  void Validate() const;
};

// sgn(y) * floor(|y| / Q + offset), with sgn(0) = 0. Agrees with
// GetSymbolInterval at floating-point boundaries.
int64_t DeadZoneQuantize(double y, const QuantConfig& cfg);

double Dequantize(int64_t s, const QuantConfig& cfg);

// Preimage of a symbol under DeadZoneQuantize. The end nearer zero is closed:
// [lower, upper) for s > 0, (lower, upper] for s < 0, (lower, upper) for 0.
struct SymbolInterval {
  double lower;
  double upper;
  int64_t symbol;

  bool Contains(double y) const;
  double width() const { return upper - lower; }
};

SymbolInterval GetSymbolInterval(int64_t s, const QuantConfig& cfg);

// Cumulative distribution of one latent channel, in the channel's own
// (uncentered) coordinates.
using CdfFunction = std::function<double(double)>;

// CDF(median + upper) - CDF(median + lower), clamped at 0.
double SymbolProbability(const CdfFunction& cdf, int64_t s, const QuantConfig& cfg,
                         double median);

struct SymbolRange {
  int32_t s_min;
  int32_t s_max;
};

// Symbols reachable from latents clamped to [y_min, y_max].
SymbolRange ChannelSymbolRange(double y_min, double y_max, double median,
                               const QuantConfig& cfg);

// Probabilities below this floor are raised to it before apportionment.
inline constexpr double kProbabilityFloor = 0x1p-50;

// Frequencies 1 + largest-remainder share of (2^16 - K) proportional to the
// floored symbol probabilities, using exact integer arithmetic. Equal
// remainders favor the lower symbol.
coder::FrequencyTable BuildFrequencyTable(const CdfFunction& cdf, const QuantConfig& cfg,
                                          double median, SymbolRange range);

// Same apportionment from explicit probabilities for symbols s_min, s_min+1...
coder::FrequencyTable FrequencyTableFromProbabilities(int32_t s_min,
                                                      const std::vector<double>& probs);

}  // namespace iqdz::quant

#endif  // IQDZ_QUANT_QUANTIZER_H_
