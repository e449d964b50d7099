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

#include "iqdz/cli/selftest.h"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "iqdz/coder/bitstream.h"
#include "iqdz/coder/range_coder.h"
#include "iqdz/common/error.h"
#include "iqdz/common/random.h"
#include "iqdz/metrics/image.h"
#include "iqdz/metrics/quality.h"
#include "iqdz/quant/quantizer.h"

namespace iqdz::cli {
namespace {

// Returns an empty string on success, otherwise the first violation.
using Suite = std::function<std::string(Rng&)>;

std::string QuantizerSuite(Rng& rng) {
  for (double step : {0.25, 1.0, 4.0}) {
    for (double offset : {0.4, 0.45, 0.5}) {
      const quant::QuantConfig cfg{step, offset};
      for (int64_t s = -50; s <= 50; ++s) {
        const quant::SymbolInterval a = quant::GetSymbolInterval(s, cfg);
        const quant::SymbolInterval b = quant::GetSymbolInterval(s + 1, cfg);
        if (a.upper != b.lower) return "intervals of " + std::to_string(s) + " do not tile";
        const double width = s == 0 ? 2 * (1 - offset) * step : step;
        if (std::abs(a.width() - width) > 1e-12) {
          return "width of symbol " + std::to_string(s) + " is " + std::to_string(a.width());
        }
        for (double t : {0.0, 0.25, 0.5, 0.75}) {
          const double y = a.lower + t * a.width();
          if (a.Contains(y) && quant::DeadZoneQuantize(y, cfg) != s) {
            return "quantizer disagrees with interval of " + std::to_string(s);
          }
        }
      }
    }
  }
  const quant::QuantConfig nearest{1.0, 0.5};
  for (int i = 0; i < 100000; ++i) {
    const double y = rng.Uniform(-100, 100);
    if (quant::DeadZoneQuantize(y, nearest) != static_cast<int64_t>(std::round(y))) {
      return "offset 0.5 differs from rounding at " + std::to_string(y);
    }
  }
  return {};
}

std::string CoderSuite(Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const size_t k = 2 + rng.Below(300);
    std::vector<double> probs(k);
    for (double& p : probs) p = std::pow(rng.Uniform(), 3) + 1e-9;
    double sum = 0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
    const int32_t s_min = -static_cast<int32_t>(rng.Below(k));
    const coder::FrequencyTable table = quant::FrequencyTableFromProbabilities(s_min, probs);
    std::vector<int32_t> symbols(2000);
    for (int32_t& s : symbols) {
      s = table.SymbolForCount(static_cast<uint32_t>(rng.Below(coder::kFrequencyTotal)));
    }
    const std::vector<coder::FrequencyTable> tables = {table};
    const std::vector<uint8_t> payload = coder::RangeEncode(symbols, tables);
    if (coder::RangeDecode(payload, tables, symbols.size()) != symbols) {
      return "round trip failed for table " + std::to_string(t);
    }
    const double ideal = coder::IdealCostBits(symbols, tables);
    if (8.0 * static_cast<double>(payload.size()) > 1.01 * ideal + 128) {
      return "payload above 1.01 x ideal + 128 bits for table " + std::to_string(t);
    }
  }
  return {};
}

std::string BitstreamSuite(Rng& rng) {
  coder::CompressedImage c;
  c.header.width = 17;
  c.header.height = 9;
  c.header.channels = 1;
  c.header.patch_size = 8;
  c.header.latent_dim = 2;
  c.header.model_hash = rng.NextU64();
  c.header.bounds = {{-3, 4}, {0, 0}};
  c.payload = {1, 2, 3, 4, 5};
  std::vector<uint8_t> bytes = coder::WriteBitstream(c);
  if (coder::ReadBitstream(bytes) != c) return "container round trip changed the content";
  bytes[10] ^= 1;
  try {
    coder::ReadBitstream(bytes);
    return "corrupted header was accepted";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kFormat) return "corruption raised the wrong error kind";
  }
  return {};
}

std::string MetricSuite(Rng& rng) {
  if (metrics::MsSsimDb(0.9) != 10.0) return "msssim_db(0.9) != 10";
  metrics::Image a(16, 16, 3), b(16, 16, 3);
  double sq = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    a.pixels[i] = static_cast<uint8_t>(rng.Below(256));
    b.pixels[i] = static_cast<uint8_t>(rng.Below(256));
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sq += d * d;
  }
  const double psnr = 10 * std::log10(255.0 * 255.0 * static_cast<double>(a.pixels.size()) / sq);
  if (std::abs(metrics::Psnr(a, b) - psnr) > 1e-9) return "PSNR disagrees with its definition";
  if (std::abs(metrics::Ssim(a, a) - 1) > 1e-12) return "SSIM of identical images is not 1";
  if (metrics::DecodePnm(metrics::EncodePnm(a)) != a) return "PPM round trip changed pixels";
  return {};
}

}  // namespace

bool RunSelfTest(uint64_t seed, std::ostream& log) {
  const std::pair<const char*, Suite> suites[] = {{"quantizer", QuantizerSuite},
                                                  {"coder", CoderSuite},
                                                  {"bitstream", BitstreamSuite},
                                                  {"metrics", MetricSuite}};
  bool ok = true;
  for (const auto& [name, suite] : suites) {
    Rng rng(seed);
    std::string failure;
    try {
      failure = suite(rng);
    } catch (const Error& e) {
      failure = e.what();
    }
    log << name << ": " << (failure.empty() ? "PASS" : "FAIL " + failure) << "\n";
    ok = ok && failure.empty();
  }
  return ok;
}

}  // namespace iqdz::cli
