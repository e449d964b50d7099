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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "iqdz/common/error.h"
#include "iqdz/common/random.h"
#include "iqdz/quant/quantizer.h"

namespace iqdz::quant {
namespace {

using boost::multiprecision::cpp_rational;

QuantConfig Cfg(double step, double offset) {
  QuantConfig c;
  c.step = step;
  c.offset = offset;
  return c;
}

double Logistic(double x, double loc = 0, double scale = 1) {
  return 1.0 / (1.0 + std::exp(-(x - loc) / scale));
}

const std::vector<double> kSteps = {0.5, 0.75, 1, 1.25, 1.5, 1.75, 2, 2.5, 3, 3.5, 4};

TEST(QuantizeTest, Examples) {
  EXPECT_EQ(DeadZoneQuantize(1.3, Cfg(1, 0.45)), 1);
  EXPECT_EQ(DeadZoneQuantize(0.54, Cfg(1, 0.45)), 0);
  EXPECT_EQ(DeadZoneQuantize(0.6, Cfg(1, 0.5)), 1);
  EXPECT_EQ(DeadZoneQuantize(-0.6, Cfg(0.5, 0.45)), -1);
  EXPECT_EQ(DeadZoneQuantize(0.0, Cfg(1, 0.5)), 0);
  EXPECT_EQ(DeadZoneQuantize(-0.0, Cfg(1, 0.5)), 0);
}

TEST(QuantizeTest, OddSymmetry) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double y = rng.Uniform(-50, 50);
    const QuantConfig c = Cfg(rng.Uniform(0.1, 4), rng.Uniform(0.01, 0.5));
    EXPECT_EQ(DeadZoneQuantize(-y, c), -DeadZoneQuantize(y, c));
  }
}

TEST(QuantizeTest, HalfOffsetIsRounding) {
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    const double y = rng.Uniform(-100, 100);
    const double q = kSteps[rng.Below(kSteps.size())];
    EXPECT_EQ(DeadZoneQuantize(y, Cfg(q, 0.5)), static_cast<int64_t>(std::round(y / q)));
  }
}

TEST(DequantizeTest, Examples) {
  EXPECT_EQ(Dequantize(0, Cfg(1, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(Dequantize(3, Cfg(0.75, 0.5)), 2.25);
}

TEST(DequantizeTest, QuantizeOfDequantizeIsIdentity) {
  for (double q : kSteps) {
    for (double off : {0.05, 0.2, 0.3, 0.45, 0.5}) {
      for (int64_t s = -100; s <= 100; ++s) {
        EXPECT_EQ(DeadZoneQuantize(Dequantize(s, Cfg(q, off)), Cfg(q, off)), s)
            << "Q=" << q << " offset=" << off;
      }
    }
  }
}

TEST(ConfigTest, Validation) {
  EXPECT_NO_THROW(Cfg(1, 0.5).Validate());
  EXPECT_THROW(Cfg(0, 0.5).Validate(), Error);
  EXPECT_THROW(Cfg(-1, 0.5).Validate(), Error);
  EXPECT_THROW(Cfg(1, 0).Validate(), Error);
  EXPECT_THROW(Cfg(1, 0.6).Validate(), Error);
  QuantConfig c;
  c.omega = 1;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(IntervalTest, Examples) {
  SymbolInterval a = GetSymbolInterval(0, Cfg(1, 0.45));
  EXPECT_NEAR(a.lower, -0.55, 1e-12);
  EXPECT_NEAR(a.upper, 0.55, 1e-12);
  SymbolInterval b = GetSymbolInterval(1, Cfg(1, 0.45));
  EXPECT_NEAR(b.lower, 0.55, 1e-12);
  EXPECT_NEAR(b.upper, 1.55, 1e-12);
  SymbolInterval c = GetSymbolInterval(-2, Cfg(2, 0.4));
  EXPECT_NEAR(c.lower, -5.2, 1e-12);
  EXPECT_NEAR(c.upper, -3.2, 1e-12);
  EXPECT_EQ(DeadZoneQuantize(-4, Cfg(2, 0.4)), -2);
  EXPECT_TRUE(c.Contains(-4));
}

TEST(IntervalTest, OmegaDoesNotMatter) {
  for (double omega : {0.01, 0.3, 0.5, 0.99}) {
    QuantConfig c = Cfg(1.25, 0.35);
    c.omega = omega;
    for (int64_t s = -20; s <= 20; ++s) {
      const SymbolInterval a = GetSymbolInterval(s, c);
      const SymbolInterval b = GetSymbolInterval(s, Cfg(1.25, 0.35));
      EXPECT_EQ(a.lower, b.lower);
      EXPECT_EQ(a.upper, b.upper);
    }
  }
}

TEST(IntervalTest, TilingAndWidths) {
  for (double q : kSteps) {
    for (double off : {0.1, 0.3, 0.45, 0.5}) {
      const QuantConfig c = Cfg(q, off);
      for (int64_t s = -200; s < 200; ++s) {
        const SymbolInterval a = GetSymbolInterval(s, c);
        EXPECT_EQ(a.upper, GetSymbolInterval(s + 1, c).lower);
        const double expected = s == 0 ? 2 * (1 - off) * q : q;
        EXPECT_NEAR(a.width(), expected, 1e-12);
      }
    }
  }
}

TEST(IntervalTest, PartitionProperty) {
  Rng rng(99);
  for (int i = 0; i < 1000000; ++i) {
    const QuantConfig c = Cfg(kSteps[i % kSteps.size()], 0.05 + 0.45 * ((i / 11) % 10) / 9.0);
    const double y = rng.Uniform(-60, 60);
    const int64_t s = DeadZoneQuantize(y, c);
    ASSERT_TRUE(GetSymbolInterval(s, c).Contains(y)) << "y=" << y << " s=" << s;
  }
}

TEST(IntervalTest, BoundaryPointsBelongToSymbolNearerZero) {
  const QuantConfig c = Cfg(2, 0.4);
  // Exactly representable edges: (s - offset) * Q for s = 1, 2, 3.
  EXPECT_EQ(DeadZoneQuantize(1.2, c), 1);
  EXPECT_EQ(DeadZoneQuantize(3.2, c), 2);
  EXPECT_EQ(DeadZoneQuantize(-3.2, c), -2);
  EXPECT_TRUE(GetSymbolInterval(2, c).Contains(3.2));
  EXPECT_FALSE(GetSymbolInterval(1, c).Contains(3.2));
  EXPECT_TRUE(GetSymbolInterval(-2, c).Contains(-3.2));
  EXPECT_FALSE(GetSymbolInterval(-1, c).Contains(-3.2));
}

TEST(ProbabilityTest, LogisticOracle) {
  const CdfFunction cdf = [](double y) { return Logistic(y); };
  const double p = SymbolProbability(cdf, 0, Cfg(1, 0.45), 0);
  EXPECT_NEAR(p, Logistic(0.55) - Logistic(-0.55), 1e-15);
  EXPECT_NEAR(p, 0.2682712, 1e-7);
}

TEST(ProbabilityTest, MedianShiftsIntervals) {
  const CdfFunction cdf = [](double y) { return Logistic(y, 1.5, 0.7); };
  const double p = SymbolProbability(cdf, 2, Cfg(0.75, 0.3), 1.5);
  const SymbolInterval iv = GetSymbolInterval(2, Cfg(0.75, 0.3));
  EXPECT_NEAR(p, Logistic(iv.upper, 0, 0.7) - Logistic(iv.lower, 0, 0.7), 1e-15);
}

TEST(ProbabilityTest, Telescopes) {
  const CdfFunction cdf = [](double y) { return Logistic(y, 0.2, 2); };
  const QuantConfig c = Cfg(1.5, 0.35);
  double sum = 0;
  for (int64_t s = -12; s <= 9; ++s) sum += SymbolProbability(cdf, s, c, 0.2);
  const double expected =
      cdf(0.2 + GetSymbolInterval(9, c).upper) - cdf(0.2 + GetSymbolInterval(-12, c).lower);
  EXPECT_NEAR(sum, expected, 1e-14);
}

TEST(ProbabilityTest, HalfOffsetMatchesTrainingForm) {
  for (double q : kSteps) {
    for (int64_t s = -10; s <= 10; ++s) {
      const SymbolInterval iv = GetSymbolInterval(s, Cfg(q, 0.5));
      EXPECT_NEAR(iv.lower, (s - 0.5) * q, 1e-12);
      EXPECT_NEAR(iv.upper, (s + 0.5) * q, 1e-12);
    }
  }
}

TEST(ProbabilityTest, RateNonIncreasingInStep) {
  Rng rng(1234);
  std::vector<double> latents(20000);
  for (double& y : latents) {
    const double u = rng.Uniform(1e-12, 1 - 1e-12);
    y = 3.0 * std::log(u / (1 - u));
  }
  const CdfFunction cdf = [](double y) { return Logistic(y, 0, 3); };
  for (double off : {0.3, 0.45, 0.5}) {
    double prev = INFINITY;
    for (double q : kSteps) {
      double bits = 0;
      for (double y : latents) {
        bits -= std::log2(SymbolProbability(cdf, DeadZoneQuantize(y, Cfg(q, off)), Cfg(q, off), 0));
      }
      EXPECT_LE(bits, prev) << "Q=" << q << " offset=" << off;
      prev = bits;
    }
  }
}

TEST(SymbolRangeTest, FromBounds) {
  const SymbolRange r = ChannelSymbolRange(-3.3, 4.1, 0.5, Cfg(1, 0.45));
  EXPECT_EQ(r.s_min, DeadZoneQuantize(-3.8, Cfg(1, 0.45)));
  EXPECT_EQ(r.s_max, DeadZoneQuantize(3.6, Cfg(1, 0.45)));
  EXPECT_THROW(ChannelSymbolRange(2, -2, 0, Cfg(1, 0.5)), Error);
  EXPECT_THROW(ChannelSymbolRange(-1e6, 1e6, 0, Cfg(1e-3, 0.5)), Error);
}

// Largest-remainder apportionment in exact rationals, written independently
// of the integer implementation.
std::vector<uint32_t> RationalOracle(const std::vector<double>& probs) {
  const size_t k = probs.size();
  std::vector<cpp_rational> p(k);
  cpp_rational total = 0;
  for (size_t i = 0; i < k; ++i) {
    p[i] = cpp_rational(std::min(1.0, std::max(probs[i], kProbabilityFloor)));
    total += p[i];
  }
  const cpp_rational spare = 65536 - static_cast<int>(k);
  std::vector<uint32_t> f(k);
  std::vector<cpp_rational> rem(k);
  int64_t used = 0;
  for (size_t i = 0; i < k; ++i) {
    const cpp_rational share = p[i] / total * spare;
    const boost::multiprecision::cpp_int fl =
        numerator(share) / denominator(share);
    f[i] = 1 + fl.convert_to<uint32_t>();
    rem[i] = share - cpp_rational(fl);
    used += fl.convert_to<int64_t>();
  }
  std::vector<size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return rem[a] != rem[b] ? rem[a] > rem[b] : a < b;
  });
  for (int64_t j = 0; j < 65536 - static_cast<int64_t>(k) - used; ++j) ++f[idx[j]];
  return f;
}

std::vector<uint32_t> Freqs(const coder::FrequencyTable& t) {
  return {t.frequencies().begin(), t.frequencies().end()};
}

TEST(FrequencyTableTest, ExactSplit) {
  const auto t = FrequencyTableFromProbabilities(0, {0.75, 0.25});
  EXPECT_EQ(Freqs(t), (std::vector<uint32_t>{49152, 16384}));
}

TEST(FrequencyTableTest, EqualProbabilities) {
  const auto t = FrequencyTableFromProbabilities(-3, std::vector<double>(7, 1.0 / 7));
  const auto f = Freqs(t);
  EXPECT_EQ(std::accumulate(f.begin(), f.end(), 0u), 65536u);
  EXPECT_LE(*std::max_element(f.begin(), f.end()) - *std::min_element(f.begin(), f.end()), 1u);
  // Ties go to lower symbols.
  EXPECT_GE(f.front(), f.back());
}

TEST(FrequencyTableTest, LogisticMatchesRationalOracle) {
  const CdfFunction cdf = [](double y) { return Logistic(y); };
  const QuantConfig c = Cfg(1, 0.45);
  const auto t = BuildFrequencyTable(cdf, c, 0, {-8, 8});
  std::vector<double> probs;
  for (int s = -8; s <= 8; ++s) probs.push_back(SymbolProbability(cdf, s, c, 0));
  EXPECT_EQ(Freqs(t), RationalOracle(probs));
  EXPECT_EQ(t.s_min(), -8);
  EXPECT_EQ(t.s_max(), 8);
}

TEST(FrequencyTableTest, RandomMatchesRationalOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const size_t k = 1 + rng.Below(trial % 6 == 0 ? 3000 : 40);
    std::vector<double> probs(k);
    for (double& p : probs) {
      const double u = rng.Uniform();
      // Include values under the floor and exact zeros.
      p = rng.Below(8) == 0 ? 0.0 : std::pow(u, 1 + 20 * rng.Uniform()) * 1e-3;
    }
    const auto t = FrequencyTableFromProbabilities(0, probs);
    const auto f = Freqs(t);
    EXPECT_EQ(f, RationalOracle(probs)) << trial;
    EXPECT_EQ(std::accumulate(f.begin(), f.end(), 0u), 65536u);
    EXPECT_GE(*std::min_element(f.begin(), f.end()), 1u);
  }
}

TEST(FrequencyTableTest, DegenerateSizes) {
  EXPECT_EQ(Freqs(FrequencyTableFromProbabilities(4, {0.3})), (std::vector<uint32_t>{65536}));
  const auto full = FrequencyTableFromProbabilities(0, std::vector<double>(65536, 0.5));
  EXPECT_EQ(full.frequency(123), 1u);
  EXPECT_THROW(FrequencyTableFromProbabilities(0, std::vector<double>(65537, 0.1)), Error);
  EXPECT_THROW(FrequencyTableFromProbabilities(0, {}), Error);
  EXPECT_THROW(FrequencyTableFromProbabilities(0, {0.5, NAN}), Error);
  const CdfFunction cdf = [](double y) { return Logistic(y); };
  EXPECT_THROW(BuildFrequencyTable(cdf, Cfg(1, 0.5), 0, {3, 2}), Error);
}

}  // namespace
}  // namespace iqdz::quant
