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

#ifndef IQDZ_TRAINING_CONFIG_H_
#define IQDZ_TRAINING_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "iqdz/model/autoencoder.h"
#include "iqdz/model/entropy_model.h"

namespace iqdz::training {

enum class DistortionMetric : uint8_t { kMse, kSsim };

// kRaDoGaGa: rate + lambda1 * ln(D(x, x_hat) + eps0) + lambda2 * D(x_hat, x_noisy).
// kConventional: rate / pixels + lambda1 * D(x, g(y + u)), u ~ U(-1/2, 1/2),
// the per-lambda baseline objective.
enum class Objective : uint8_t { kRaDoGaGa, kConventional };

inline constexpr double kLogFloor = 1e-9;

// Built-in synthetic corpus: each image is a sum of random oriented
// sinusoids normalized to sinusoid_std, plus Gaussian-smoothed white noise
// normalized to noise_std, around a random mean level, clipped to [0, 1].
// With frequency_lattice = L > 0 every image reuses one bank of distinct
// frequencies 2 pi (kx, ky) / L drawn per corpus from the lattice points
// whose period lies in [period_min, period_max]. Their sine and cosine
// components are orthogonal with equal norm over any L x L window, so
// noise-free L x L patches around a fixed mean span exactly 2 * sinusoids
// balanced directions.
struct SyntheticSpec {
  int images = 256;
  int size = 64;
  int sinusoids = 16;
  int frequency_lattice = 0;
  double period_min = 4;
  double period_max = 12;
  double sinusoid_std = 0.2;
  double noise_std = 0.0;
  double noise_sigma = 2.0;
  double mean_min = 0.35;
  double mean_max = 0.65;
};

struct TrainConfig {
  double lambda1 = 5;
  double lambda2 = 0.2;
  double alpha = model::kDefaultAlpha;
  DistortionMetric metric = DistortionMetric::kMse;
  Objective objective = Objective::kRaDoGaGa;
  model::RateUnit rate_unit = model::RateUnit::kBits;
  // MSE is evaluated on pixels multiplied by this factor.
  double mse_scale = 255;
  double learning_rate = 1e-3;
  int batch_size = 8;
  int steps = 2000;
  uint64_t seed = 1;
  double cdf_init_scale = 10;
  model::AutoencoderConfig architecture;
  SyntheticSpec synthetic;

  // Default weights for the metric: (5, 0.2, 0.2) for MSE and
  // (1, 256, 0.2) for SSIM.
  static TrainConfig Defaults(DistortionMetric metric);

  // Raises kConfiguration naming the offending field.
  void Validate() const;

  // Variance of the latent noise, alpha^2 / 12.
  double NoiseVariance() const { return alpha * alpha / 12; }
};

// Flat "key = value" text; '#' starts a comment. Metric defaults for the
// selected metric apply before the other keys. Unknown keys raise
// kConfiguration.
TrainConfig ParseTrainConfig(const std::string& text);
void ApplyTrainSetting(TrainConfig& cfg, const std::string& key, const std::string& value);
std::string FormatTrainConfig(const TrainConfig& cfg);

std::string_view MetricName(DistortionMetric m);
std::string_view ObjectiveName(Objective o);

}  // namespace iqdz::training

#endif  // IQDZ_TRAINING_CONFIG_H_
