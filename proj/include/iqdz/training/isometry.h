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

#ifndef IQDZ_TRAINING_ISOMETRY_H_
#define IQDZ_TRAINING_ISOMETRY_H_

#include <span>
#include <vector>

#include "iqdz/model/autoencoder.h"
#include "iqdz/training/config.h"

namespace iqdz::training {

inline constexpr double kJacobianStep = 1e-4;
// Perturbation scale for the polarization estimate of the SSIM metric tensor.
inline constexpr double kPolarizationStep = 1e-3;

// Gram matrix G = J^T A J of the decoder at y = f(x), averaged over the
// sample patches, where J = dg/dy by central differences and A is the
// distortion's local quadratic form: (mse_scale^2 / n) I for MSE, and for
// SSIM G_ij = [D(x, x + t(J_i + J_j)) - D(x, x + t(J_i - J_j))] / (4 t^2).
struct IsometryReport {
  int latent_dim = 0;
  int samples = 0;
  std::vector<double> gram;  // latent_dim x latent_dim, row-major
  std::vector<double> diagonal;
  double mean_diag = 0;
  // max_{i != j} |G_ij| / mean_diag
  double max_offdiag_ratio = 0;
  // 1 / (2 lambda2 sigma^2) with sigma^2 = alpha^2 / 12, rate in nats.
  double expected_c = 0;
  // Same constant for a rate measured in bits: expected_c / ln 2.
  double expected_c_bits = 0;
  // Reading sigma itself as the variance alpha^2 / 12.
  double expected_c_sigma_as_variance = 0;
};

// patches: samples * input_dim values in [0, 1]. Uses cfg.metric,
// cfg.mse_scale, cfg.lambda2 and cfg.alpha. A non-finite Jacobian raises
// kNumeric.
IsometryReport IsometryCheck(const model::Autoencoder& autoencoder,
                             std::span<const double> patches, const TrainConfig& cfg,
                             double step = kJacobianStep);

// Report constants only, for a given lambda2 and alpha.
void FillExpectedConstants(IsometryReport& report, double lambda2, double alpha);

}  // namespace iqdz::training

#endif  // IQDZ_TRAINING_ISOMETRY_H_
