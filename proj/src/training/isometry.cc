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

#include "iqdz/training/isometry.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "iqdz/common/error.h"
#include "iqdz/training/loss.h"

namespace iqdz::training {

void FillExpectedConstants(IsometryReport& report, double lambda2, double alpha) {
  const double variance = alpha * alpha / 12;
  const double inf = std::numeric_limits<double>::infinity();
  report.expected_c = lambda2 > 0 ? 1 / (2 * lambda2 * variance) : inf;
  report.expected_c_bits = report.expected_c / std::log(2.0);
  report.expected_c_sigma_as_variance =
      lambda2 > 0 ? 1 / (2 * lambda2 * variance * variance) : inf;
}

IsometryReport IsometryCheck(const model::Autoencoder& autoencoder,
                             std::span<const double> patches, const TrainConfig& cfg,
                             double step) {
  const size_t d = autoencoder.input_dim();
  const size_t n = static_cast<size_t>(autoencoder.latent_dim());
  if (patches.empty() || patches.size() % d != 0) {
    Fail(ErrorKind::kConfiguration, "isometry samples must be a positive whole number of patches");
  }
  if (!(step > 0)) Fail(ErrorKind::kConfiguration, "finite-difference step must be > 0");
  const PatchLayout layout{autoencoder.patch_size(), autoencoder.channels()};
  const size_t samples = patches.size() / d;
  IsometryReport report;
  report.latent_dim = static_cast<int>(n);
  report.samples = static_cast<int>(samples);
  report.gram.assign(n * n, 0.0);
  std::vector<double> jac(n * d);  // column i of J stored contiguously
  for (size_t s = 0; s < samples; ++s) {
    const std::vector<double> y = autoencoder.Encode(patches.subspan(s * d, d));
    const std::vector<double> x_hat = autoencoder.Decode(y);
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> yp = y, ym = y;
      yp[i] += step;
      ym[i] -= step;
      const std::vector<double> xp = autoencoder.Decode(yp);
      const std::vector<double> xm = autoencoder.Decode(ym);
      for (size_t k = 0; k < d; ++k) {
        const double v = (xp[k] - xm[k]) / (2 * step);
        if (!std::isfinite(v)) {
          Fail(ErrorKind::kNumeric, "non-finite Jacobian entry at latent " + std::to_string(i));
        }
        jac[i * d + k] = v;
      }
    }
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i; j < n; ++j) {
        double g = 0;
        if (cfg.metric == DistortionMetric::kMse) {
          for (size_t k = 0; k < d; ++k) g += jac[i * d + k] * jac[j * d + k];
          g *= cfg.mse_scale * cfg.mse_scale / static_cast<double>(d);
        } else {
          const double t = kPolarizationStep;
          std::vector<double> plus(d), minus(d);
          for (size_t k = 0; k < d; ++k) {
            plus[k] = x_hat[k] + t * (jac[i * d + k] + jac[j * d + k]);
            minus[k] = x_hat[k] + t * (jac[i * d + k] - jac[j * d + k]);
          }
          g = (Distortion(x_hat, plus, cfg.metric, layout) -
               Distortion(x_hat, minus, cfg.metric, layout)) /
              (4 * t * t);
        }
        report.gram[i * n + j] += g / static_cast<double>(samples);
        if (j != i) report.gram[j * n + i] += g / static_cast<double>(samples);
      }
    }
  }
  for (size_t i = 0; i < n; ++i) report.diagonal.push_back(report.gram[i * n + i]);
  for (double v : report.diagonal) report.mean_diag += v / static_cast<double>(n);
  double max_off = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) max_off = std::max(max_off, std::abs(report.gram[i * n + j]));
    }
  }
  report.max_offdiag_ratio = report.mean_diag > 0 ? max_off / report.mean_diag
                                                  : std::numeric_limits<double>::infinity();
  FillExpectedConstants(report, cfg.lambda2, cfg.alpha);
  return report;
}

}  // namespace iqdz::training
