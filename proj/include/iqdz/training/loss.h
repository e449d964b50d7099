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

#ifndef IQDZ_TRAINING_LOSS_H_
#define IQDZ_TRAINING_LOSS_H_

#include <span>
#include <vector>

#include "iqdz/common/random.h"
#include "iqdz/grad/graph.h"
#include "iqdz/grad/tensor.h"
#include "iqdz/model/autoencoder.h"
#include "iqdz/model/entropy_model.h"
#include "iqdz/training/config.h"

namespace iqdz::training {

// SSIM stabilizers on the [0, 1] pixel scale.
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr double kSsimSigma = 1.5;

// Layout of one flattened patch: index (y * patch + x) * channels + c.
struct PatchLayout {
  int patch_size = 8;
  int channels = 1;
  size_t values() const { return static_cast<size_t>(patch_size) * patch_size * channels; }
};

// Single-scale SSIM over every valid min(11, P)-wide window of each channel,
// with truncated Gaussian weights (sigma 1.5) renormalized to sum to 1.
// Rows of the returned [channels * windows, values] matrix are the window
// weights, so one affine map yields every local mean.
grad::Tensor SsimWindowMatrix(PatchLayout layout);

// MSE: mean of (scale * (a - b))^2. SSIM: 1 - mean windowed SSIM, where a and
// b hold whole patches. Both reduce over every element in the spans.
double Distortion(std::span<const double> a, std::span<const double> b, DistortionMetric metric,
                  PatchLayout layout, double mse_scale = 1.0);

// Graph form of Distortion for [B, values] operands; window is the matrix
// from SsimWindowMatrix, ignored for MSE.
grad::NodeId DistortionGraph(grad::Graph& g, grad::NodeId a, grad::NodeId b,
                             DistortionMetric metric, double mse_scale, grad::NodeId window);

struct LossParts {
  double loss = 0;
  double rate_bits = 0;  // mean bits per patch
  double d1 = 0;         // D(x, x_hat)
  double d2 = 0;         // D(x_hat, x_noisy); 0 for the conventional objective
};

// RaDOGAGA: rate(y) / B + lambda1 * ln(d1 + kLogFloor) + lambda2 * d2, in the
// configured rate unit.
double CombineLoss(const TrainConfig& cfg, double rate_per_patch, double d1, double d2);

// Loss graph over a fixed batch size with inputs x [B, values] and noise
// [B, latent_dim]. The noise feeds x_noisy = g(y + noise) for RaDOGAGA and
// the relaxed latent y + noise for the conventional objective. The graph
// references the models' tensors; both must outlive it.
class LossGraph {
 public:
  LossGraph(model::Autoencoder& autoencoder, model::EntropyModel& entropy,
            const TrainConfig& cfg, int batch_size);

  int batch_size() const { return batch_size_; }
  // Uniform noise half-width times two: alpha, or 1 for the conventional
  // objective.
  double noise_width() const { return noise_width_; }
  void SampleNoise(Rng& rng, std::span<double> out) const;

  // Non-finite parts raise kNumeric naming the part.
  LossParts Forward(const grad::Tensor& x, const grad::Tensor& noise);
  // Accumulates dL/dparameter into each parameter's gradient slot.
  void Backward();

  grad::Graph& graph() { return graph_; }
  // Inputs of the last Forward, for gradient checks.
  std::vector<grad::Tensor> LastInputs() const;
  std::vector<grad::Tensor*> Parameters() const { return graph_.Parameters(); }

 private:
  TrainConfig cfg_;
  int batch_size_;
  double noise_width_;
  grad::Graph graph_;
  grad::NodeId rate_, d1_, d2_, loss_;
  std::vector<grad::Tensor> inputs_;
};

}  // namespace iqdz::training

#endif  // IQDZ_TRAINING_LOSS_H_
