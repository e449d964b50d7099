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

#include "iqdz/training/loss.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iqdz/common/error.h"
#include "iqdz/grad/kernels.h"

namespace iqdz::training {
namespace {

void CheckSameSize(size_t a, size_t b) {
  if (a != b) {
    Fail(ErrorKind::kConfiguration, "distortion operands differ in size: " + std::to_string(a) +
                                        " vs " + std::to_string(b));
  }
}

double Ssim(double mx, double my, double vx, double vy, double cxy) {
  return (2 * mx * my + kSsimC1) * (2 * cxy + kSsimC2) /
         ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
}

}  // namespace

grad::Tensor SsimWindowMatrix(PatchLayout layout) {
  const int p = layout.patch_size;
  const int c = layout.channels;
  if (p < 1 || c < 1) Fail(ErrorKind::kConfiguration, "patch layout must be positive");
  const int w = std::min(11, p);
  const int positions = p - w + 1;
  std::vector<double> taps(static_cast<size_t>(w));
  const double center = (w - 1) / 2.0;
  for (int k = 0; k < w; ++k) {
    const double d = k - center;
    taps[static_cast<size_t>(k)] = std::exp(-d * d / (2 * kSsimSigma * kSsimSigma));
  }
  double total = 0;
  for (double a : taps) {
    for (double b : taps) total += a * b;
  }
  const size_t rows = static_cast<size_t>(c) * positions * positions;
  grad::Tensor m({rows, layout.values()});
  size_t row = 0;
  for (int ch = 0; ch < c; ++ch) {
    for (int y0 = 0; y0 < positions; ++y0) {
      for (int x0 = 0; x0 < positions; ++x0, ++row) {
        for (int dy = 0; dy < w; ++dy) {
          for (int dx = 0; dx < w; ++dx) {
            const size_t col = static_cast<size_t>(((y0 + dy) * p + (x0 + dx)) * c + ch);
            m.at(row, col) = taps[static_cast<size_t>(dy)] * taps[static_cast<size_t>(dx)] / total;
          }
        }
      }
    }
  }
  return m;
}

double Distortion(std::span<const double> a, std::span<const double> b, DistortionMetric metric,
                  PatchLayout layout, double mse_scale) {
  CheckSameSize(a.size(), b.size());
  if (a.empty()) Fail(ErrorKind::kConfiguration, "distortion of empty operands");
  if (metric == DistortionMetric::kMse) {
    double sum = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      const double d = mse_scale * (a[i] - b[i]);
      sum += d * d;
    }
    return sum / static_cast<double>(a.size());
  }
  const size_t n = layout.values();
  if (a.size() % n != 0) {
    Fail(ErrorKind::kConfiguration, "SSIM operand size " + std::to_string(a.size()) +
                                        " is not a whole number of patches");
  }
  const grad::Tensor m = SsimWindowMatrix(layout);
  const size_t rows = m.shape()[0];
  double sum = 0;
  for (size_t s = 0; s < a.size() / n; ++s) {
    const double* pa = a.data() + s * n;
    const double* pb = b.data() + s * n;
    for (size_t r = 0; r < rows; ++r) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (size_t k = 0; k < n; ++k) {
        const double w = m.at(r, k);
        mx += w * pa[k];
        my += w * pb[k];
        xx += w * pa[k] * pa[k];
        yy += w * pb[k] * pb[k];
        xy += w * pa[k] * pb[k];
      }
      sum += Ssim(mx, my, xx - mx * mx, yy - my * my, xy - mx * my);
    }
  }
  return 1.0 - sum / static_cast<double>(rows * (a.size() / n));
}

grad::NodeId DistortionGraph(grad::Graph& g, grad::NodeId a, grad::NodeId b,
                             DistortionMetric metric, double mse_scale, grad::NodeId window) {
  if (g.ShapeOf(a) != g.ShapeOf(b)) {
    Fail(ErrorKind::kConfiguration, "distortion operands differ in shape: " +
                                        grad::ShapeString(g.ShapeOf(a)) + " vs " +
                                        grad::ShapeString(g.ShapeOf(b)));
  }
  if (metric == DistortionMetric::kMse) {
    return g.Mean(g.Square(g.Scale(g.Subtract(a, b), mse_scale)));
  }
  const size_t rows = g.ShapeOf(window)[0];
  const grad::NodeId zero = g.Constant(grad::Tensor({rows}));
  const grad::NodeId mx = g.Affine(a, window, zero);
  const grad::NodeId my = g.Affine(b, window, zero);
  const grad::NodeId xx = g.Affine(g.Square(a), window, zero);
  const grad::NodeId yy = g.Affine(g.Square(b), window, zero);
  const grad::NodeId xy = g.Affine(g.Multiply(a, b), window, zero);
  const grad::NodeId mx2 = g.Square(mx);
  const grad::NodeId my2 = g.Square(my);
  const grad::NodeId mxy = g.Multiply(mx, my);
  const grad::NodeId vx = g.Subtract(xx, mx2);
  const grad::NodeId vy = g.Subtract(yy, my2);
  const grad::NodeId cxy = g.Subtract(xy, mxy);
  const grad::NodeId num = g.Multiply(g.AddScalar(g.Scale(mxy, 2), kSsimC1),
                                      g.AddScalar(g.Scale(cxy, 2), kSsimC2));
  const grad::NodeId den = g.Multiply(g.AddScalar(g.Add(mx2, my2), kSsimC1),
                                      g.AddScalar(g.Add(vx, vy), kSsimC2));
  const grad::NodeId ssim = g.Mean(g.Multiply(num, g.Reciprocal(den)));
  return g.AddScalar(g.Scale(ssim, -1), 1);
}

double CombineLoss(const TrainConfig& cfg, double rate_per_patch, double d1, double d2) {
  if (cfg.objective == Objective::kConventional) {
    const double pixels = static_cast<double>(cfg.architecture.patch_size) *
                          cfg.architecture.patch_size;
    return rate_per_patch / pixels + cfg.lambda1 * d1;
  }
  return rate_per_patch + cfg.lambda1 * std::log(d1 + kLogFloor) + cfg.lambda2 * d2;
}

LossGraph::LossGraph(model::Autoencoder& autoencoder, model::EntropyModel& entropy,
                     const TrainConfig& cfg, int batch_size)
    : cfg_(cfg), batch_size_(batch_size) {
  cfg_.Validate();
  if (batch_size < 1) Fail(ErrorKind::kConfiguration, "batch size must be >= 1");
  if (entropy.channels() != autoencoder.latent_dim()) {
    Fail(ErrorKind::kConfiguration, "entropy model has " + std::to_string(entropy.channels()) +
                                        " channels for latent_dim " +
                                        std::to_string(autoencoder.latent_dim()));
  }
  const bool conventional = cfg_.objective == Objective::kConventional;
  noise_width_ = conventional ? 1.0 : cfg_.alpha;
  const size_t b = static_cast<size_t>(batch_size);
  const size_t n = static_cast<size_t>(autoencoder.latent_dim());
  grad::Graph& g = graph_;
  const grad::NodeId x = g.Input({b, static_cast<size_t>(autoencoder.input_dim())}, "x");
  const grad::NodeId noise = g.Input({b, n}, "noise");
  const model::BoundAutoencoder ae = autoencoder.Bind(g);
  const model::BoundEntropyModel em = entropy.Bind(g);
  const PatchLayout layout{autoencoder.patch_size(), autoencoder.channels()};
  grad::NodeId window = x;
  if (cfg_.metric == DistortionMetric::kSsim) window = g.Constant(SsimWindowMatrix(layout), "ssim_window");
  const grad::NodeId y = autoencoder.EncodeGraph(g, ae, x);
  const grad::NodeId y_noisy = g.Add(y, noise);
  const double per_patch = 1.0 / static_cast<double>(batch_size);
  if (conventional) {
    rate_ = g.Scale(entropy.RateGraph(g, em, y_noisy, 1.0, cfg_.rate_unit), per_patch);
    const grad::NodeId x_tilde = autoencoder.DecodeGraph(g, ae, y_noisy);
    d1_ = DistortionGraph(g, x, x_tilde, cfg_.metric, cfg_.mse_scale, window);
    d2_ = g.Constant(grad::Tensor::Scalar(0), "d2");
    const double pixels = static_cast<double>(layout.patch_size) * layout.patch_size;
    loss_ = g.Add(g.Scale(rate_, 1.0 / pixels), g.Scale(d1_, cfg_.lambda1));
  } else {
    rate_ = g.Scale(entropy.RateGraph(g, em, y, cfg_.alpha, cfg_.rate_unit), per_patch);
    const grad::NodeId x_hat = autoencoder.DecodeGraph(g, ae, y);
    const grad::NodeId x_noisy = autoencoder.DecodeGraph(g, ae, y_noisy);
    d1_ = DistortionGraph(g, x, x_hat, cfg_.metric, cfg_.mse_scale, window);
    d2_ = DistortionGraph(g, x_hat, x_noisy, cfg_.metric, cfg_.mse_scale, window);
    const grad::NodeId h = g.Log(g.AddScalar(d1_, kLogFloor));
    loss_ = g.Add(g.Add(rate_, g.Scale(h, cfg_.lambda1)), g.Scale(d2_, cfg_.lambda2));
  }
  g.SetName(loss_, "loss");
  g.SetOutput(loss_);
}

void LossGraph::SampleNoise(Rng& rng, std::span<double> out) const {
  for (double& v : out) v = noise_width_ * (rng.Uniform() - 0.5);
}

LossParts LossGraph::Forward(const grad::Tensor& x, const grad::Tensor& noise) {
  inputs_ = {x, noise};
  graph_.Forward(inputs_);
  LossParts parts;
  const double rate = graph_.Value(rate_)[0];
  parts.rate_bits = cfg_.rate_unit == model::RateUnit::kNats ? rate / std::log(2.0) : rate;
  parts.d1 = graph_.Value(d1_)[0];
  parts.d2 = graph_.Value(d2_)[0];
  parts.loss = graph_.Value(loss_)[0];
  const std::pair<const char*, double> checks[] = {
      {"rate", parts.rate_bits}, {"d1", parts.d1}, {"d2", parts.d2}, {"loss", parts.loss}};
  for (const auto& [name, value] : checks) {
    if (!std::isfinite(value)) {
      Fail(ErrorKind::kNumeric, std::string("non-finite ") + name + " term: " + std::to_string(value));
    }
  }
  return parts;
}

void LossGraph::Backward() { graph_.Backward(grad::Tensor::Scalar(1.0)); }

std::vector<grad::Tensor> LossGraph::LastInputs() const { return inputs_; }

}  // namespace iqdz::training
