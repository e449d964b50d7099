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

#ifndef IQDZ_MODEL_ENTROPY_MODEL_H_
#define IQDZ_MODEL_ENTROPY_MODEL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "iqdz/grad/graph.h"
#include "iqdz/grad/tensor.h"

namespace iqdz::model {

inline constexpr double kRateProbabilityFloor = 0x1p-50;
inline constexpr double kDefaultAlpha = 0.2;

enum class RateUnit : uint8_t { kBits, kNats };

// Per-channel trained bounds: the 0.0005, 0.9995 and 0.5 quantiles of the
// channel CDF.
struct ChannelBounds {
  double y_min = 0;
  double y_max = 0;
  double median = 0;
  bool operator==(const ChannelBounds&) const = default;
};

inline constexpr double kLowerQuantile = 0.0005;
inline constexpr double kUpperQuantile = 0.9995;

struct BoundEntropyModel {
  std::vector<grad::NodeId> positive_weights;  // softplus of raw weights
  std::vector<grad::NodeId> biases;
  std::vector<grad::NodeId> gates;  // tanh of raw gate factors
};

// Factorized monotone CDF, one scalar network per latent channel:
//   z = softplus(H_k) z + b_k,  z += tanh(a_k) * tanh(z)   (all but last)
//   cdf = sigmoid(z)
// with layer widths 1-3-3-1. Each matrix, bias and gate entry is a tensor of
// shape [channels], so a [B, channels] batch evaluates every channel at once.
class EntropyModel {
 public:
  static constexpr int kNumLayers = 3;
  static constexpr int kWidths[kNumLayers + 1] = {1, 3, 3, 1};

  EntropyModel() = default;
  // Symmetric initialization with cdf(0) = 0.5 in every channel and overall
  // slope 1 / init_scale at 0. Bounds are frozen from the initial CDF.
  static EntropyModel Create(int channels, double init_scale = 10.0);

  int channels() const { return channels_; }

  double Cdf(int channel, double y) const;
  std::function<double(double)> ChannelCdf(int channel) const;

  // Sum over channels of -log2 max(CDF(y + a/2) - CDF(y - a/2), 2^-50).
  // alpha outside (0, 1) raises kConfiguration.
  double RateBits(std::span<const double> y, double alpha = kDefaultAlpha) const;

  // Recomputes bounds from the current CDF by bisection.
  void FreezeBounds();
  const std::vector<ChannelBounds>& bounds() const { return bounds_; }
  void set_bounds(std::vector<ChannelBounds> b);
  std::vector<double> Medians() const;

  BoundEntropyModel Bind(grad::Graph& graph);
  // u: [B, channels] -> CDF values of the same shape.
  grad::NodeId CdfGraph(grad::Graph& graph, const BoundEntropyModel& bound,
                        grad::NodeId u) const;
  // Scalar total of -log(P + 2^-50) over every element of y [B, channels],
  // in the requested unit, with P the CDF mass of [y - alpha/2, y + alpha/2].
  // Any positive width is accepted here.
  grad::NodeId RateGraph(grad::Graph& graph, const BoundEntropyModel& bound, grad::NodeId y,
                         double alpha, RateUnit unit) const;

  // Per layer: weights row-major, then biases, then gates (all but last).
  std::vector<grad::Tensor*> Parameters();
  std::vector<const grad::Tensor*> Parameters() const;
  static size_t NumParameterTensors();

 private:
  static size_t LayerOffset(int layer);
  double Quantile(int channel, double q) const;

  int channels_ = 0;
  std::vector<grad::Tensor> params_;
  std::vector<ChannelBounds> bounds_;
};

void CheckAlpha(double alpha);

}  // namespace iqdz::model

#endif  // IQDZ_MODEL_ENTROPY_MODEL_H_
