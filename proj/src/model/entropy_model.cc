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

#include "iqdz/model/entropy_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "iqdz/common/error.h"
#include "iqdz/grad/kernels.h"

namespace iqdz::model {
namespace {

constexpr int Rows(int layer) { return EntropyModel::kWidths[layer + 1]; }
constexpr int Cols(int layer) { return EntropyModel::kWidths[layer]; }
constexpr bool HasGate(int layer) { return layer + 1 < EntropyModel::kNumLayers; }

size_t LayerSize(int layer) {
  return static_cast<size_t>(Rows(layer)) * Cols(layer) + Rows(layer) +
         (HasGate(layer) ? Rows(layer) : 0);
}

}  // namespace

void CheckAlpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) {
    Fail(ErrorKind::kConfiguration, "alpha must be in (0, 1), got " + std::to_string(alpha));
  }
}

size_t EntropyModel::LayerOffset(int layer) {
  size_t off = 0;
  for (int l = 0; l < layer; ++l) off += LayerSize(l);
  return off;
}

size_t EntropyModel::NumParameterTensors() { return LayerOffset(kNumLayers); }

EntropyModel EntropyModel::Create(int channels, double init_scale) {
  if (channels < 1) Fail(ErrorKind::kConfiguration, "entropy model needs >= 1 channel");
  if (!(init_scale > 0)) Fail(ErrorKind::kConfiguration, "init_scale must be > 0");
  EntropyModel em;
  em.channels_ = channels;
  const size_t n = static_cast<size_t>(channels);
  const double per_layer = std::pow(init_scale, 1.0 / kNumLayers);
  for (int l = 0; l < kNumLayers; ++l) {
    const double w = std::log(std::expm1(1.0 / per_layer / Rows(l)));
    for (int k = 0; k < Rows(l) * Cols(l); ++k) em.params_.emplace_back(grad::Shape{n}, w);
    // Antisymmetric biases keep the network odd, so cdf(0) = 0.5.
    for (int r = 0; r < Rows(l); ++r) {
      const double b = Rows(l) == 1 ? 0.0 : 0.5 * (2.0 * r / (Rows(l) - 1) - 1.0);
      em.params_.emplace_back(grad::Shape{n}, b);
    }
    if (HasGate(l)) {
      for (int r = 0; r < Rows(l); ++r) em.params_.emplace_back(grad::Shape{n}, 0.0);
    }
  }
  em.FreezeBounds();
  return em;
}

double EntropyModel::Cdf(int channel, double y) const {
  const size_t c = static_cast<size_t>(channel);
  double in[3] = {y, 0, 0};
  double out[3];
  for (int l = 0; l < kNumLayers; ++l) {
    const size_t base = LayerOffset(l);
    const size_t bias_base = base + static_cast<size_t>(Rows(l) * Cols(l));
    const size_t gate_base = bias_base + static_cast<size_t>(Rows(l));
    for (int r = 0; r < Rows(l); ++r) {
      double z = 0;
      for (int k = 0; k < Cols(l); ++k) {
        const double t =
            grad::StableSoftplus(params_[base + static_cast<size_t>(r * Cols(l) + k)][c]) * in[k];
        z = k == 0 ? t : z + t;
      }
      z = z + params_[bias_base + static_cast<size_t>(r)][c];
      if (HasGate(l)) {
        z = z + std::tanh(params_[gate_base + static_cast<size_t>(r)][c]) * std::tanh(z);
      }
      out[r] = z;
    }
    for (int r = 0; r < Rows(l); ++r) in[r] = out[r];
  }
  return grad::StableSigmoid(in[0]);
}

std::function<double(double)> EntropyModel::ChannelCdf(int channel) const {
  return [this, channel](double y) { return Cdf(channel, y); };
}

double EntropyModel::RateBits(std::span<const double> y, double alpha) const {
  CheckAlpha(alpha);
  if (y.size() % static_cast<size_t>(channels_) != 0) {
    Fail(ErrorKind::kConfiguration, "latent length " + std::to_string(y.size()) +
                                        " is not a multiple of " + std::to_string(channels_));
  }
  double bits = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    const int c = static_cast<int>(i % static_cast<size_t>(channels_));
    const double p = Cdf(c, y[i] + alpha / 2) - Cdf(c, y[i] - alpha / 2);
    bits -= std::log2(std::max(p, kRateProbabilityFloor));
  }
  return bits;
}

double EntropyModel::Quantile(int channel, double q) const {
  double lo = -1, hi = 1;
  while (Cdf(channel, lo) > q) {
    lo *= 2;
    if (lo < -1e12) Fail(ErrorKind::kNumeric, "CDF of channel " + std::to_string(channel) +
                                                  " never falls below " + std::to_string(q));
  }
  while (Cdf(channel, hi) < q) {
    hi *= 2;
    if (hi > 1e12) Fail(ErrorKind::kNumeric, "CDF of channel " + std::to_string(channel) +
                                                 " never rises above " + std::to_string(q));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (Cdf(channel, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void EntropyModel::FreezeBounds() {
  bounds_.resize(static_cast<size_t>(channels_));
  for (int c = 0; c < channels_; ++c) {
    ChannelBounds& b = bounds_[static_cast<size_t>(c)];
    b.y_min = Quantile(c, kLowerQuantile);
    b.y_max = Quantile(c, kUpperQuantile);
    b.median = Quantile(c, 0.5);
  }
}

void EntropyModel::set_bounds(std::vector<ChannelBounds> b) {
  if (b.size() != static_cast<size_t>(channels_)) {
    Fail(ErrorKind::kConfiguration, "bounds count does not match channels");
  }
  for (const ChannelBounds& cb : b) {
    if (!(cb.y_min <= cb.median && cb.median <= cb.y_max)) {
      Fail(ErrorKind::kConfiguration, "bounds must satisfy y_min <= median <= y_max");
    }
  }
  bounds_ = std::move(b);
}

std::vector<double> EntropyModel::Medians() const {
  std::vector<double> m;
  for (const ChannelBounds& b : bounds_) m.push_back(b.median);
  return m;
}

BoundEntropyModel EntropyModel::Bind(grad::Graph& graph) {
  BoundEntropyModel b;
  for (int l = 0; l < kNumLayers; ++l) {
    const size_t base = LayerOffset(l);
    const std::string prefix = "cdf" + std::to_string(l);
    size_t i = base;
    for (int k = 0; k < Rows(l) * Cols(l); ++k, ++i) {
      const grad::NodeId raw = graph.Parameter(&params_[i], prefix + ".H" + std::to_string(k));
      b.positive_weights.push_back(graph.Softplus(raw));
    }
    for (int r = 0; r < Rows(l); ++r, ++i) {
      b.biases.push_back(graph.Parameter(&params_[i], prefix + ".b" + std::to_string(r)));
    }
    if (HasGate(l)) {
      for (int r = 0; r < Rows(l); ++r, ++i) {
        const grad::NodeId raw = graph.Parameter(&params_[i], prefix + ".a" + std::to_string(r));
        b.gates.push_back(graph.Tanh(raw));
      }
    }
  }
  return b;
}

grad::NodeId EntropyModel::CdfGraph(grad::Graph& g, const BoundEntropyModel& bound,
                                    grad::NodeId u) const {
  std::vector<grad::NodeId> in = {u};
  size_t wi = 0, bi = 0, gi = 0;
  for (int l = 0; l < kNumLayers; ++l) {
    std::vector<grad::NodeId> out;
    for (int r = 0; r < Rows(l); ++r) {
      grad::NodeId z{};
      for (int k = 0; k < Cols(l); ++k) {
        const grad::NodeId t = g.Multiply(bound.positive_weights[wi++], in[static_cast<size_t>(k)]);
        z = k == 0 ? t : g.Add(z, t);
      }
      z = g.Add(z, bound.biases[bi++]);
      if (HasGate(l)) z = g.Add(z, g.Multiply(bound.gates[gi++], g.Tanh(z)));
      out.push_back(z);
    }
    in = std::move(out);
  }
  return g.Sigmoid(in[0]);
}

grad::NodeId EntropyModel::RateGraph(grad::Graph& g, const BoundEntropyModel& bound,
                                     grad::NodeId y, double alpha, RateUnit unit) const {
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    Fail(ErrorKind::kConfiguration, "rate interval width must be positive");
  }
  const grad::NodeId upper = CdfGraph(g, bound, g.AddScalar(y, alpha / 2));
  const grad::NodeId lower = CdfGraph(g, bound, g.AddScalar(y, -alpha / 2));
  const grad::NodeId p = g.AddScalar(g.Subtract(upper, lower), kRateProbabilityFloor);
  const double scale = unit == RateUnit::kBits ? -1.0 / std::log(2.0) : -1.0;
  return g.Scale(g.Sum(g.Log(p)), scale);
}

std::vector<grad::Tensor*> EntropyModel::Parameters() {
  std::vector<grad::Tensor*> out;
  for (grad::Tensor& t : params_) out.push_back(&t);
  return out;
}

std::vector<const grad::Tensor*> EntropyModel::Parameters() const {
  std::vector<const grad::Tensor*> out;
  for (const grad::Tensor& t : params_) out.push_back(&t);
  return out;
}

}  // namespace iqdz::model
