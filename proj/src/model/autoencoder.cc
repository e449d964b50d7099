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

#include "iqdz/model/autoencoder.h"

#include <cmath>
#include <string>

#include "iqdz/common/error.h"
#include "iqdz/common/random.h"
#include "iqdz/grad/kernels.h"

namespace iqdz::model {
namespace {

DenseLayer MakeLayer(LayerSpec spec) {
  return {spec, grad::Tensor({spec.out, spec.in}), grad::Tensor({spec.out})};
}

std::vector<double> ApplyLayers(const std::vector<DenseLayer>& layers,
                                std::span<const double> input) {
  std::vector<double> x(input.begin(), input.end());
  for (const DenseLayer& layer : layers) {
    std::vector<double> y(layer.spec.out);
    const double* w = layer.weight.values().data();
    for (uint32_t o = 0; o < layer.spec.out; ++o) {
      double v = grad::Dot(x.data(), w + static_cast<size_t>(o) * layer.spec.in, layer.spec.in) +
                 layer.bias[o];
      switch (layer.spec.activation) {
        case Activation::kIdentity: break;
        case Activation::kTanh: v = std::tanh(v); break;
        case Activation::kSigmoid: v = grad::StableSigmoid(v); break;
      }
      y[o] = v;
    }
    x = std::move(y);
  }
  return x;
}

grad::NodeId GraphLayers(grad::Graph& g, const std::vector<DenseLayer>& layers,
                         const std::vector<grad::NodeId>& weights,
                         const std::vector<grad::NodeId>& biases, grad::NodeId x) {
  for (size_t i = 0; i < layers.size(); ++i) {
    x = g.Affine(x, weights[i], biases[i]);
    switch (layers[i].spec.activation) {
      case Activation::kIdentity: break;
      case Activation::kTanh: x = g.Tanh(x); break;
      case Activation::kSigmoid: x = g.Sigmoid(x); break;
    }
  }
  return x;
}

void BindLayers(grad::Graph& g, std::vector<DenseLayer>& layers, const std::string& prefix,
                std::vector<grad::NodeId>& weights, std::vector<grad::NodeId>& biases) {
  for (size_t i = 0; i < layers.size(); ++i) {
    const std::string base = prefix + std::to_string(i);
    weights.push_back(g.Parameter(&layers[i].weight, base + ".w"));
    biases.push_back(g.Parameter(&layers[i].bias, base + ".b"));
  }
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

void AutoencoderConfig::Validate() const {
  if (patch_size < 1 || patch_size > 64) {
    Fail(ErrorKind::kConfiguration, "patch_size must be in [1, 64], got " +
                                        std::to_string(patch_size));
  }
  if (channels != 1 && channels != 3) {
    Fail(ErrorKind::kConfiguration, "channels must be 1 or 3, got " + std::to_string(channels));
  }
  if (latent_dim < 1 || latent_dim > 4096) {
    Fail(ErrorKind::kConfiguration, "latent_dim must be in [1, 4096], got " +
                                        std::to_string(latent_dim));
  }
  if (hidden_layers < 0 || hidden_layers > 8) {
    Fail(ErrorKind::kConfiguration, "hidden_layers must be in [0, 8], got " +
                                        std::to_string(hidden_layers));
  }
  if (hidden_width < 0) Fail(ErrorKind::kConfiguration, "hidden_width must be >= 0");
}

Autoencoder Autoencoder::Create(const AutoencoderConfig& config, uint64_t seed) {
  config.Validate();
  const uint32_t n_in = static_cast<uint32_t>(config.patch_size * config.patch_size *
                                              config.channels);
  const uint32_t hidden = config.hidden_width > 0
                              ? static_cast<uint32_t>(config.hidden_width)
                              : static_cast<uint32_t>(4 * config.patch_size * config.patch_size);
  const uint32_t n_lat = static_cast<uint32_t>(config.latent_dim);
  std::vector<LayerSpec> enc, dec;
  uint32_t width = n_in;
  for (int i = 0; i < config.hidden_layers; ++i) {
    enc.push_back({width, hidden, Activation::kTanh});
    width = hidden;
  }
  enc.push_back({width, n_lat, Activation::kIdentity});
  width = n_lat;
  for (int i = 0; i < config.hidden_layers; ++i) {
    dec.push_back({width, hidden, Activation::kTanh});
    width = hidden;
  }
  dec.push_back({width, n_in, Activation::kSigmoid});

  Autoencoder ae = FromSpecs(config.patch_size, config.channels, enc, dec);
  Rng rng(seed);
  for (grad::Tensor* t : ae.Parameters()) {
    if (t->rank() != 2) continue;
    const double limit = std::sqrt(6.0 / static_cast<double>(t->shape()[0] + t->shape()[1]));
    for (double& v : t->values()) v = rng.Uniform(-limit, limit);
  }
  return ae;
}

Autoencoder Autoencoder::FromSpecs(int patch_size, int channels, std::vector<LayerSpec> encoder,
                                   std::vector<LayerSpec> decoder) {
  Autoencoder ae;
  ae.patch_size_ = patch_size;
  ae.channels_ = channels;
  if (encoder.empty() || decoder.empty()) {
    Fail(ErrorKind::kConfiguration, "encoder and decoder need at least one layer");
  }
  ae.latent_dim_ = static_cast<int>(encoder.back().out);
  for (const LayerSpec& s : encoder) ae.encoder_.push_back(MakeLayer(s));
  for (const LayerSpec& s : decoder) ae.decoder_.push_back(MakeLayer(s));
  ae.CheckTopology();
  return ae;
}

void Autoencoder::CheckTopology() const {
  if (patch_size_ < 1 || (channels_ != 1 && channels_ != 3)) {
    Fail(ErrorKind::kConfiguration, "invalid patch geometry");
  }
  const auto check_chain = [](const std::vector<DenseLayer>& layers, size_t in, size_t out,
                              const char* what) {
    size_t width = in;
    for (const DenseLayer& l : layers) {
      if (l.spec.in != width || l.spec.out == 0) {
        Fail(ErrorKind::kConfiguration, std::string(what) + " layer widths do not chain");
      }
      width = l.spec.out;
    }
    if (width != out) {
      Fail(ErrorKind::kConfiguration, std::string(what) + " output width " +
                                          std::to_string(width) + ", expected " +
                                          std::to_string(out));
    }
  };
  check_chain(encoder_, input_dim(), static_cast<size_t>(latent_dim_), "encoder");
  check_chain(decoder_, static_cast<size_t>(latent_dim_), input_dim(), "decoder");
  if (decoder_.back().spec.activation != Activation::kSigmoid) {
    Fail(ErrorKind::kConfiguration, "decoder must end in a sigmoid layer");
  }
}

std::vector<double> Autoencoder::Encode(std::span<const double> patch) const {
  if (patch.size() != input_dim()) {
    Fail(ErrorKind::kConfiguration, "patch has " + std::to_string(patch.size()) +
                                        " values, expected " + std::to_string(input_dim()));
  }
  return ApplyLayers(encoder_, patch);
}

std::vector<double> Autoencoder::Decode(std::span<const double> y) const {
  if (y.size() != static_cast<size_t>(latent_dim_)) {
    Fail(ErrorKind::kConfiguration, "latent has " + std::to_string(y.size()) +
                                        " values, expected " + std::to_string(latent_dim_));
  }
  for (size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      Fail(ErrorKind::kNumeric, "non-finite latent component " + std::to_string(i));
    }
  }
  return ApplyLayers(decoder_, y);
}

BoundAutoencoder Autoencoder::Bind(grad::Graph& graph) {
  BoundAutoencoder b;
  BindLayers(graph, encoder_, "enc", b.encoder_weights, b.encoder_biases);
  BindLayers(graph, decoder_, "dec", b.decoder_weights, b.decoder_biases);
  return b;
}

grad::NodeId Autoencoder::EncodeGraph(grad::Graph& graph, const BoundAutoencoder& bound,
                                      grad::NodeId x) const {
  return GraphLayers(graph, encoder_, bound.encoder_weights, bound.encoder_biases, x);
}

grad::NodeId Autoencoder::DecodeGraph(grad::Graph& graph, const BoundAutoencoder& bound,
                                      grad::NodeId y) const {
  return GraphLayers(graph, decoder_, bound.decoder_weights, bound.decoder_biases, y);
}

std::vector<grad::Tensor*> Autoencoder::Parameters() {
  std::vector<grad::Tensor*> out;
  for (auto* layers : {&encoder_, &decoder_}) {
    for (DenseLayer& l : *layers) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  }
  return out;
}

std::vector<const grad::Tensor*> Autoencoder::Parameters() const {
  std::vector<const grad::Tensor*> out;
  for (auto* layers : {&encoder_, &decoder_}) {
    for (const DenseLayer& l : *layers) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  }
  return out;
}

}  // namespace iqdz::model
