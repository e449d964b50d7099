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

#ifndef IQDZ_MODEL_AUTOENCODER_H_
#define IQDZ_MODEL_AUTOENCODER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iqdz/grad/graph.h"
#include "iqdz/grad/tensor.h"

namespace iqdz::model {

enum class Activation : uint8_t {
  kIdentity = 0,
  kTanh = 1,
  kSigmoid = 2,
};

std::string_view ActivationName(Activation a);

struct LayerSpec {
  uint32_t in = 0;
  uint32_t out = 0;
  Activation activation = Activation::kIdentity;
  bool operator==(const LayerSpec&) const = default;
};

struct DenseLayer {
  LayerSpec spec;
  grad::Tensor weight;  // [out, in]
  grad::Tensor bias;    // [out]
};

struct AutoencoderConfig {
  int patch_size = 8;
  int channels = 1;
  int latent_dim = 16;
  int hidden_layers = 2;
  int hidden_width = 0;  // 0 selects 4 * patch_size^2

  void Validate() const;
};

// Parameter nodes of one autoencoder bound into a graph. Binding once and
// reusing the nodes lets several passes share parameters.
struct BoundAutoencoder {
  std::vector<grad::NodeId> encoder_weights, encoder_biases;
  std::vector<grad::NodeId> decoder_weights, decoder_biases;
};

// Dense patch autoencoder. The encoder ends in an identity layer producing
// latent_dim values; the decoder ends in a sigmoid producing
// patch_size^2 * channels values in [0, 1]. Patches are flattened row-major
// with interleaved channels.
class Autoencoder {
 public:
  Autoencoder() = default;
  // Glorot-uniform weights drawn from seed, zero biases.
  static Autoencoder Create(const AutoencoderConfig& config, uint64_t seed);
  // All-zero parameters for the given topology.
  static Autoencoder FromSpecs(int patch_size, int channels, std::vector<LayerSpec> encoder,
                               std::vector<LayerSpec> decoder);

  int patch_size() const { return patch_size_; }
  int channels() const { return channels_; }
  int latent_dim() const { return latent_dim_; }
  size_t input_dim() const { return static_cast<size_t>(patch_size_) * patch_size_ * channels_; }

  std::vector<DenseLayer>& encoder() { return encoder_; }
  const std::vector<DenseLayer>& encoder() const { return encoder_; }
  std::vector<DenseLayer>& decoder() { return decoder_; }
  const std::vector<DenseLayer>& decoder() const { return decoder_; }

  // y = f(patch). Wrong patch length raises kConfiguration.
  std::vector<double> Encode(std::span<const double> patch) const;
  // x = g(y). Non-finite y raises kNumeric.
  std::vector<double> Decode(std::span<const double> y) const;

  BoundAutoencoder Bind(grad::Graph& graph);
  // x: [B, input_dim] -> [B, latent_dim]
  grad::NodeId EncodeGraph(grad::Graph& graph, const BoundAutoencoder& bound,
                           grad::NodeId x) const;
  // y: [B, latent_dim] -> [B, input_dim]
  grad::NodeId DecodeGraph(grad::Graph& graph, const BoundAutoencoder& bound,
                           grad::NodeId y) const;

  // Encoder layers first, weight before bias within a layer.
  std::vector<grad::Tensor*> Parameters();
  std::vector<const grad::Tensor*> Parameters() const;

 private:
  void CheckTopology() const;

  int patch_size_ = 0;
  int channels_ = 0;
  int latent_dim_ = 0;
  std::vector<DenseLayer> encoder_;
  std::vector<DenseLayer> decoder_;
};

}  // namespace iqdz::model

#endif  // IQDZ_MODEL_AUTOENCODER_H_
