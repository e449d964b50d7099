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

#ifndef IQDZ_TRAINING_DATASET_H_
#define IQDZ_TRAINING_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iqdz/common/random.h"
#include "iqdz/metrics/image.h"
#include "iqdz/training/config.h"

namespace iqdz::training {

// Corpus whose noise-free patch_size x patch_size patches span
// 2 * (latent_dim / 2) balanced orthogonal directions around mean 0.5: the
// regime where every latent dimension is worth coding.
SyntheticSpec BalancedLatticeSpec(int patch_size, int latent_dim);

// Grayscale patch_size x patch_size images, one patch each:
// 0.5 + sum_k a_k b_k over `sources` unit directions b_k with pairwise
// correlation near `correlation` and independent Laplace a_k of scale
// `laplace_scale`. The independent directions are not orthogonal, so a
// latent that only minimizes rate need not be orthogonal either.
struct MixedSourceSpec {
  int images = 20000;
  int sources = 16;
  double correlation = 0.5;
  double laplace_scale = 0.08;
};

std::vector<metrics::Image> MixedSourceCorpus(const MixedSourceSpec& spec, int patch_size,
                                              uint64_t seed);

metrics::Image SyntheticImage(const SyntheticSpec& spec, int channels, Rng& rng);
std::vector<metrics::Image> SyntheticCorpus(const SyntheticSpec& spec, int channels,
                                            uint64_t seed);
// Every .ppm/.pgm file in dir, sorted by name, converted to the requested
// channel count (RGB to gray by channel mean, gray to RGB by replication).
std::vector<metrics::Image> LoadImageDirectory(const std::string& dir, int channels);

// Uniformly samples patch_size x patch_size windows that lie fully inside one
// of the images, as [0, 1] values in the autoencoder's flattened layout.
class PatchSampler {
 public:
  PatchSampler(std::vector<metrics::Image> images, int patch_size);

  size_t patch_values() const { return patch_values_; }
  // Count of distinct window positions across all images.
  uint64_t NumPositions() const { return cumulative_.back(); }
  const std::vector<metrics::Image>& images() const { return images_; }

  void Sample(Rng& rng, size_t count, std::span<double> out) const;
  // Position index in [0, NumPositions()).
  void PatchAt(uint64_t position, std::span<double> out) const;

 private:
  std::vector<metrics::Image> images_;
  int patch_size_;
  size_t patch_values_;
  std::vector<uint64_t> cumulative_;  // positions before each image, plus total
};

}  // namespace iqdz::training

#endif  // IQDZ_TRAINING_DATASET_H_
