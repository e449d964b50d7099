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

#ifndef IQDZ_CODEC_CODEC_H_
#define IQDZ_CODEC_CODEC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "iqdz/coder/bitstream.h"
#include "iqdz/coder/frequency_table.h"
#include "iqdz/metrics/image.h"
#include "iqdz/model/model_file.h"
#include "iqdz/quant/quantizer.h"

namespace iqdz::codec {

// Patch tiling of an image padded up to whole patches.
struct PatchGrid {
  int cols = 0;
  int rows = 0;
  int patch_size = 0;
  static PatchGrid For(int width, int height, int patch_size);
  int padded_width() const { return cols * patch_size; }
  int padded_height() const { return rows * patch_size; }
  size_t num_patches() const { return static_cast<size_t>(cols) * rows; }
};

// Patches in raster order, each flattened as the autoencoder expects, with
// pixels beyond the image edge replicated from the nearest edge pixel.
std::vector<double> ExtractPatches(const metrics::Image& image, const PatchGrid& grid);
// Inverse of ExtractPatches: crops the padding and maps [0, 1] values to
// pixels by round(255 v), half away from zero, clamped to [0, 255].
metrics::Image AssemblePatches(std::span<const double> patches, const PatchGrid& grid, int width,
                               int height, int channels);

struct EncodeOptions {
  quant::QuantConfig quant;
  bool center_median = true;
};

// Symbols before entropy coding, patch-major then latent channel.
struct SymbolStream {
  coder::BitstreamHeader header;
  std::vector<int32_t> symbols;
};

// Header plus clamped dead-zone symbols of every patch latent. The step and
// offset are rounded to float first, as stored in the header.
SymbolStream EncodeSymbols(const metrics::Image& image, const model::CodecModel& model,
                           const EncodeOptions& options);
// One frequency table per latent channel, rebuilt from the header.
std::vector<coder::FrequencyTable> BuildTables(const coder::BitstreamHeader& header,
                                               const model::CodecModel& model);
// Reconstruction from symbols: y_hat = s Q + median, x_hat = g(y_hat).
metrics::Image ReconstructImage(const coder::BitstreamHeader& header,
                                std::span<const int32_t> symbols, const model::CodecModel& model);

coder::CompressedImage EncodeImage(const metrics::Image& image, const model::CodecModel& model,
                            const EncodeOptions& options);
// Raises kModelMismatch when the header hash differs from the model's.
std::vector<int32_t> DecodeSymbols(const coder::CompressedImage& compressed,
                                   const model::CodecModel& model);
metrics::Image DecodeImage(const coder::CompressedImage& compressed,
                           const model::CodecModel& model);

// Size of the serialized bitstream, header included.
uint64_t CompressedBits(const coder::CompressedImage& compressed);

}  // namespace iqdz::codec

#endif  // IQDZ_CODEC_CODEC_H_
