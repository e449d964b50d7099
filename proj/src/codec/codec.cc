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

#include "iqdz/codec/codec.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "iqdz/coder/range_coder.h"
#include "iqdz/common/error.h"

namespace iqdz::codec {
namespace {

quant::QuantConfig HeaderQuant(const coder::BitstreamHeader& header) {
  quant::QuantConfig cfg;
  cfg.step = header.step;
  cfg.offset = header.offset;
  cfg.Validate();
  return cfg;
}

double ChannelCenter(const coder::BitstreamHeader& header, const model::CodecModel& model,
                     size_t channel) {
  if ((header.flags & coder::kFlagMedianCentered) == 0) return 0.0;
  return model.entropy.bounds()[channel].median;
}

void CheckModelMatches(const coder::BitstreamHeader& header, const model::CodecModel& model) {
  const uint64_t hash = model::ModelHash(model.autoencoder, model.entropy);
  if (header.model_hash != hash) {
    Fail(ErrorKind::kModelMismatch, "bitstream was encoded with a different model");
  }
  if (header.patch_size != model.autoencoder.patch_size() ||
      header.channels != model.autoencoder.channels() ||
      header.latent_dim != model.autoencoder.latent_dim()) {
    Fail(ErrorKind::kModelMismatch, "bitstream geometry does not match the model");
  }
}

}  // namespace

PatchGrid PatchGrid::For(int width, int height, int patch_size) {
  if (width < 1 || height < 1 || patch_size < 1) {
    Fail(ErrorKind::kConfiguration, "image and patch sizes must be positive");
  }
  return {(width + patch_size - 1) / patch_size, (height + patch_size - 1) / patch_size,
          patch_size};
}

std::vector<double> ExtractPatches(const metrics::Image& image, const PatchGrid& grid) {
  const int p = grid.patch_size;
  const int c = image.channels;
  std::vector<double> out(grid.num_patches() * static_cast<size_t>(p * p * c));
  size_t k = 0;
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      for (int y = 0; y < p; ++y) {
        const int sy = std::min(row * p + y, image.height - 1);
        for (int x = 0; x < p; ++x) {
          const int sx = std::min(col * p + x, image.width - 1);
          for (int ch = 0; ch < c; ++ch) out[k++] = image.at(sx, sy, ch) / 255.0;
        }
      }
    }
  }
  return out;
}

metrics::Image AssemblePatches(std::span<const double> patches, const PatchGrid& grid, int width,
                               int height, int channels) {
  const int p = grid.patch_size;
  const size_t per_patch = static_cast<size_t>(p * p * channels);
  if (patches.size() != grid.num_patches() * per_patch) {
    Fail(ErrorKind::kConfiguration, "patch data does not match the grid");
  }
  metrics::Image out(width, height, channels);
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      const double* patch = patches.data() + (static_cast<size_t>(row) * grid.cols + col) * per_patch;
      for (int y = 0; y < p; ++y) {
        const int iy = row * p + y;
        if (iy >= height) break;
        for (int x = 0; x < p; ++x) {
          const int ix = col * p + x;
          if (ix >= width) break;
          for (int ch = 0; ch < channels; ++ch) {
            const double v = std::round(255.0 * patch[(y * p + x) * channels + ch]);
            out.at(ix, iy, ch) = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
          }
        }
      }
    }
  }
  return out;
}

SymbolStream EncodeSymbols(const metrics::Image& image, const model::CodecModel& model,
                           const EncodeOptions& options) {
  const model::Autoencoder& ae = model.autoencoder;
  if (image.channels != ae.channels()) {
    Fail(ErrorKind::kConfiguration, "image has " + std::to_string(image.channels) +
                                        " channels; the model expects " +
                                        std::to_string(ae.channels()));
  }
  constexpr int kMaxSide = std::numeric_limits<uint16_t>::max();
  if (image.width < 1 || image.height < 1 || image.width > kMaxSide || image.height > kMaxSide) {
    Fail(ErrorKind::kConfiguration, "image sides must be in [1, 65535]");
  }
  SymbolStream out;
  coder::BitstreamHeader& h = out.header;
  h.flags = options.center_median ? coder::kFlagMedianCentered : 0;
  h.width = static_cast<uint16_t>(image.width);
  h.height = static_cast<uint16_t>(image.height);
  h.channels = static_cast<uint8_t>(image.channels);
  h.patch_size = static_cast<uint8_t>(ae.patch_size());
  h.latent_dim = static_cast<uint16_t>(ae.latent_dim());
  h.step = static_cast<float>(options.quant.step);
  h.offset = static_cast<float>(options.quant.offset);
  h.model_hash = model::ModelHash(ae, model.entropy);
  const quant::QuantConfig cfg = HeaderQuant(h);
  const size_t n = static_cast<size_t>(ae.latent_dim());
  for (size_t i = 0; i < n; ++i) {
    const model::ChannelBounds& b = model.entropy.bounds()[i];
    const quant::SymbolRange r =
        quant::ChannelSymbolRange(b.y_min, b.y_max, ChannelCenter(h, model, i), cfg);
    h.bounds.push_back({static_cast<int16_t>(r.s_min), static_cast<int16_t>(r.s_max)});
  }
  const PatchGrid grid = PatchGrid::For(image.width, image.height, ae.patch_size());
  const std::vector<double> patches = ExtractPatches(image, grid);
  const size_t d = ae.input_dim();
  out.symbols.reserve(grid.num_patches() * n);
  for (size_t p = 0; p < grid.num_patches(); ++p) {
    const std::vector<double> y = ae.Encode(std::span(patches).subspan(p * d, d));
    for (size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y[i])) {
        Fail(ErrorKind::kNumeric, "non-finite latent in patch " + std::to_string(p));
      }
      const int64_t s = quant::DeadZoneQuantize(y[i] - ChannelCenter(h, model, i), cfg);
      out.symbols.push_back(
          static_cast<int32_t>(std::clamp<int64_t>(s, h.bounds[i].s_min, h.bounds[i].s_max)));
    }
  }
  return out;
}

std::vector<coder::FrequencyTable> BuildTables(const coder::BitstreamHeader& header,
                                               const model::CodecModel& model) {
  const quant::QuantConfig cfg = HeaderQuant(header);
  std::vector<coder::FrequencyTable> tables;
  for (size_t i = 0; i < header.bounds.size(); ++i) {
    const coder::SymbolBounds& b = header.bounds[i];
    if (b.s_min > 0 || b.s_max < 0 || b.s_min > b.s_max) {
      Fail(ErrorKind::kFormat, "symbol bounds of channel " + std::to_string(i) +
                                   " do not contain 0");
    }
    tables.push_back(quant::BuildFrequencyTable(model.entropy.ChannelCdf(static_cast<int>(i)),
                                                cfg, ChannelCenter(header, model, i),
                                                {b.s_min, b.s_max}));
  }
  return tables;
}

metrics::Image ReconstructImage(const coder::BitstreamHeader& header,
                                std::span<const int32_t> symbols, const model::CodecModel& model) {
  const quant::QuantConfig cfg = HeaderQuant(header);
  const model::Autoencoder& ae = model.autoencoder;
  const PatchGrid grid = PatchGrid::For(header.width, header.height, ae.patch_size());
  const size_t n = static_cast<size_t>(ae.latent_dim());
  if (symbols.size() != grid.num_patches() * n) {
    Fail(ErrorKind::kDecode, "symbol count does not match the image geometry");
  }
  std::vector<double> patches;
  patches.reserve(grid.num_patches() * ae.input_dim());
  std::vector<double> y(n);
  for (size_t p = 0; p < grid.num_patches(); ++p) {
    for (size_t i = 0; i < n; ++i) {
      y[i] = quant::Dequantize(symbols[p * n + i], cfg) + ChannelCenter(header, model, i);
    }
    const std::vector<double> x = ae.Decode(y);
    patches.insert(patches.end(), x.begin(), x.end());
  }
  return AssemblePatches(patches, grid, header.width, header.height, header.channels);
}

coder::CompressedImage EncodeImage(const metrics::Image& image, const model::CodecModel& model,
                                   const EncodeOptions& options) {
  SymbolStream stream = EncodeSymbols(image, model, options);
  const std::vector<coder::FrequencyTable> tables = BuildTables(stream.header, model);
  coder::CompressedImage out;
  out.payload = coder::RangeEncode(stream.symbols, tables);
  out.header = std::move(stream.header);
  return out;
}

std::vector<int32_t> DecodeSymbols(const coder::CompressedImage& compressed,
                                   const model::CodecModel& model) {
  const coder::BitstreamHeader& h = compressed.header;
  CheckModelMatches(h, model);
  const PatchGrid grid = PatchGrid::For(h.width, h.height, h.patch_size);
  const std::vector<coder::FrequencyTable> tables = BuildTables(h, model);
  return coder::RangeDecode(compressed.payload, tables, grid.num_patches() * h.latent_dim);
}

metrics::Image DecodeImage(const coder::CompressedImage& compressed,
                           const model::CodecModel& model) {
  const std::vector<int32_t> symbols = DecodeSymbols(compressed, model);
  return ReconstructImage(compressed.header, symbols, model);
}

uint64_t CompressedBits(const coder::CompressedImage& compressed) {
  return 8 * static_cast<uint64_t>(coder::WriteBitstream(compressed).size());
}

}  // namespace iqdz::codec
