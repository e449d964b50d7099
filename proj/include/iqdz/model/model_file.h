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

#ifndef IQDZ_MODEL_MODEL_FILE_H_
#define IQDZ_MODEL_MODEL_FILE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iqdz/model/autoencoder.h"
#include "iqdz/model/entropy_model.h"

namespace iqdz::model {

struct CodecModel {
  Autoencoder autoencoder;
  EntropyModel entropy;
};

// Layout, little-endian:
//   "IQDZM1" | patch_size u8 | channels u8 | latent_dim u16 |
//   layer spec table | parameter count u64 | parameters f64 |
//   latent_dim x (y_min, y_max, median) f64 | model_hash u64
// The layer spec table is: encoder layer count u8, decoder layer count u8,
// per layer (in u32, out u32, activation u8), CDF layer count u8 and the CDF
// widths u8 each. Parameters follow Autoencoder::Parameters() then
// EntropyModel::Parameters(), each tensor row-major. model_hash is FNV-1a 64
// over every preceding byte.
std::vector<uint8_t> SerializeModel(const Autoencoder& ae, const EntropyModel& em);
// Malformed files and hash mismatches raise kFormat.
CodecModel DeserializeModel(std::span<const uint8_t> bytes);

uint64_t ModelHash(const Autoencoder& ae, const EntropyModel& em);
uint64_t Fnv1a64(std::span<const uint8_t> bytes);

void SaveModel(const std::string& path, const Autoencoder& ae, const EntropyModel& em);
CodecModel LoadModel(const std::string& path);

}  // namespace iqdz::model

#endif  // IQDZ_MODEL_MODEL_FILE_H_
