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

#include "iqdz/model/model_file.h"

#include <cmath>
#include <string>

#include "iqdz/common/byte_io.h"
#include "iqdz/common/error.h"

namespace iqdz::model {
namespace {

constexpr char kMagic[] = "IQDZM1";
constexpr size_t kMagicSize = 6;

void WriteLayers(ByteWriter& w, const std::vector<DenseLayer>& layers) {
  for (const DenseLayer& l : layers) {
    w.U32(l.spec.in);
    w.U32(l.spec.out);
    w.U8(static_cast<uint8_t>(l.spec.activation));
  }
}

std::vector<LayerSpec> ReadLayers(ByteReader& r, size_t count) {
  std::vector<LayerSpec> out(count);
  for (LayerSpec& s : out) {
    s.in = r.U32();
    s.out = r.U32();
    const uint8_t act = r.U8();
    if (act > static_cast<uint8_t>(Activation::kSigmoid)) {
      Fail(ErrorKind::kFormat, "unknown activation code " + std::to_string(act));
    }
    if (s.in == 0 || s.out == 0 || s.in > (1u << 20) || s.out > (1u << 20)) {
      Fail(ErrorKind::kFormat, "implausible layer width in model file");
    }
    s.activation = static_cast<Activation>(act);
  }
  return out;
}

}  // namespace

uint64_t Fnv1a64(std::span<const uint8_t> bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<uint8_t> SerializeModel(const Autoencoder& ae, const EntropyModel& em) {
  if (em.channels() != ae.latent_dim()) {
    Fail(ErrorKind::kConfiguration, "entropy model has " + std::to_string(em.channels()) +
                                        " channels for latent_dim " +
                                        std::to_string(ae.latent_dim()));
  }
  ByteWriter w;
  w.Chars(std::string_view(kMagic, kMagicSize));
  w.U8(static_cast<uint8_t>(ae.patch_size()));
  w.U8(static_cast<uint8_t>(ae.channels()));
  w.U16(static_cast<uint16_t>(ae.latent_dim()));
  w.U8(static_cast<uint8_t>(ae.encoder().size()));
  w.U8(static_cast<uint8_t>(ae.decoder().size()));
  WriteLayers(w, ae.encoder());
  WriteLayers(w, ae.decoder());
  w.U8(EntropyModel::kNumLayers);
  for (int width : EntropyModel::kWidths) w.U8(static_cast<uint8_t>(width));

  uint64_t count = 0;
  for (const grad::Tensor* t : ae.Parameters()) count += t->size();
  for (const grad::Tensor* t : em.Parameters()) count += t->size();
  w.U64(count);
  for (const grad::Tensor* t : ae.Parameters()) {
    for (double v : t->values()) w.F64(v);
  }
  for (const grad::Tensor* t : em.Parameters()) {
    for (double v : t->values()) w.F64(v);
  }
  for (const ChannelBounds& b : em.bounds()) {
    w.F64(b.y_min);
    w.F64(b.y_max);
    w.F64(b.median);
  }
  w.U64(Fnv1a64(w.bytes()));
  return w.Take();
}

CodecModel DeserializeModel(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.Bytes(kMagicSize);
  if (std::string(magic.begin(), magic.end()) != kMagic) {
    Fail(ErrorKind::kFormat, "bad magic, not an IQDZ model file");
  }
  const int patch = r.U8();
  const int channels = r.U8();
  const int latent = r.U16();
  const size_t n_enc = r.U8();
  const size_t n_dec = r.U8();
  std::vector<LayerSpec> enc = ReadLayers(r, n_enc);
  std::vector<LayerSpec> dec = ReadLayers(r, n_dec);
  const int cdf_layers = r.U8();
  bool widths_ok = cdf_layers == EntropyModel::kNumLayers;
  for (int i = 0; widths_ok && i <= cdf_layers; ++i) {
    widths_ok = r.U8() == EntropyModel::kWidths[i];
  }
  if (!widths_ok) Fail(ErrorKind::kFormat, "unsupported entropy model topology");

  CodecModel m;
  try {
    m.autoencoder = Autoencoder::FromSpecs(patch, channels, std::move(enc), std::move(dec));
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("model topology: ") + e.what());
  }
  if (m.autoencoder.latent_dim() != latent) {
    Fail(ErrorKind::kFormat, "latent_dim field disagrees with encoder output width");
  }
  m.entropy = EntropyModel::Create(latent);

  uint64_t expected = 0;
  for (const grad::Tensor* t : m.autoencoder.Parameters()) expected += t->size();
  for (const grad::Tensor* t : m.entropy.Parameters()) expected += t->size();
  const uint64_t count = r.U64();
  if (count != expected) {
    Fail(ErrorKind::kFormat, "parameter count " + std::to_string(count) + ", topology needs " +
                                 std::to_string(expected));
  }
  for (grad::Tensor* t : m.autoencoder.Parameters()) {
    for (double& v : t->values()) v = r.F64();
  }
  for (grad::Tensor* t : m.entropy.Parameters()) {
    for (double& v : t->values()) v = r.F64();
  }
  std::vector<ChannelBounds> bounds(static_cast<size_t>(latent));
  for (ChannelBounds& b : bounds) {
    b.y_min = r.F64();
    b.y_max = r.F64();
    b.median = r.F64();
  }
  const size_t body = r.position();
  const uint64_t hash = r.U64();
  if (r.remaining() != 0) Fail(ErrorKind::kFormat, "trailing bytes after model hash");
  if (hash != Fnv1a64(bytes.first(body))) Fail(ErrorKind::kFormat, "model hash mismatch");
  for (const grad::Tensor* t : m.autoencoder.Parameters()) {
    if (!t->AllFinite()) Fail(ErrorKind::kFormat, "non-finite autoencoder parameter");
  }
  for (const grad::Tensor* t : m.entropy.Parameters()) {
    if (!t->AllFinite()) Fail(ErrorKind::kFormat, "non-finite entropy model parameter");
  }
  try {
    m.entropy.set_bounds(std::move(bounds));
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, e.what());
  }
  return m;
}

uint64_t ModelHash(const Autoencoder& ae, const EntropyModel& em) {
  const std::vector<uint8_t> bytes = SerializeModel(ae, em);
  ByteReader r{std::span<const uint8_t>(bytes).last(8)};
  return r.U64();
}

void SaveModel(const std::string& path, const Autoencoder& ae, const EntropyModel& em) {
  WriteFileBytes(path, SerializeModel(ae, em));
}

CodecModel LoadModel(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  try {
    return DeserializeModel(bytes);
  } catch (const Error& e) {
    Fail(e.kind(), path + ": " + e.what());
  }
}

}  // namespace iqdz::model
