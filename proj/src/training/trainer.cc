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

#include "iqdz/training/trainer.h"

#include <cmath>
#include <string>
#include <vector>

#include "iqdz/common/error.h"
#include "iqdz/common/random.h"
#include "iqdz/metrics/quality.h"

namespace iqdz::training {
namespace {

// Data order and noise draw from their own stream so that changing the
// initialization does not reshuffle batches.
constexpr uint64_t kDataStreamSalt = 0x9e3779b97f4a7c15ull;

}  // namespace

Adam::Adam(std::vector<grad::Tensor*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (grad::Tensor* p : params_) {
    p->EnableGrad();
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

void Adam::ZeroGrad() {
  for (grad::Tensor* p : params_) p->ZeroGrad();
}

void Adam::Step() {
  ++t_;
  const double c1 = 1 - std::pow(options_.beta1, t_);
  const double c2 = 1 - std::pow(options_.beta2, t_);
  for (size_t i = 0; i < params_.size(); ++i) {
    auto values = params_[i]->values();
    auto grads = params_[i]->grad();
    std::vector<double>& m = m_[i];
    std::vector<double>& v = v_[i];
    for (size_t k = 0; k < values.size(); ++k) {
      const double g = grads[k];
      m[k] = options_.beta1 * m[k] + (1 - options_.beta1) * g;
      v[k] = options_.beta2 * v[k] + (1 - options_.beta2) * g * g;
      values[k] -= options_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + options_.epsilon);
    }
  }
}

void WriteTrainLogCsv(const TrainLog& log, std::ostream& out) {
  out << "step,L,rate_bits,d1,d2\n";
  for (const TrainLogEntry& e : log) {
    out << e.step << ',' << metrics::FormatMetric(e.parts.loss) << ','
        << metrics::FormatMetric(e.parts.rate_bits) << ',' << metrics::FormatMetric(e.parts.d1)
        << ',' << metrics::FormatMetric(e.parts.d2) << '\n';
  }
}

TrainLog TrainModel(model::CodecModel& model, const PatchSampler& sampler,
                    const TrainConfig& cfg, const StepCallback& on_step) {
  cfg.Validate();
  if (sampler.patch_values() != model.autoencoder.input_dim()) {
    Fail(ErrorKind::kConfiguration, "patches hold " + std::to_string(sampler.patch_values()) +
                                        " values but the model expects " +
                                        std::to_string(model.autoencoder.input_dim()));
  }
  if (sampler.NumPositions() < kMinTrainingPatches) {
    Fail(ErrorKind::kConfiguration, "training data yields " +
                                        std::to_string(sampler.NumPositions()) +
                                        " patches; at least " +
                                        std::to_string(kMinTrainingPatches) + " are required");
  }
  LossGraph loss(model.autoencoder, model.entropy, cfg, cfg.batch_size);
  Adam adam(loss.Parameters(), AdamOptions{.learning_rate = cfg.learning_rate});
  Rng rng(cfg.seed ^ kDataStreamSalt);
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  grad::Tensor x({batch, sampler.patch_values()});
  grad::Tensor noise({batch, static_cast<size_t>(model.autoencoder.latent_dim())});
  TrainLog log;
  log.reserve(static_cast<size_t>(cfg.steps));
  for (int step = 1; step <= cfg.steps; ++step) {
    sampler.Sample(rng, batch, x.values());
    loss.SampleNoise(rng, noise.values());
    TrainLogEntry entry{step, {}};
    try {
      entry.parts = loss.Forward(x, noise);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumeric) throw;
      Fail(ErrorKind::kNumeric, "training diverged at step " + std::to_string(step) + ": " +
                                    e.what());
    }
    adam.ZeroGrad();
    loss.Backward();
    adam.Step();
    for (const grad::Tensor* p : loss.Parameters()) {
      if (!p->AllFinite()) {
        Fail(ErrorKind::kNumeric,
             "training diverged at step " + std::to_string(step) + ": non-finite parameter");
      }
    }
    log.push_back(entry);
    if (on_step) on_step(entry);
  }
  model.entropy.FreezeBounds();
  return log;
}

TrainResult Train(const PatchSampler& sampler, const TrainConfig& cfg,
                  const StepCallback& on_step) {
  cfg.Validate();
  TrainResult result{{model::Autoencoder::Create(cfg.architecture, cfg.seed),
                      model::EntropyModel::Create(cfg.architecture.latent_dim, cfg.cdf_init_scale)},
                     {}};
  result.log = TrainModel(result.model, sampler, cfg, on_step);
  return result;
}

}  // namespace iqdz::training
