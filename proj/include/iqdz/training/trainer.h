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

#ifndef IQDZ_TRAINING_TRAINER_H_
#define IQDZ_TRAINING_TRAINER_H_

#include <functional>
#include <ostream>
#include <vector>

#include "iqdz/grad/tensor.h"
#include "iqdz/model/model_file.h"
#include "iqdz/training/config.h"
#include "iqdz/training/dataset.h"
#include "iqdz/training/loss.h"

namespace iqdz::training {

inline constexpr uint64_t kMinTrainingPatches = 1000;

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<grad::Tensor*> params, AdamOptions options);
  // Applies one update from the parameters' gradient slots.
  void Step();
  void ZeroGrad();
  int steps() const { return t_; }

 private:
  std::vector<grad::Tensor*> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_, v_;
  int t_ = 0;
};

struct TrainLogEntry {
  int step = 0;
  LossParts parts;
};

using TrainLog = std::vector<TrainLogEntry>;

// "step,L,rate_bits,d1,d2" then one row per step.
void WriteTrainLogCsv(const TrainLog& log, std::ostream& out);

using StepCallback = std::function<void(const TrainLogEntry&)>;

// Trains model in place for cfg.steps Adam steps on batches drawn from the
// sampler, then freezes the entropy model's bounds. Identical inputs give
// bit-identical parameters. A non-finite loss or parameter raises kNumeric
// naming the step.
TrainLog TrainModel(model::CodecModel& model, const PatchSampler& sampler,
                    const TrainConfig& cfg, const StepCallback& on_step = {});

struct TrainResult {
  model::CodecModel model;
  TrainLog log;
};

// Fresh model from cfg.seed, trained with TrainModel. The sampler must offer
// at least kMinTrainingPatches positions.
TrainResult Train(const PatchSampler& sampler, const TrainConfig& cfg,
                  const StepCallback& on_step = {});

}  // namespace iqdz::training

#endif  // IQDZ_TRAINING_TRAINER_H_
