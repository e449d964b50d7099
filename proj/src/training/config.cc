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

#include "iqdz/training/config.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "iqdz/common/error.h"

namespace iqdz::training {
namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno != 0 || !std::isfinite(d)) {
    Fail(ErrorKind::kConfiguration, key + ": expected a number, got '" + v + "'");
  }
  return d;
}

int64_t ParseInt(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0) {
    Fail(ErrorKind::kConfiguration, key + ": expected an integer, got '" + v + "'");
  }
  return i;
}

int ParseInt32(const std::string& key, const std::string& v) {
  const int64_t i = ParseInt(key, v);
  if (i < -(1ll << 31) || i >= (1ll << 31)) Fail(ErrorKind::kConfiguration, key + ": out of range");
  return static_cast<int>(i);
}

DistortionMetric ParseMetric(const std::string& v) {
  if (v == "mse") return DistortionMetric::kMse;
  if (v == "ssim") return DistortionMetric::kSsim;
  Fail(ErrorKind::kConfiguration, "distortion: expected mse or ssim, got '" + v + "'");
}

void Require(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorKind::kConfiguration, what);
}

}  // namespace

std::string_view MetricName(DistortionMetric m) {
  return m == DistortionMetric::kMse ? "mse" : "ssim";
}

std::string_view ObjectiveName(Objective o) {
  return o == Objective::kRaDoGaGa ? "radogaga" : "conventional";
}

TrainConfig TrainConfig::Defaults(DistortionMetric metric) {
  TrainConfig c;
  c.metric = metric;
  if (metric == DistortionMetric::kSsim) {
    c.lambda1 = 1;
    c.lambda2 = 256;
  }
  return c;
}

void TrainConfig::Validate() const {
  Require(std::isfinite(lambda1) && lambda1 > 0, "lambda1 must be > 0");
  // lambda2 = 0 is the ablation that removes the noisy-decoder term.
  Require(std::isfinite(lambda2) && lambda2 >= 0, "lambda2 must be >= 0");
  model::CheckAlpha(alpha);
  Require(mse_scale > 0 && std::isfinite(mse_scale), "mse_scale must be > 0");
  Require(learning_rate > 0 && std::isfinite(learning_rate), "learning_rate must be > 0");
  Require(batch_size >= 1 && batch_size <= 4096, "batch_size must be in [1, 4096]");
  Require(steps >= 0, "steps must be >= 0");
  Require(cdf_init_scale > 0, "cdf_init_scale must be > 0");
  architecture.Validate();
  const SyntheticSpec& s = synthetic;
  Require(s.images >= 1, "synthetic_images must be >= 1");
  Require(s.size >= architecture.patch_size, "synthetic_size must be >= patch_size");
  Require(s.sinusoids >= 0, "synthetic_sinusoids must be >= 0");
  Require(s.frequency_lattice >= 0, "synthetic_frequency_lattice must be >= 0");
  Require(s.period_min > 0 && s.period_max >= s.period_min, "synthetic periods invalid");
  Require(s.sinusoid_std >= 0 && s.noise_std >= 0 && s.noise_sigma >= 0,
          "synthetic amplitudes must be >= 0");
  Require(s.mean_min <= s.mean_max, "synthetic_mean_min must be <= synthetic_mean_max");
}

void ApplyTrainSetting(TrainConfig& c, const std::string& key, const std::string& v) {
  using Setter = std::function<void(const std::string&)>;
  const auto dbl = [&](double& field) -> Setter {
    return [&field, key](const std::string& s) { field = ParseDouble(key, s); };
  };
  const auto i32 = [&](int& field) -> Setter {
    return [&field, key](const std::string& s) { field = ParseInt32(key, s); };
  };
  const std::map<std::string, Setter> setters = {
      {"lambda1", dbl(c.lambda1)},
      {"lambda2", dbl(c.lambda2)},
      {"alpha", dbl(c.alpha)},
      {"distortion", [&](const std::string& s) { c.metric = ParseMetric(s); }},
      {"objective",
       [&](const std::string& s) {
         if (s == "radogaga") {
           c.objective = Objective::kRaDoGaGa;
         } else if (s == "conventional") {
           c.objective = Objective::kConventional;
         } else {
           Fail(ErrorKind::kConfiguration, "objective: expected radogaga or conventional");
         }
       }},
      {"rate_unit",
       [&](const std::string& s) {
         if (s == "bits") {
           c.rate_unit = model::RateUnit::kBits;
         } else if (s == "nats") {
           c.rate_unit = model::RateUnit::kNats;
         } else {
           Fail(ErrorKind::kConfiguration, "rate_unit: expected bits or nats");
         }
       }},
      {"mse_scale", dbl(c.mse_scale)},
      {"learning_rate", dbl(c.learning_rate)},
      {"batch_size", i32(c.batch_size)},
      {"steps", i32(c.steps)},
      {"seed", [&](const std::string& s) { c.seed = static_cast<uint64_t>(ParseInt(key, s)); }},
      {"cdf_init_scale", dbl(c.cdf_init_scale)},
      {"patch_size", i32(c.architecture.patch_size)},
      {"channels", i32(c.architecture.channels)},
      {"latent_dim", i32(c.architecture.latent_dim)},
      {"hidden_layers", i32(c.architecture.hidden_layers)},
      {"hidden_width", i32(c.architecture.hidden_width)},
      {"synthetic_images", i32(c.synthetic.images)},
      {"synthetic_size", i32(c.synthetic.size)},
      {"synthetic_sinusoids", i32(c.synthetic.sinusoids)},
      {"synthetic_frequency_lattice", i32(c.synthetic.frequency_lattice)},
      {"synthetic_period_min", dbl(c.synthetic.period_min)},
      {"synthetic_period_max", dbl(c.synthetic.period_max)},
      {"synthetic_sinusoid_std", dbl(c.synthetic.sinusoid_std)},
      {"synthetic_noise_std", dbl(c.synthetic.noise_std)},
      {"synthetic_noise_sigma", dbl(c.synthetic.noise_sigma)},
      {"synthetic_mean_min", dbl(c.synthetic.mean_min)},
      {"synthetic_mean_max", dbl(c.synthetic.mean_max)},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) Fail(ErrorKind::kConfiguration, "unknown config key '" + key + "'");
  it->second(v);
}

TrainConfig ParseTrainConfig(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorKind::kConfiguration, "config line " + std::to_string(line_no) +
                                          ": expected key = value");
    }
    entries.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  DistortionMetric metric = DistortionMetric::kMse;
  for (const auto& [k, v] : entries) {
    if (k == "distortion") metric = ParseMetric(v);
  }
  TrainConfig cfg = TrainConfig::Defaults(metric);
  for (const auto& [k, v] : entries) ApplyTrainSetting(cfg, k, v);
  cfg.Validate();
  return cfg;
}

std::string FormatTrainConfig(const TrainConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "lambda1 = " << c.lambda1 << "\n"
    << "lambda2 = " << c.lambda2 << "\n"
    << "alpha = " << c.alpha << "\n"
    << "distortion = " << MetricName(c.metric) << "\n"
    << "objective = " << ObjectiveName(c.objective) << "\n"
    << "rate_unit = " << (c.rate_unit == model::RateUnit::kBits ? "bits" : "nats") << "\n"
    << "mse_scale = " << c.mse_scale << "\n"
    << "learning_rate = " << c.learning_rate << "\n"
    << "batch_size = " << c.batch_size << "\n"
    << "steps = " << c.steps << "\n"
    << "seed = " << c.seed << "\n"
    << "cdf_init_scale = " << c.cdf_init_scale << "\n"
    << "patch_size = " << c.architecture.patch_size << "\n"
    << "channels = " << c.architecture.channels << "\n"
    << "latent_dim = " << c.architecture.latent_dim << "\n"
    << "hidden_layers = " << c.architecture.hidden_layers << "\n"
    << "hidden_width = " << c.architecture.hidden_width << "\n"
    << "synthetic_images = " << c.synthetic.images << "\n"
    << "synthetic_size = " << c.synthetic.size << "\n"
    << "synthetic_sinusoids = " << c.synthetic.sinusoids << "\n"
    << "synthetic_frequency_lattice = " << c.synthetic.frequency_lattice << "\n"
    << "synthetic_period_min = " << c.synthetic.period_min << "\n"
    << "synthetic_period_max = " << c.synthetic.period_max << "\n"
    << "synthetic_sinusoid_std = " << c.synthetic.sinusoid_std << "\n"
    << "synthetic_noise_std = " << c.synthetic.noise_std << "\n"
    << "synthetic_noise_sigma = " << c.synthetic.noise_sigma << "\n"
    << "synthetic_mean_min = " << c.synthetic.mean_min << "\n"
    << "synthetic_mean_max = " << c.synthetic.mean_max << "\n";
  return o.str();
}

}  // namespace iqdz::training
