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

#include "iqdz/cli/cli.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iqdz/cli/selftest.h"
#include "iqdz/codec/codec.h"
#include "iqdz/codec/rd_sweep.h"
#include "iqdz/coder/bitstream.h"
#include "iqdz/common/byte_io.h"
#include "iqdz/common/error.h"
#include "iqdz/common/random.h"
#include "iqdz/grad/grad_check.h"
#include "iqdz/metrics/image.h"
#include "iqdz/metrics/quality.h"
#include "iqdz/model/model_file.h"
#include "iqdz/training/config.h"
#include "iqdz/training/dataset.h"
#include "iqdz/training/isometry.h"
#include "iqdz/training/loss.h"
#include "iqdz/training/trainer.h"

namespace iqdz::cli {
namespace {

// Training settings shared by train, isometry-check and gradcheck. Explicit
// flags override --set entries, which override the --config file.
struct TrainFlags {
  std::string config_path;
  std::vector<std::string> settings;
  std::string distortion = "mse";
  uint64_t seed = 1;
  int steps = 0;
  double lambda1 = 0, lambda2 = 0, alpha = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  CLI::Option* lambda1_opt = nullptr;
  CLI::Option* lambda2_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* distortion_opt = nullptr;
  std::string dir;
  bool balanced_lattice = false;
  bool mixed_sources = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value training config file");
    cmd->add_option("--set", settings, "extra key=value config entries");
    distortion_opt = cmd->add_option("--distortion", distortion, "mse or ssim");
    seed_opt = cmd->add_option("--seed", seed, "seed for initialization, data and noise");
    steps_opt = cmd->add_option("--steps", steps, "optimizer steps");
    lambda1_opt = cmd->add_option("--lambda1", lambda1, "weight of ln D(x, x_hat) (default 5)");
    lambda2_opt = cmd->add_option("--lambda2", lambda2, "weight of D(x_hat, x_noisy) (default 0.2)");
    alpha_opt = cmd->add_option("--alpha", alpha, "noise and probability width (default 0.2)");
    cmd->add_option("--dir", dir, "directory of .ppm/.pgm images (default: synthetic corpus)");
    cmd->add_flag("--balanced-lattice", balanced_lattice,
                  "synthetic corpus whose patches span latent_dim balanced directions");
    cmd->add_flag("--mixed-sources", mixed_sources,
                  "grayscale patches mixing latent_dim Laplace sources along correlated "
                  "directions");
  }

  training::TrainConfig Build() const {
    training::TrainConfig cfg;
    if (!config_path.empty()) {
      const std::vector<uint8_t> bytes = ReadFileBytes(config_path);
      cfg = training::ParseTrainConfig(std::string(bytes.begin(), bytes.end()));
    } else {
      cfg = training::TrainConfig::Defaults(training::DistortionMetric::kMse);
    }
    if (distortion_opt->count() > 0) {
      const training::TrainConfig d = training::TrainConfig::Defaults(
          distortion == "ssim" ? training::DistortionMetric::kSsim
                               : training::DistortionMetric::kMse);
      training::ApplyTrainSetting(cfg, "distortion", distortion);
      cfg.lambda1 = d.lambda1;
      cfg.lambda2 = d.lambda2;
      cfg.alpha = d.alpha;
    }
    for (const std::string& s : settings) {
      const size_t eq = s.find('=');
      if (eq == std::string::npos) {
        Fail(ErrorKind::kConfiguration, "--set expects key=value, got " + s);
      }
      training::ApplyTrainSetting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (steps_opt->count() > 0) cfg.steps = steps;
    if (lambda1_opt->count() > 0) cfg.lambda1 = lambda1;
    if (lambda2_opt->count() > 0) cfg.lambda2 = lambda2;
    if (alpha_opt->count() > 0) cfg.alpha = alpha;
    if (static_cast<int>(balanced_lattice) + static_cast<int>(mixed_sources) +
            static_cast<int>(!dir.empty()) > 1) {
      Fail(ErrorKind::kConfiguration,
           "--dir, --balanced-lattice and --mixed-sources are mutually exclusive");
    }
    if (mixed_sources && cfg.architecture.channels != 1) {
      Fail(ErrorKind::kConfiguration, "--mixed-sources needs channels = 1");
    }
    if (balanced_lattice) {
      const training::SyntheticSpec lattice = training::BalancedLatticeSpec(
          cfg.architecture.patch_size, cfg.architecture.latent_dim);
      cfg.synthetic.sinusoids = lattice.sinusoids;
      cfg.synthetic.frequency_lattice = lattice.frequency_lattice;
      cfg.synthetic.period_min = lattice.period_min;
      cfg.synthetic.period_max = lattice.period_max;
      cfg.synthetic.mean_min = lattice.mean_min;
      cfg.synthetic.mean_max = lattice.mean_max;
    }
    cfg.Validate();
    return cfg;
  }

  std::vector<metrics::Image> Images(const training::TrainConfig& cfg) const {
    if (!dir.empty()) return training::LoadImageDirectory(dir, cfg.architecture.channels);
    // The corpus seed is offset from the model seed so data and weights differ.
    if (mixed_sources) {
      training::MixedSourceSpec spec;
      spec.sources = cfg.architecture.latent_dim;
      return training::MixedSourceCorpus(spec, cfg.architecture.patch_size, cfg.seed + 100);
    }
    return training::SyntheticCorpus(cfg.synthetic, cfg.architecture.channels, cfg.seed + 100);
  }
};

void WriteText(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  WriteFileBytes(path, std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

std::string Num(double v) { return metrics::FormatMetric(v); }

int Train(const TrainFlags& flags, const std::string& out_path, const std::string& log_path,
          int log_every, std::ostream& err) {
  const training::TrainConfig cfg = flags.Build();
  const training::PatchSampler sampler(flags.Images(cfg), cfg.architecture.patch_size);
  err << "training " << cfg.steps << " steps on " << sampler.NumPositions() << " patches\n";
  const training::TrainResult r =
      training::Train(sampler, cfg, [&](const training::TrainLogEntry& e) {
        if (log_every > 0 && e.step % log_every == 0) {
          err << "step " << e.step << " L=" << Num(e.parts.loss)
              << " rate_bits=" << Num(e.parts.rate_bits) << " d1=" << Num(e.parts.d1)
              << " d2=" << Num(e.parts.d2) << "\n";
        }
      });
  model::SaveModel(out_path, r.model.autoencoder, r.model.entropy);
  if (!log_path.empty()) {
    std::ostringstream csv;
    training::WriteTrainLogCsv(r.log, csv);
    WriteText(log_path, csv.str(), err);
  }
  std::ostringstream hash;
  hash << std::hex << model::ModelHash(r.model.autoencoder, r.model.entropy);
  err << "wrote " << out_path << " (model hash " << hash.str() << ")\n";
  return kExitOk;
}

int Encode(const std::string& model_path, const std::string& in, const std::string& out_path,
           double q, double offset, bool no_median, std::ostream& err) {
  const model::CodecModel m = model::LoadModel(model_path);
  const metrics::Image img = metrics::LoadPnm(in);
  codec::EncodeOptions options;
  options.quant.step = q;
  options.quant.offset = offset;
  options.center_median = !no_median;
  const coder::CompressedImage cs = codec::EncodeImage(img, m, options);
  const std::vector<uint8_t> bytes = coder::WriteBitstream(cs);
  WriteFileBytes(out_path, bytes);
  err << "wrote " << out_path << ": " << bytes.size() << " bytes, "
      << Num(8.0 * static_cast<double>(bytes.size()) / (static_cast<double>(img.width) * img.height))
      << " bpp\n";
  return kExitOk;
}

int Decode(const std::string& model_path, const std::string& in, const std::string& out_path,
           std::ostream& err) {
  const model::CodecModel m = model::LoadModel(model_path);
  const coder::CompressedImage cs = coder::ReadBitstream(ReadFileBytes(in));
  const metrics::Image img = codec::DecodeImage(cs, m);
  metrics::SavePnm(out_path, img);
  err << "wrote " << out_path << ": " << img.width << "x" << img.height << "x" << img.channels
      << "\n";
  return kExitOk;
}

int RdSweep(const std::string& model_path, const std::string& dir,
            const std::vector<std::string>& inputs, const std::vector<double>& steps,
            const std::vector<double>& offsets, const std::string& out_path, std::ostream& out) {
  const model::CodecModel m = model::LoadModel(model_path);
  std::vector<metrics::Image> images;
  if (!dir.empty()) images = training::LoadImageDirectory(dir, m.autoencoder.channels());
  for (const std::string& path : inputs) images.push_back(metrics::LoadPnm(path));
  if (images.empty()) Fail(ErrorKind::kConfiguration, "rdsweep needs --dir or --in");
  const std::vector<codec::RdPoint> rows = codec::RdSweep(images, m, steps, offsets);
  std::ostringstream csv;
  codec::WriteRdCsv(rows, csv);
  WriteText(out_path, csv.str(), out);
  return kExitOk;
}

int Isometry(const TrainFlags& flags, const std::string& model_path, int samples,
             const std::string& out_path, std::ostream& out) {
  const training::TrainConfig cfg = flags.Build();
  const model::CodecModel m = model::LoadModel(model_path);
  if (samples < 1) Fail(ErrorKind::kConfiguration, "--samples must be >= 1");
  const training::PatchSampler sampler(flags.Images(cfg), m.autoencoder.patch_size());
  if (sampler.patch_values() != m.autoencoder.input_dim()) {
    Fail(ErrorKind::kConfiguration, "sample images do not match the model's channels");
  }
  Rng rng(cfg.seed ^ 0x5eedull);
  std::vector<double> patches(static_cast<size_t>(samples) * sampler.patch_values());
  sampler.Sample(rng, static_cast<size_t>(samples), patches);
  const training::IsometryReport r = training::IsometryCheck(m.autoencoder, patches, cfg);
  std::ostringstream o;
  o << "metric=" << training::MetricName(cfg.metric) << "\n"
    << "samples=" << r.samples << "\n"
    << "latent_dim=" << r.latent_dim << "\n"
    << "mean_diag=" << Num(r.mean_diag) << "\n"
    << "max_offdiag_ratio=" << Num(r.max_offdiag_ratio) << "\n"
    << "expected_c=" << Num(r.expected_c) << "\n"
    << "expected_c_bits=" << Num(r.expected_c_bits) << "\n"
    << "expected_c_sigma_as_variance=" << Num(r.expected_c_sigma_as_variance) << "\n"
    << "diagonal=";
  for (size_t i = 0; i < r.diagonal.size(); ++i) o << (i ? "," : "") << Num(r.diagonal[i]);
  o << "\n";
  WriteText(out_path, o.str(), out);
  return kExitOk;
}

int GradCheck(const TrainFlags& flags, double tolerance, std::ostream& out) {
  training::TrainConfig cfg = flags.Build();
  cfg.architecture.patch_size = 4;
  cfg.architecture.latent_dim = 4;
  cfg.architecture.hidden_layers = 1;
  cfg.architecture.hidden_width = 16;
  model::Autoencoder ae = model::Autoencoder::Create(cfg.architecture, cfg.seed);
  model::EntropyModel em = model::EntropyModel::Create(4, 2.0);
  training::LossGraph loss(ae, em, cfg, 2);
  Rng rng(cfg.seed);
  grad::Tensor x({2, ae.input_dim()});
  for (double& v : x.values()) v = rng.Uniform();
  grad::Tensor noise({2, 4});
  loss.SampleNoise(rng, noise.values());
  loss.Forward(x, noise);
  const grad::GradCheckReport r = grad::GradCheck(loss.graph(), loss.LastInputs(), tolerance);
  for (const grad::ParameterCheck& p : r.parameters) {
    out << p.name << " elements=" << p.elements << " relative_error=" << Num(p.relative_error)
        << "\n";
  }
  out << "max_relative_error=" << Num(r.max_relative_error) << " tolerance=" << Num(tolerance)
      << " " << (r.passed ? "PASS" : "FAIL") << "\n";
  if (!r.passed) {
    Fail(ErrorKind::kNumeric, "gradient check failed: max relative error " +
                                  Num(r.max_relative_error));
  }
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-rate learned image codec with a dead-zone quantizer", "iqdz"};
  app.require_subcommand(1);

  TrainFlags train_flags, iso_flags, grad_flags;
  std::string model_path, in, out_path, log_path, dir;
  std::vector<std::string> inputs;
  int log_every = 500;
  double q = 1.0, offset = 0.5, tolerance = 1e-5;
  bool no_median = false;
  int samples = 200;
  uint64_t selftest_seed = 1;
  std::vector<double> sweep_steps = codec::kDefaultSweepSteps;
  std::vector<double> sweep_offsets = codec::kDefaultSweepOffsets;

  CLI::App* train = app.add_subcommand("train", "train a model");
  train_flags.Register(train);
  train->add_option("--out", out_path, "model file to write")->required();
  train->add_option("--log", log_path, "CSV training log (step,L,rate_bits,d1,d2)");
  train->add_option("--log-every", log_every, "progress line interval on stderr (0: off)");

  CLI::App* encode = app.add_subcommand("encode", "compress a PPM/PGM image");
  encode->add_option("--model", model_path, "model file")->required();
  encode->add_option("--in", in, "input image")->required();
  encode->add_option("--out", out_path, "bitstream to write")->required();
  encode->add_option("--q", q, "quantization step Q");
  encode->add_option("--offset", offset, "dead-zone rounding offset");
  encode->add_flag("--no-median-centering", no_median, "quantize y instead of y - median");

  CLI::App* decode = app.add_subcommand("decode", "reconstruct an image from a bitstream");
  decode->add_option("--model", model_path, "model file")->required();
  decode->add_option("--in", in, "bitstream")->required();
  decode->add_option("--out", out_path, "PPM/PGM to write")->required();

  CLI::App* sweep = app.add_subcommand("rdsweep", "rate-distortion sweep over Q and offset");
  sweep->add_option("--model", model_path, "model file")->required();
  sweep->add_option("--dir", dir, "directory of .ppm/.pgm images");
  sweep->add_option("--in", inputs, "image files");
  sweep->add_option("--q", sweep_steps, "quantization steps")->delimiter(',');
  sweep->add_option("--offset", sweep_offsets, "rounding offsets")->delimiter(',');
  sweep->add_option("--out", out_path, "CSV to write (default stdout)");

  CLI::App* iso = app.add_subcommand("isometry-check", "Gram matrix of the decoder Jacobian");
  iso_flags.Register(iso);
  iso->add_option("--model", model_path, "model file")->required();
  iso->add_option("--samples", samples, "number of sample patches");
  iso->add_option("--out", out_path, "report to write (default stdout)");

  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check of the full loss");
  grad_flags.Register(gc);
  gc->add_option("--tolerance", tolerance, "maximum relative error");

  CLI::App* self = app.add_subcommand("selftest", "quantizer, coder and metric property suites");
  self->add_option("--seed", selftest_seed, "seed for the random cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "iqdz: error[usage]: " << msg << "\n";
    return kExitUsage;
  }

  try {
    if (*train) return Train(train_flags, out_path, log_path, log_every, err);
    if (*encode) return Encode(model_path, in, out_path, q, offset, no_median, err);
    if (*decode) return Decode(model_path, in, out_path, err);
    if (*sweep) return RdSweep(model_path, dir, inputs, sweep_steps, sweep_offsets, out_path, out);
    if (*iso) return Isometry(iso_flags, model_path, samples, out_path, out);
    if (*gc) return GradCheck(grad_flags, tolerance, out);
    if (*self) {
      if (RunSelfTest(selftest_seed, err)) return kExitOk;
      err << "iqdz: error[selftest]: at least one suite failed\n";
      return kExitFailure;
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "iqdz: error[" << ErrorKindName(e.kind()) << "]: " << msg << "\n";
    return e.kind() == ErrorKind::kConfiguration ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "iqdz: error[internal]: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace iqdz::cli
