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

#include "iqdz/training/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "iqdz/common/error.h"

namespace iqdz::training {
namespace {

double StdDev(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

// Separable Gaussian blur with mirrored borders.
std::vector<double> Blur(const std::vector<double>& img, int size, double sigma) {
  if (sigma <= 0) return img;
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> taps(static_cast<size_t>(2 * radius + 1));
  double sum = 0;
  for (int k = -radius; k <= radius; ++k) {
    taps[static_cast<size_t>(k + radius)] = std::exp(-k * k / (2 * sigma * sigma));
    sum += taps[static_cast<size_t>(k + radius)];
  }
  for (double& t : taps) t /= sum;
  const auto mirror = [size](int i) {
    while (i < 0 || i >= size) i = i < 0 ? -i - 1 : 2 * size - i - 1;
    return i;
  };
  std::vector<double> tmp(img.size()), out(img.size());
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double s = 0;
      for (int k = -radius; k <= radius; ++k) {
        s += taps[static_cast<size_t>(k + radius)] * img[static_cast<size_t>(y * size + mirror(x + k))];
      }
      tmp[static_cast<size_t>(y * size + x)] = s;
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double s = 0;
      for (int k = -radius; k <= radius; ++k) {
        s += taps[static_cast<size_t>(k + radius)] * tmp[static_cast<size_t>(mirror(y + k) * size + x)];
      }
      out[static_cast<size_t>(y * size + x)] = s;
    }
  }
  return out;
}

struct Wave {
  double fx = 0;
  double fy = 0;
};

Wave RandomWave(const SyntheticSpec& spec, Rng& rng) {
  const double period = rng.Uniform(spec.period_min, spec.period_max);
  const double theta = rng.Uniform(0, 2 * std::numbers::pi);
  return {2 * std::numbers::pi / period * std::cos(theta),
          2 * std::numbers::pi / period * std::sin(theta)};
}

// Distinct lattice frequencies from one half-plane, so no two are conjugate.
std::vector<Wave> DrawLatticeBank(const SyntheticSpec& spec, Rng& rng) {
  const int l = spec.frequency_lattice;
  std::vector<Wave> candidates;
  for (int ky = 0; ky < l; ++ky) {
    for (int kx = -l / 2 + 1; kx < l / 2; ++kx) {
      if (ky == 0 && kx <= 0) continue;
      if (2 * ky >= l) continue;
      const double period = l / std::hypot(kx, ky);
      if (period < spec.period_min || period > spec.period_max) continue;
      candidates.push_back({2 * std::numbers::pi * kx / l, 2 * std::numbers::pi * ky / l});
    }
  }
  if (candidates.size() < static_cast<size_t>(spec.sinusoids)) {
    Fail(ErrorKind::kConfiguration,
         "frequency lattice " + std::to_string(l) + " has only " +
             std::to_string(candidates.size()) + " frequencies with period in range");
  }
  for (size_t i = 0; i < static_cast<size_t>(spec.sinusoids); ++i) {
    std::swap(candidates[i], candidates[i + rng.Below(candidates.size() - i)]);
  }
  candidates.resize(static_cast<size_t>(spec.sinusoids));
  return candidates;
}

// Zero-mean texture: sinusoids scaled to sinusoid_std plus smoothed noise
// scaled to noise_std. An empty bank draws fresh frequencies.
std::vector<double> Texture(const SyntheticSpec& spec, const std::vector<Wave>& bank, Rng& rng) {
  const int n = spec.size;
  const size_t count = static_cast<size_t>(n) * n;
  std::vector<double> img(count, 0.0);
  for (int k = 0; k < spec.sinusoids; ++k) {
    const Wave w = bank.empty() ? RandomWave(spec, rng) : bank[static_cast<size_t>(k)];
    const double fx = w.fx;
    const double fy = w.fy;
    const double phase = rng.Uniform(0, 2 * std::numbers::pi);
    const double amp = rng.Uniform(0.5, 1.0);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) img[static_cast<size_t>(y * n + x)] += amp * std::sin(fx * x + fy * y + phase);
    }
  }
  if (spec.sinusoids > 0) {
    const double sd = StdDev(img);
    for (double& v : img) v = sd > 0 ? v / sd * spec.sinusoid_std : 0;
  }
  if (spec.noise_std > 0) {
    std::vector<double> noise(count);
    for (double& v : noise) v = rng.Normal();
    noise = Blur(noise, n, spec.noise_sigma);
    const double sd = StdDev(noise);
    for (size_t i = 0; i < count; ++i) img[i] += noise[i] / sd * spec.noise_std;
  }
  return img;
}

metrics::Image MakeImage(const SyntheticSpec& spec, int channels, const std::vector<Wave>& bank,
                         Rng& rng) {
  metrics::Image out(spec.size, spec.size, channels);
  const std::vector<double> base = Texture(spec, bank, rng);
  for (int c = 0; c < channels; ++c) {
    const double mean = rng.Uniform(spec.mean_min, spec.mean_max);
    std::vector<double> own;
    if (channels > 1) own = Texture(spec, bank, rng);
    for (int y = 0; y < spec.size; ++y) {
      for (int x = 0; x < spec.size; ++x) {
        const size_t i = static_cast<size_t>(y * spec.size + x);
        double v = mean + base[i];
        if (channels > 1) v = mean + 0.8 * base[i] + 0.2 * own[i];
        out.at(x, y, c) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255));
      }
    }
  }
  return out;
}

}  // namespace

SyntheticSpec BalancedLatticeSpec(int patch_size, int latent_dim) {
  SyntheticSpec spec;
  spec.sinusoids = latent_dim / 2;
  spec.frequency_lattice = patch_size;
  spec.period_min = 2.5;
  spec.period_max = patch_size;
  spec.mean_min = 0.5;
  spec.mean_max = 0.5;
  return spec;
}

std::vector<metrics::Image> MixedSourceCorpus(const MixedSourceSpec& spec, int patch_size,
                                              uint64_t seed) {
  if (spec.images < 1 || spec.sources < 1 || patch_size < 1 || !(spec.correlation >= 0) ||
      !(spec.correlation < 1) || !(spec.laplace_scale >= 0)) {
    Fail(ErrorKind::kConfiguration, "invalid mixed-source corpus parameters");
  }
  const size_t n = static_cast<size_t>(patch_size) * patch_size;
  Rng rng(seed);
  std::vector<double> shared(n);
  for (double& v : shared) v = rng.Normal();
  std::vector<std::vector<double>> basis(static_cast<size_t>(spec.sources), std::vector<double>(n));
  for (std::vector<double>& b : basis) {
    double norm = 0;
    for (size_t i = 0; i < n; ++i) {
      b[i] = std::sqrt(spec.correlation) * shared[i] +
             std::sqrt(1 - spec.correlation) * rng.Normal();
      norm += b[i] * b[i];
    }
    for (double& v : b) v /= std::sqrt(norm);
  }
  std::vector<metrics::Image> out;
  out.reserve(static_cast<size_t>(spec.images));
  std::vector<double> patch(n);
  for (int t = 0; t < spec.images; ++t) {
    std::fill(patch.begin(), patch.end(), 0.5);
    for (const std::vector<double>& b : basis) {
      // Inverse CDF of the Laplace distribution.
      const double u = rng.Uniform() - 0.5;
      const double a = -spec.laplace_scale * (u < 0 ? -1 : 1) * std::log(1 - 2 * std::fabs(u));
      for (size_t i = 0; i < n; ++i) patch[i] += a * b[i];
    }
    metrics::Image img(patch_size, patch_size, 1);
    for (size_t i = 0; i < n; ++i) {
      img.pixels[i] = static_cast<uint8_t>(std::lround(255 * std::clamp(patch[i], 0.0, 1.0)));
    }
    out.push_back(std::move(img));
  }
  return out;
}

metrics::Image SyntheticImage(const SyntheticSpec& spec, int channels, Rng& rng) {
  return MakeImage(spec, channels, {}, rng);
}

std::vector<metrics::Image> SyntheticCorpus(const SyntheticSpec& spec, int channels,
                                            uint64_t seed) {
  Rng rng(seed);
  std::vector<Wave> bank;
  if (spec.frequency_lattice > 0) bank = DrawLatticeBank(spec, rng);
  std::vector<metrics::Image> out;
  for (int i = 0; i < spec.images; ++i) out.push_back(MakeImage(spec, channels, bank, rng));
  return out;
}

std::vector<metrics::Image> LoadImageDirectory(const std::string& dir, int channels) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) Fail(ErrorKind::kIo, "not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) paths.push_back(entry.path());
  }
  if (ec) Fail(ErrorKind::kIo, "cannot list " + dir + ": " + ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<metrics::Image> out;
  for (const fs::path& p : paths) {
    metrics::Image img = metrics::LoadPnm(p.string());
    if (img.channels != channels) {
      metrics::Image conv(img.width, img.height, channels);
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          if (channels == 1) {
            const int sum = img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2);
            conv.at(x, y, 0) = static_cast<uint8_t>((sum + 1) / 3);
          } else {
            for (int c = 0; c < 3; ++c) conv.at(x, y, c) = img.at(x, y, 0);
          }
        }
      }
      img = std::move(conv);
    }
    out.push_back(std::move(img));
  }
  if (out.empty()) Fail(ErrorKind::kIo, "no .ppm or .pgm files in " + dir);
  return out;
}

PatchSampler::PatchSampler(std::vector<metrics::Image> images, int patch_size)
    : images_(std::move(images)), patch_size_(patch_size) {
  if (images_.empty()) Fail(ErrorKind::kConfiguration, "patch sampler needs images");
  const int channels = images_[0].channels;
  patch_values_ = static_cast<size_t>(patch_size) * patch_size * channels;
  cumulative_.push_back(0);
  for (const metrics::Image& img : images_) {
    if (img.channels != channels) {
      Fail(ErrorKind::kConfiguration, "images mix channel counts");
    }
    uint64_t n = 0;
    if (img.width >= patch_size && img.height >= patch_size) {
      n = static_cast<uint64_t>(img.width - patch_size + 1) * (img.height - patch_size + 1);
    }
    cumulative_.push_back(cumulative_.back() + n);
  }
  if (cumulative_.back() == 0) {
    Fail(ErrorKind::kConfiguration, "no image is at least " + std::to_string(patch_size) +
                                        " pixels on each side");
  }
}

void PatchSampler::PatchAt(uint64_t position, std::span<double> out) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), position);
  const size_t index = static_cast<size_t>(it - cumulative_.begin()) - 1;
  const metrics::Image& img = images_[index];
  const uint64_t local = position - cumulative_[index];
  const int cols = img.width - patch_size_ + 1;
  const int x0 = static_cast<int>(local % static_cast<uint64_t>(cols));
  const int y0 = static_cast<int>(local / static_cast<uint64_t>(cols));
  size_t k = 0;
  for (int y = 0; y < patch_size_; ++y) {
    for (int x = 0; x < patch_size_; ++x) {
      for (int c = 0; c < img.channels; ++c) out[k++] = img.at(x0 + x, y0 + y, c) / 255.0;
    }
  }
}

void PatchSampler::Sample(Rng& rng, size_t count, std::span<double> out) const {
  for (size_t i = 0; i < count; ++i) {
    PatchAt(rng.Below(NumPositions()), out.subspan(i * patch_values_, patch_values_));
  }
}

}  // namespace iqdz::training
