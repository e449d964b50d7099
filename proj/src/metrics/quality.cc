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

#include "iqdz/metrics/quality.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "iqdz/common/error.h"

namespace iqdz::metrics {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;
  double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

void CheckSameShape(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    Fail(ErrorKind::kConfiguration,
         "image shapes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
             "x" + std::to_string(a.channels) + " vs " + std::to_string(b.width) + "x" +
             std::to_string(b.height) + "x" + std::to_string(b.channels));
  }
}

Plane ChannelPlane(const Image& img, int c) {
  Plane p{img.width, img.height, std::vector<double>(static_cast<size_t>(img.width) * img.height)};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) p.v[static_cast<size_t>(y) * p.w + x] = img.at(x, y, c);
  }
  return p;
}

std::array<double, kWindow> GaussianTaps() {
  std::array<double, kWindow> g;
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    g[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& t : g) t /= sum;
  return g;
}

// Separable Gaussian filter over the valid region only.
Plane FilterValid(const Plane& p) {
  static const std::array<double, kWindow> g = GaussianTaps();
  const int ow = p.w - kWindow + 1;
  const int oh = p.h - kWindow + 1;
  Plane rows{ow, p.h, std::vector<double>(static_cast<size_t>(ow) * p.h)};
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * p.at(x + k, y);
      rows.v[static_cast<size_t>(y) * ow + x] = s;
    }
  }
  Plane out{ow, oh, std::vector<double>(static_cast<size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * rows.at(x, y + k);
      out.v[static_cast<size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

Plane Product(const Plane& a, const Plane& b) {
  Plane out{a.w, a.h, std::vector<double>(a.v.size())};
  for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct SsimTerms {
  double ssim;
  double cs;
};

SsimTerms SsimPlane(const Plane& x, const Plane& y) {
  const Plane mx = FilterValid(x);
  const Plane my = FilterValid(y);
  const Plane sxx = FilterValid(Product(x, x));
  const Plane syy = FilterValid(Product(y, y));
  const Plane sxy = FilterValid(Product(x, y));
  double ssim = 0;
  double cs = 0;
  for (size_t i = 0; i < mx.v.size(); ++i) {
    const double mu_x = mx.v[i];
    const double mu_y = my.v[i];
    const double var_x = sxx.v[i] - mu_x * mu_x;
    const double var_y = syy.v[i] - mu_y * mu_y;
    const double cov = sxy.v[i] - mu_x * mu_y;
    const double lum = (2 * mu_x * mu_y + kC1) / (mu_x * mu_x + mu_y * mu_y + kC1);
    const double c = (2 * cov + kC2) / (var_x + var_y + kC2);
    ssim += lum * c;
    cs += c;
  }
  const double n = static_cast<double>(mx.v.size());
  return {ssim / n, cs / n};
}

// 2x2 mean; odd sizes repeat their last row/column first.
Plane Downsample(const Plane& p) {
  const int ow = (p.w + 1) / 2;
  const int oh = (p.h + 1) / 2;
  Plane out{ow, oh, std::vector<double>(static_cast<size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, p.h - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, p.w - 1);
      out.v[static_cast<size_t>(y) * ow + x] =
          (p.at(x0, y0) + p.at(x1, y0) + p.at(x0, y1) + p.at(x1, y1)) / 4;
    }
  }
  return out;
}

}  // namespace

double Mse255(const Image& a, const Image& b) {
  CheckSameShape(a, b);
  double sum = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.pixels.size());
}

double Psnr(const Image& a, const Image& b) {
  const double mse = Mse255(a, b);
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10 * std::log10(255.0 * 255.0 / mse);
}

double Ssim(const Image& a, const Image& b) {
  CheckSameShape(a, b);
  if (a.width < kWindow || a.height < kWindow) {
    Fail(ErrorKind::kConfiguration, "SSIM needs images of at least 11x11");
  }
  double sum = 0;
  for (int c = 0; c < a.channels; ++c) sum += SsimPlane(ChannelPlane(a, c), ChannelPlane(b, c)).ssim;
  return sum / a.channels;
}

double MsSsim(const Image& a, const Image& b) {
  CheckSameShape(a, b);
  if (std::min(a.width, a.height) < kMsSsimMinSide) {
    Fail(ErrorKind::kConfiguration,
         "MS-SSIM needs both sides >= " + std::to_string(kMsSsimMinSide) + ", got " +
             std::to_string(a.width) + "x" + std::to_string(a.height) +
             "; use single-scale SSIM instead");
  }
  double sum = 0;
  for (int c = 0; c < a.channels; ++c) {
    Plane x = ChannelPlane(a, c);
    Plane y = ChannelPlane(b, c);
    double value = 1;
    for (size_t s = 0; s < kScaleWeights.size(); ++s) {
      if (s > 0) {
        x = Downsample(x);
        y = Downsample(y);
      }
      const SsimTerms t = SsimPlane(x, y);
      const bool last = s + 1 == kScaleWeights.size();
      value *= std::pow(std::max(0.0, last ? t.ssim : t.cs), kScaleWeights[s]);
    }
    sum += value;
  }
  return sum / a.channels;
}

double MsSsimDb(double v) {
  const double gap = 1 - v;
  if (gap < 1e-10) return 100;
  return -10 * std::log10(gap);
}

std::string FormatMetric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace iqdz::metrics
