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

#ifndef IQDZ_METRICS_QUALITY_H_
#define IQDZ_METRICS_QUALITY_H_

#include <string>

#include "iqdz/metrics/image.h"

namespace iqdz::metrics {

// Mean squared error on the 0..255 scale over all channels jointly.
double Mse255(const Image& a, const Image& b);

// 10 log10(255^2 / MSE); +infinity for identical images.
double Psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5) applied without
// padding, C1 = (0.01*255)^2, C2 = (0.03*255)^2, mean over the valid region,
// averaged over channels. Needs both sides >= 11.
double Ssim(const Image& a, const Image& b);

// Five-scale MS-SSIM with weights (0.0448, 0.2856, 0.3001, 0.2363, 0.1333).
// Each scale halves the image by 2x2 mean after repeating the last row or
// column of odd-sized inputs. Negative contrast-structure terms clamp to 0.
// Computed per channel, then averaged. Needs both sides >= 176.
double MsSsim(const Image& a, const Image& b);

inline constexpr int kMsSsimMinSide = 176;

// -10 log10(1 - v), capped at 100 dB when 1 - v < 1e-10.
double MsSsimDb(double v);

// Six significant digits; infinity prints as "inf".
std::string FormatMetric(double v);

}  // namespace iqdz::metrics

#endif  // IQDZ_METRICS_QUALITY_H_
