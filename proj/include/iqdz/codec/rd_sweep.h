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

#ifndef IQDZ_CODEC_RD_SWEEP_H_
#define IQDZ_CODEC_RD_SWEEP_H_

#include <ostream>
#include <vector>

#include "iqdz/metrics/image.h"
#include "iqdz/model/model_file.h"

namespace iqdz::codec {

inline const std::vector<double> kDefaultSweepSteps = {0.5, 0.75, 1,   1.25, 1.5, 1.75,
                                                       2,   2.5,  3,   3.5,  4};
inline const std::vector<double> kDefaultSweepOffsets = {0.4, 0.45, 0.5};

struct RdPoint {
  double step = 0;
  double offset = 0;
  // Serialized bits, header included, over all images / total pixel count.
  double bpp = 0;
  // Mean of per-image PSNR.
  double psnr_db = 0;
  // MsSsimDb of the mean per-image MS-SSIM; NaN when any image is smaller
  // than the five-scale minimum.
  double msssim_db = 0;
};

// Rows sorted by offset, then step.
std::vector<RdPoint> RdSweep(const std::vector<metrics::Image>& images,
                             const model::CodecModel& model, std::vector<double> steps,
                             std::vector<double> offsets);

// Header "Q,offset,bpp,psnr_db,msssim_db".
void WriteRdCsv(const std::vector<RdPoint>& points, std::ostream& out);

}  // namespace iqdz::codec

#endif  // IQDZ_CODEC_RD_SWEEP_H_
