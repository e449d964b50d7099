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

#include "iqdz/codec/rd_sweep.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iqdz/codec/codec.h"
#include "iqdz/common/error.h"
#include "iqdz/metrics/quality.h"

namespace iqdz::codec {

std::vector<RdPoint> RdSweep(const std::vector<metrics::Image>& images,
                             const model::CodecModel& model, std::vector<double> steps,
                             std::vector<double> offsets) {
  if (images.empty()) Fail(ErrorKind::kConfiguration, "rate-distortion sweep needs images");
  std::sort(steps.begin(), steps.end());
  std::sort(offsets.begin(), offsets.end());
  double pixels = 0;
  bool multiscale = true;
  for (const metrics::Image& img : images) {
    pixels += static_cast<double>(img.width) * img.height;
    multiscale = multiscale && std::min(img.width, img.height) >= metrics::kMsSsimMinSide;
  }
  std::vector<RdPoint> out;
  for (double offset : offsets) {
    for (double step : steps) {
      EncodeOptions options;
      options.quant.step = step;
      options.quant.offset = offset;
      double bits = 0, psnr = 0, msssim = 0;
      for (const metrics::Image& img : images) {
        const coder::CompressedImage cs = EncodeImage(img, model, options);
        const metrics::Image rec = DecodeImage(cs, model);
        bits += static_cast<double>(CompressedBits(cs));
        psnr += metrics::Psnr(img, rec);
        if (multiscale) msssim += metrics::MsSsim(img, rec);
      }
      const double count = static_cast<double>(images.size());
      out.push_back({step, offset, bits / pixels, psnr / count,
                     multiscale ? metrics::MsSsimDb(msssim / count)
                                : std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return out;
}

void WriteRdCsv(const std::vector<RdPoint>& points, std::ostream& out) {
  out << "Q,offset,bpp,psnr_db,msssim_db\n";
  for (const RdPoint& p : points) {
    out << metrics::FormatMetric(p.step) << ',' << metrics::FormatMetric(p.offset) << ','
        << metrics::FormatMetric(p.bpp) << ',' << metrics::FormatMetric(p.psnr_db) << ','
        << metrics::FormatMetric(p.msssim_db) << '\n';
  }
}

}  // namespace iqdz::codec
