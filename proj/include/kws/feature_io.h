// kws/feature_io.h

// Copyright 2026  kwsearch contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef KWS_FEATURE_IO_H_
#define KWS_FEATURE_IO_H_

#include <string>

#include "kws/matrix.h"

namespace kws {

// Acoustic (or encoded) feature frames with their frame-shift metadata.
struct FeatureMatrix {
  float frame_shift_ms = 0.0f;
  Matrix<float> frames;  // N x dim

  int NumFrames() const { return frames.Rows(); }
  int Dim() const { return frames.Cols(); }
  double DurationSec() const {
    return NumFrames() * static_cast<double>(frame_shift_ms) / 1000.0;
  }
};

// Binary container (all fields little-endian):
//   magic "JFEA", version u32 = 1, dim u32, num_frames u32,
//   frame_shift_ms f32, then num_frames*dim row-major f32 values.
// read(write(m)) is bit-exact.
void WriteFeatures(const FeatureMatrix& m, const std::string& path);
FeatureMatrix ReadFeatures(const std::string& path);

}  // namespace kws

#endif  // KWS_FEATURE_IO_H_
