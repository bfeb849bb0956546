// kws/feature_io.cc

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

#include "kws/feature_io.h"

#include <fstream>
#include <sstream>

#include "kws/error.h"
#include "kws/io_util.h"

namespace kws {

namespace {
constexpr char kMagic[4] = {'J', 'F', 'E', 'A'};
constexpr uint32_t kVersion = 1;
}  // namespace

void WriteFeatures(const FeatureMatrix& m, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 4);
  PutU32(os, kVersion);
  PutU32(os, static_cast<uint32_t>(m.Dim()));
  PutU32(os, static_cast<uint32_t>(m.NumFrames()));
  PutF32(os, m.frame_shift_ms);
  PutF32Array(os, m.frames.Data(), m.frames.Size());
  WriteFileAtomic(path, os.str());
}

FeatureMatrix ReadFeatures(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file " + path);
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw FormatError("bad feature-file magic in " + path);
  }
  const uint32_t version = GetU32(is, "version");
  if (version != kVersion) {
    throw FormatError("unsupported feature-file version " +
                      std::to_string(version) + " in " + path);
  }
  const uint32_t dim = GetU32(is, "dim");
  const uint32_t num_frames = GetU32(is, "num_frames");
  FeatureMatrix m;
  m.frame_shift_ms = GetF32(is, "frame_shift_ms");
  m.frames.Resize(static_cast<int>(num_frames), static_cast<int>(dim));
  GetF32Array(is, m.frames.Data(), m.frames.Size(), path);
  // A well-formed file ends exactly after the payload.
  char extra;
  is.read(&extra, 1);
  if (is.gcount() != 0) throw CorruptionError("trailing bytes in " + path);
  return m;
}

}  // namespace kws
