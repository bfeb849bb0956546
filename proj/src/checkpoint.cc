// kws/checkpoint.cc

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

#include "kws/checkpoint.h"

#include <fstream>
#include <sstream>

#include "kws/error.h"
#include "kws/io_util.h"

namespace kws {

namespace {
constexpr char kMagic[4] = {'K', 'W', 'S', 'C'};
constexpr uint32_t kVersion = 1;

void PutName(std::ostream& os, const std::string& name) {
  PutU32(os, static_cast<uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
}

std::string GetName(std::istream& is) {
  const uint32_t len = GetU32(is, "name length");
  std::string name(len, '\0');
  is.read(name.data(), len);
  if (static_cast<uint32_t>(is.gcount()) != len) {
    throw CorruptionError("truncated name in checkpoint");
  }
  return name;
}
}  // namespace

const Matrix<float>* Checkpoint::FindTensor(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return &m;
  }
  return nullptr;
}

const std::vector<uint64_t>* Checkpoint::FindExtra(const std::string& name) const {
  for (const auto& [n, v] : extras) {
    if (n == name) return &v;
  }
  return nullptr;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 4);
  PutU32(os, kVersion);
  PutU64(os, ckpt.step);
  PutU32(os, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, m] : ckpt.tensors) {
    PutName(os, name);
    PutU32(os, static_cast<uint32_t>(m.Rows()));
    PutU32(os, static_cast<uint32_t>(m.Cols()));
    PutF32Array(os, m.Data(), m.Size());
  }
  PutU32(os, static_cast<uint32_t>(ckpt.extras.size()));
  for (const auto& [name, vals] : ckpt.extras) {
    PutName(os, name);
    PutU32(os, static_cast<uint32_t>(vals.size()));
    for (uint64_t v : vals) PutU64(os, v);
  }
  WriteFileAtomic(path, os.str());
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path);
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw FormatError("bad checkpoint magic in " + path);
  }
  const uint32_t version = GetU32(is, "version");
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.step = GetU64(is, "step");
  const uint32_t num_tensors = GetU32(is, "tensor count");
  ckpt.tensors.reserve(num_tensors);
  for (uint32_t i = 0; i < num_tensors; ++i) {
    const std::string name = GetName(is);
    const uint32_t rows = GetU32(is, "rows");
    const uint32_t cols = GetU32(is, "cols");
    Matrix<float> m(static_cast<int>(rows), static_cast<int>(cols));
    GetF32Array(is, m.Data(), m.Size(), "tensor " + name);
    ckpt.tensors.emplace_back(name, std::move(m));
  }
  const uint32_t num_extras = GetU32(is, "extra count");
  for (uint32_t i = 0; i < num_extras; ++i) {
    const std::string name = GetName(is);
    const uint32_t count = GetU32(is, "extra length");
    std::vector<uint64_t> vals(count);
    for (uint32_t k = 0; k < count; ++k) vals[k] = GetU64(is, "extra " + name);
    ckpt.extras.emplace_back(name, std::move(vals));
  }
  return ckpt;
}

template <typename S>
void AppendParameters(const ParameterSet<S>& params, const std::string& prefix,
                      Checkpoint* ckpt) {
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    ckpt->tensors.emplace_back(prefix + params.Name(i),
                               params.Get(i)->value.template Cast<float>());
  }
}

template <typename S>
void LoadParameters(const Checkpoint& ckpt, const std::string& prefix,
                    const ParameterSet<S>& params) {
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    const std::string name = prefix + params.Name(i);
    const Matrix<float>* m = ckpt.FindTensor(name);
    if (m == nullptr) throw DataError("checkpoint is missing tensor " + name);
    Matrix<S>& dst = params.Get(i)->value;
    if (m->Rows() != dst.Rows() || m->Cols() != dst.Cols()) {
      throw DataError("checkpoint tensor " + name + " has shape " +
                      std::to_string(m->Rows()) + "x" + std::to_string(m->Cols()) +
                      ", expected " + std::to_string(dst.Rows()) + "x" +
                      std::to_string(dst.Cols()));
    }
    dst = m->template Cast<S>();
  }
}

template void AppendParameters<float>(const ParameterSet<float>&, const std::string&,
                                      Checkpoint*);
template void AppendParameters<double>(const ParameterSet<double>&, const std::string&,
                                       Checkpoint*);
template void LoadParameters<float>(const Checkpoint&, const std::string&,
                                    const ParameterSet<float>&);
template void LoadParameters<double>(const Checkpoint&, const std::string&,
                                     const ParameterSet<double>&);

}  // namespace kws
