// kws/checkpoint.h

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

#ifndef KWS_CHECKPOINT_H_
#define KWS_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kws/matrix.h"
#include "kws/tensor.h"

namespace kws {

// Named-tensor archive, version 1:
//   magic "KWSC", version u32
//   step  u64
//   tensor count u32, then per tensor:
//     name (u32 length + bytes), rows u32, cols u32, row-major f32 LE values
//   u64-array count u32, then per array:
//     name (u32 length + bytes), count u32, u64 LE values
// Tensors hold model parameters and optimizer moments; the u64 arrays hold
// sampler state and the grapheme vocabulary so a checkpoint is
// self-contained for resuming and for search.
struct Checkpoint {
  uint64_t step = 0;
  std::vector<std::pair<std::string, Matrix<float>>> tensors;
  std::vector<std::pair<std::string, std::vector<uint64_t>>> extras;

  const Matrix<float>* FindTensor(const std::string& name) const;
  const std::vector<uint64_t>* FindExtra(const std::string& name) const;
};

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::string& path);

// Appends every parameter as "<prefix><name>".
template <typename S>
void AppendParameters(const ParameterSet<S>& params, const std::string& prefix,
                      Checkpoint* ckpt);

// Loads "<prefix><name>" into every registered parameter; throws DataError
// on a missing name or a shape mismatch.
template <typename S>
void LoadParameters(const Checkpoint& ckpt, const std::string& prefix,
                    const ParameterSet<S>& params);

}  // namespace kws

#endif  // KWS_CHECKPOINT_H_
