// kws/loss.h

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

#ifndef KWS_LOSS_H_
#define KWS_LOSS_H_

#include <cstdint>
#include <vector>

namespace kws {

// Clipped, positively-weighted binary cross-entropy over frame scores:
//
//   f(z, y) = -sum_n [ 1{z_n > 1-phi} (1-y_n) log(1-z_n)
//                    + 1{z_n < phi} lambda y_n log z_n ]
//
// phi gates out easily-classified frames; lambda up-weights positives.
// The indicator gates are constants in the backward pass.
struct LossConfig {
  double phi = 0.7;      // tolerance, in (0.5, 1]
  double lambda = 5.0;   // positive-frame weight, > 0

  void Validate() const;
};

// Direct evaluation on probabilities; z values must lie strictly in (0, 1).
double ModifiedBce(const std::vector<double>& z, const std::vector<uint8_t>& y,
                   const LossConfig& cfg);

// Numerically-stable evaluation from pre-sigmoid scores, with the gradient
// w.r.t. the logits (gates treated as constants). Both loss and gradient
// are multiplied by `scale`. Returns the scaled loss.
template <typename S>
double ModifiedBceFromLogits(const std::vector<S>& logits, const std::vector<uint8_t>& y,
                             const LossConfig& cfg, double scale, std::vector<S>* dlogits);

}  // namespace kws

#endif  // KWS_LOSS_H_
