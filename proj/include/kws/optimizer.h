// kws/optimizer.h

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

#ifndef KWS_OPTIMIZER_H_
#define KWS_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "kws/tensor.h"

namespace kws {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // global-norm gradient clip; <= 0 disables
};

// Adaptive-moment update with bias correction, preceded by global-norm
// gradient clipping over the whole parameter set. Deterministic: moments
// are swept in registration order.
template <typename S>
class AdamOptimizer {
 public:
  AdamOptimizer(const ParameterSet<S>& params, const OptimizerConfig& cfg);

  // Consumes the gradients currently in the parameter set (they are not
  // zeroed here) and advances the step counter.
  void Step(const ParameterSet<S>& params);

  uint64_t StepCount() const { return step_; }
  void SetStepCount(uint64_t s) { step_ = s; }

  // Moment buffers, exposed for checkpointing; m/v index matches the
  // parameter-set registration order.
  std::vector<Matrix<S>>& FirstMoments() { return m_; }
  std::vector<Matrix<S>>& SecondMoments() { return v_; }

  const OptimizerConfig& Config() const { return cfg_; }
  // Schedules adjust the rate between steps.
  void SetLearningRate(double lr) { cfg_.learning_rate = lr; }

 private:
  OptimizerConfig cfg_;
  uint64_t step_ = 0;
  std::vector<Matrix<S>> m_, v_;
};

extern template class AdamOptimizer<float>;
extern template class AdamOptimizer<double>;

}  // namespace kws

#endif  // KWS_OPTIMIZER_H_
