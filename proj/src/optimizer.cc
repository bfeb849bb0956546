// kws/optimizer.cc

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

#include "kws/optimizer.h"

#include <cmath>

namespace kws {

template <typename S>
AdamOptimizer<S>::AdamOptimizer(const ParameterSet<S>& params,
                                const OptimizerConfig& cfg)
    : cfg_(cfg) {
  m_.reserve(params.NumTensors());
  v_.reserve(params.NumTensors());
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    const Matrix<S>& val = params.Get(i)->value;
    m_.emplace_back(val.Rows(), val.Cols());
    v_.emplace_back(val.Rows(), val.Cols());
  }
}

template <typename S>
void AdamOptimizer<S>::Step(const ParameterSet<S>& params) {
  if (cfg_.clip_norm > 0.0) {
    const double norm = params.GradNorm();
    if (norm > cfg_.clip_norm) params.ScaleGrad(cfg_.clip_norm / norm);
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    Tensor<S>* t = params.Get(i);
    S* value = t->value.Data();
    const S* grad = t->grad.Data();
    S* m = m_[i].Data();
    S* v = v_[i].Data();
    for (size_t e = 0; e < t->value.Size(); ++e) {
      const double g = static_cast<double>(grad[e]);
      const double mn = cfg_.beta1 * static_cast<double>(m[e]) + (1.0 - cfg_.beta1) * g;
      const double vn = cfg_.beta2 * static_cast<double>(v[e]) + (1.0 - cfg_.beta2) * g * g;
      m[e] = static_cast<S>(mn);
      v[e] = static_cast<S>(vn);
      const double m_hat = mn / bc1;
      const double v_hat = vn / bc2;
      value[e] = static_cast<S>(static_cast<double>(value[e]) -
                                cfg_.learning_rate * m_hat /
                                    (std::sqrt(v_hat) + cfg_.epsilon));
    }
  }
}

template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace kws
