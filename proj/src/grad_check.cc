// kws/grad_check.cc

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

#include "kws/grad_check.h"

#include <algorithm>
#include <cmath>

namespace kws {

double GradCheck(const std::function<double()>& loss_fn,
                 const ParameterSet<double>& params, double epsilon) {
  double max_rel_err = 0.0;
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    Tensor<double>* t = params.Get(i);
    for (size_t e = 0; e < t->value.Size(); ++e) {
      double* v = &t->value.Data()[e];
      const double saved = *v;
      *v = saved + epsilon;
      const double up = loss_fn();
      *v = saved - epsilon;
      const double down = loss_fn();
      *v = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = t->grad.Data()[e];
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      max_rel_err = std::max(max_rel_err, std::fabs(analytic - numeric) / denom);
    }
  }
  return max_rel_err;
}

}  // namespace kws
