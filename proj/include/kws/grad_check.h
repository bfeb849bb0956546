// kws/grad_check.h

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

#ifndef KWS_GRAD_CHECK_H_
#define KWS_GRAD_CHECK_H_

#include <functional>

#include "kws/tensor.h"

namespace kws {

// Compares the analytic gradients already stored in the parameters' grad
// buffers against central differences of `loss_fn`, which must recompute
// the loss from the current parameter values without side effects.
// Perturbs every element of every tensor by +-epsilon and returns the
// maximum relative error  |a - n| / max(|a|, |n|, 1e-8).
// Meant for 64-bit verification builds of the model.
double GradCheck(const std::function<double()>& loss_fn,
                 const ParameterSet<double>& params, double epsilon = 1e-4);

}  // namespace kws

#endif  // KWS_GRAD_CHECK_H_
