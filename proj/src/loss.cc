// kws/loss.cc

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

#include "kws/loss.h"

#include <cmath>
#include <stdexcept>

#include "kws/error.h"
#include "kws/layers.h"

namespace kws {

void LossConfig::Validate() const {
  if (!(phi > 0.5 && phi <= 1.0)) throw ConfigError("phi must lie in (0.5, 1]");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
}

double ModifiedBce(const std::vector<double>& z, const std::vector<uint8_t>& y,
                   const LossConfig& cfg) {
  if (z.size() != y.size()) {
    throw std::invalid_argument("score and label sequences differ in length");
  }
  double loss = 0.0;
  for (size_t n = 0; n < z.size(); ++n) {
    if (!(z[n] > 0.0 && z[n] < 1.0)) {
      throw std::invalid_argument("scores must lie strictly in (0, 1)");
    }
    if (y[n]) {
      if (z[n] < cfg.phi) loss -= cfg.lambda * std::log(z[n]);
    } else {
      if (z[n] > 1.0 - cfg.phi) loss -= std::log(1.0 - z[n]);
    }
  }
  return loss;
}

namespace {
// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0);
}
}  // namespace

template <typename S>
double ModifiedBceFromLogits(const std::vector<S>& logits, const std::vector<uint8_t>& y,
                             const LossConfig& cfg, double scale, std::vector<S>* dlogits) {
  if (logits.size() != y.size()) {
    throw std::invalid_argument("score and label sequences differ in length");
  }
  if (dlogits != nullptr) dlogits->assign(logits.size(), S(0));
  double loss = 0.0;
  for (size_t n = 0; n < logits.size(); ++n) {
    const double s = static_cast<double>(logits[n]);
    const double zn = Sigmoid(s);
    if (y[n]) {
      if (zn < cfg.phi) {
        loss += cfg.lambda * Softplus(-s);  // = -lambda log z
        if (dlogits != nullptr) {
          (*dlogits)[n] = static_cast<S>(-cfg.lambda * (1.0 - zn) * scale);
        }
      }
    } else {
      if (zn > 1.0 - cfg.phi) {
        loss += Softplus(s);  // = -log(1 - z)
        if (dlogits != nullptr) (*dlogits)[n] = static_cast<S>(zn * scale);
      }
    }
  }
  return loss * scale;
}

template double ModifiedBceFromLogits<float>(const std::vector<float>&,
                                             const std::vector<uint8_t>&,
                                             const LossConfig&, double,
                                             std::vector<float>*);
template double ModifiedBceFromLogits<double>(const std::vector<double>&,
                                              const std::vector<uint8_t>&,
                                              const LossConfig&, double,
                                              std::vector<double>*);

}  // namespace kws
