// kws/tensor.h

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

#ifndef KWS_TENSOR_H_
#define KWS_TENSOR_H_

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kws/matrix.h"
#include "kws/rng.h"

namespace kws {

// A trainable parameter: value plus a same-shaped gradient buffer.
template <typename S>
struct Tensor {
  Matrix<S> value;
  Matrix<S> grad;

  Tensor() = default;
  Tensor(int rows, int cols) : value(rows, cols), grad(rows, cols) {}

  void Resize(int rows, int cols) {
    value.Resize(rows, cols);
    grad.Resize(rows, cols);
  }
  void ZeroGrad() { grad.SetZero(); }

  // Uniform in +-1/sqrt(fan_in); biases are zero-initialized by callers.
  void InitUniform(int fan_in, Rng* rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
    for (size_t i = 0; i < value.Size(); ++i) {
      value.Data()[i] = static_cast<S>((rng->Uniform() * 2.0 - 1.0) * bound);
    }
  }
};

// Named view over the tensors of a model, in registration order. The order
// is fixed by model construction, so optimizer sweeps, gradient checks and
// checkpoint layout are deterministic.
template <typename S>
class ParameterSet {
 public:
  void Register(const std::string& name, Tensor<S>* t) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
    index_[name] = items_.size();
    items_.push_back({name, t});
  }

  size_t NumTensors() const { return items_.size(); }
  const std::string& Name(size_t i) const { return items_[i].name; }
  Tensor<S>* Get(size_t i) const { return items_[i].tensor; }
  Tensor<S>* Find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : items_[it->second].tensor;
  }

  size_t NumValues() const {
    size_t n = 0;
    for (const auto& it : items_) n += it.tensor->value.Size();
    return n;
  }

  void ZeroGrad() const {
    for (const auto& it : items_) it.tensor->ZeroGrad();
  }

  double GradNorm() const {
    double sq = 0.0;
    for (const auto& it : items_) {
      const Matrix<S>& g = it.tensor->grad;
      for (size_t i = 0; i < g.Size(); ++i) {
        const double v = static_cast<double>(g.Data()[i]);
        sq += v * v;
      }
    }
    return std::sqrt(sq);
  }

  void ScaleGrad(double factor) const {
    for (const auto& it : items_) {
      Matrix<S>& g = it.tensor->grad;
      for (size_t i = 0; i < g.Size(); ++i) {
        g.Data()[i] = static_cast<S>(static_cast<double>(g.Data()[i]) * factor);
      }
    }
  }

 private:
  struct Item {
    std::string name;
    Tensor<S>* tensor;
  };
  std::vector<Item> items_;
  std::map<std::string, size_t> index_;
};

}  // namespace kws

#endif  // KWS_TENSOR_H_
