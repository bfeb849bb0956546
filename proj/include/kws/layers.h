// kws/layers.h

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

#ifndef KWS_LAYERS_H_
#define KWS_LAYERS_H_

#include <vector>

#include "kws/matrix.h"
#include "kws/rng.h"
#include "kws/tensor.h"

namespace kws {

// Hand-derived forward/backward passes for the handful of layers the
// encoders need. Every Forward fills a cache with the activations its
// Backward needs; Backward accumulates parameter gradients into the
// tensors' grad buffers and returns the gradient w.r.t. the layer input.
// All passes are single-threaded and deterministic; matrix products go
// through the kernels module.

enum class Direction { kForward, kBackward };

template <typename S>
S Sigmoid(S x) {
  if (x >= S(0)) {
    const S e = std::exp(-x);
    return S(1) / (S(1) + e);
  }
  const S e = std::exp(x);
  return e / (S(1) + e);
}

// ---------------------------------------------------------------------------
// Embedding lookup: table is VxE, ids select rows.

struct EmbeddingCache {
  std::vector<int> ids;
};

template <typename S>
Matrix<S> EmbeddingForward(const Tensor<S>& table, const std::vector<int>& ids,
                           EmbeddingCache* cache = nullptr);
template <typename S>
void EmbeddingBackward(Tensor<S>* table, const EmbeddingCache& cache,
                       const Matrix<S>& dy);

// ---------------------------------------------------------------------------
// Affine: y = x W + b, row-wise.

template <typename S>
struct AffineParams {
  Tensor<S> w;  // A x B
  Tensor<S> b;  // 1 x B

  void Init(int in_dim, int out_dim, Rng* rng) {
    w.Resize(in_dim, out_dim);
    b.Resize(1, out_dim);
    w.InitUniform(in_dim, rng);
  }
};

template <typename S>
struct AffineCache {
  Matrix<S> x;
};

template <typename S>
Matrix<S> AffineForward(const AffineParams<S>& p, const Matrix<S>& x,
                        AffineCache<S>* cache = nullptr);
template <typename S>
Matrix<S> AffineBackward(AffineParams<S>* p, const AffineCache<S>& cache,
                         const Matrix<S>& dy);

// ---------------------------------------------------------------------------
// GRU, Cho-style: the reset gate scales h_{t-1} before the candidate's
// recurrent product.
//   z_t = sigmoid(x_t Wxz + h_{t-1} Whz + bz)
//   r_t = sigmoid(x_t Wxr + h_{t-1} Whr + br)
//   c_t = tanh(x_t Wxc + (r_t . h_{t-1}) Whc + bc)
//   h_t = (1 - z_t) . c_t + z_t . h_{t-1},   h_0 = 0
// Input-side weights are packed column-wise as [z | r | c].

template <typename S>
struct GruParams {
  Tensor<S> wx;        // A x 3H
  Tensor<S> wh_gates;  // H x 2H  ([z | r])
  Tensor<S> wh_cand;   // H x H
  Tensor<S> b;         // 1 x 3H

  int Hidden() const { return wh_cand.value.Rows(); }
  void Init(int in_dim, int hidden, Rng* rng) {
    wx.Resize(in_dim, 3 * hidden);
    wh_gates.Resize(hidden, 2 * hidden);
    wh_cand.Resize(hidden, hidden);
    b.Resize(1, 3 * hidden);
    wx.InitUniform(in_dim, rng);
    wh_gates.InitUniform(hidden, rng);
    wh_cand.InitUniform(hidden, rng);
  }
};

// Activations in direction order (time-reversed for Direction::kBackward).
template <typename S>
struct GruCache {
  Matrix<S> x, z, r, c, h;
};

// Returns hidden states in input time order.
template <typename S>
Matrix<S> GruForward(const GruParams<S>& p, const Matrix<S>& x, Direction dir,
                     GruCache<S>* cache = nullptr);
template <typename S>
Matrix<S> GruBackward(GruParams<S>* p, const GruCache<S>& cache, Direction dir,
                      const Matrix<S>& dh);

// ---------------------------------------------------------------------------
// LSTM, standard gates, c_0 = h_0 = 0. Weights packed as [i | f | g | o].
//   i,f,o = sigmoid(.), g = tanh(.)
//   c_t = f . c_{t-1} + i . g
//   h_t = o . tanh(c_t)

template <typename S>
struct LstmParams {
  Tensor<S> wx;  // A x 4H
  Tensor<S> wh;  // H x 4H
  Tensor<S> b;   // 1 x 4H

  int Hidden() const { return wh.value.Rows(); }
  void Init(int in_dim, int hidden, Rng* rng) {
    wx.Resize(in_dim, 4 * hidden);
    wh.Resize(hidden, 4 * hidden);
    b.Resize(1, 4 * hidden);
    wx.InitUniform(in_dim, rng);
    wh.InitUniform(hidden, rng);
  }
};

template <typename S>
struct LstmCache {
  Matrix<S> x, i, f, g, o, c, tanh_c, h;
};

template <typename S>
Matrix<S> LstmForward(const LstmParams<S>& p, const Matrix<S>& x, Direction dir,
                      LstmCache<S>* cache = nullptr);
template <typename S>
Matrix<S> LstmBackward(LstmParams<S>* p, const LstmCache<S>& cache, Direction dir,
                       const Matrix<S>& dh);

// ---------------------------------------------------------------------------
// Bidirectional wrappers: forward pass next to a time-reversed backward
// pass whose output is re-reversed to input order, concatenated per frame.

template <typename S>
struct BiGruParams {
  GruParams<S> fwd, bwd;
  void Init(int in_dim, int hidden, Rng* rng) {
    fwd.Init(in_dim, hidden, rng);
    bwd.Init(in_dim, hidden, rng);
  }
};
template <typename S>
struct BiGruCache {
  GruCache<S> fwd, bwd;
};
template <typename S>
Matrix<S> BiGruForward(const BiGruParams<S>& p, const Matrix<S>& x,
                       BiGruCache<S>* cache = nullptr);
template <typename S>
Matrix<S> BiGruBackward(BiGruParams<S>* p, const BiGruCache<S>& cache, const Matrix<S>& dy);

template <typename S>
struct BiLstmParams {
  LstmParams<S> fwd, bwd;
  void Init(int in_dim, int hidden, Rng* rng) {
    fwd.Init(in_dim, hidden, rng);
    bwd.Init(in_dim, hidden, rng);
  }
};
template <typename S>
struct BiLstmCache {
  LstmCache<S> fwd, bwd;
};
template <typename S>
Matrix<S> BiLstmForward(const BiLstmParams<S>& p, const Matrix<S>& x,
                        BiLstmCache<S>* cache = nullptr);
template <typename S>
Matrix<S> BiLstmBackward(BiLstmParams<S>* p, const BiLstmCache<S>& cache, const Matrix<S>& dy);

// ---------------------------------------------------------------------------
// Stride-selection temporal downsampling: keep frames 0, f, 2f, ...
// Output length is ceil(T/f).

template <typename S>
Matrix<S> DownsampleForward(const Matrix<S>& x, int factor);
// Routes gradients back to the kept frames only.
template <typename S>
Matrix<S> DownsampleBackward(const Matrix<S>& dy, int in_rows, int factor);

inline int DownsampledLength(int frames, int factor) {
  return (frames + factor - 1) / factor;
}

// ---------------------------------------------------------------------------
// Inverted dropout: zero with probability `rate`, scale survivors by
// 1/(1-rate); identity at inference.

template <typename S>
struct DropoutCache {
  bool identity = true;
  Matrix<S> mask;  // includes the 1/(1-rate) scale
};

template <typename S>
Matrix<S> DropoutForward(const Matrix<S>& x, double rate, Rng* rng, bool training,
                         DropoutCache<S>* cache);
template <typename S>
Matrix<S> DropoutBackward(const DropoutCache<S>& cache, const Matrix<S>& dy);

// ---------------------------------------------------------------------------
// Sum along the sequence dimension: TxA -> 1xA.

template <typename S>
Matrix<S> SumOverTime(const Matrix<S>& x);
template <typename S>
Matrix<S> SumOverTimeBackward(const Matrix<S>& d, int rows);

}  // namespace kws

#endif  // KWS_LAYERS_H_
