// kws/layers.cc

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

#include "kws/layers.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kws/kernels.h"

namespace kws {

namespace {

template <typename S>
void AddRowBroadcast(Matrix<S>* m, const Matrix<S>& row) {
  for (int r = 0; r < m->Rows(); ++r) {
    S* dst = m->Row(r);
    const S* src = row.Row(0);
    for (int c = 0; c < m->Cols(); ++c) dst[c] += src[c];
  }
}

template <typename S>
void AddColumnSums(const Matrix<S>& m, Tensor<S>* bias) {
  S* g = bias->grad.Row(0);
  for (int r = 0; r < m.Rows(); ++r) {
    const S* row = m.Row(r);
    for (int c = 0; c < m.Cols(); ++c) g[c] += row[c];
  }
}

}  // namespace

// ------------------------------- embedding --------------------------------

template <typename S>
Matrix<S> EmbeddingForward(const Tensor<S>& table, const std::vector<int>& ids,
                           EmbeddingCache* cache) {
  const int vocab = table.value.Rows();
  const int dim = table.value.Cols();
  Matrix<S> out(static_cast<int>(ids.size()), dim);
  for (size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t];
    if (id < 0 || id >= vocab) {
      throw std::out_of_range("embedding id " + std::to_string(id) +
                              " out of range [0, " + std::to_string(vocab) + ")");
    }
    const S* src = table.value.Row(id);
    S* dst = out.Row(static_cast<int>(t));
    for (int c = 0; c < dim; ++c) dst[c] = src[c];
  }
  if (cache != nullptr) cache->ids = ids;
  return out;
}

template <typename S>
void EmbeddingBackward(Tensor<S>* table, const EmbeddingCache& cache,
                       const Matrix<S>& dy) {
  const int dim = table->value.Cols();
  for (size_t t = 0; t < cache.ids.size(); ++t) {
    S* dst = table->grad.Row(cache.ids[t]);
    const S* src = dy.Row(static_cast<int>(t));
    for (int c = 0; c < dim; ++c) dst[c] += src[c];
  }
}

// --------------------------------- affine ---------------------------------

template <typename S>
Matrix<S> AffineForward(const AffineParams<S>& p, const Matrix<S>& x,
                        AffineCache<S>* cache) {
  Matrix<S> y(x.Rows(), p.w.value.Cols());
  MatMulNN(x, p.w.value, &y);
  AddRowBroadcast(&y, p.b.value);
  if (cache != nullptr) cache->x = x;
  return y;
}

template <typename S>
Matrix<S> AffineBackward(AffineParams<S>* p, const AffineCache<S>& cache,
                         const Matrix<S>& dy) {
  MatMulTN(cache.x, dy, &p->w.grad, /*accumulate=*/true);
  AddColumnSums(dy, &p->b);
  Matrix<S> dx(cache.x.Rows(), cache.x.Cols());
  MatMulNT(dy, p->w.value, &dx);
  return dx;
}

// ----------------------------------- GRU -----------------------------------

template <typename S>
Matrix<S> GruForward(const GruParams<S>& p, const Matrix<S>& x, Direction dir,
                     GruCache<S>* cache) {
  const int T = x.Rows();
  const int H = p.Hidden();
  Matrix<S> xd = (dir == Direction::kForward) ? x : x.Reversed();

  // Input-side contributions for all gates in one product.
  Matrix<S> pre(T, 3 * H);
  MatMulNN(xd, p.wx.value, &pre);
  AddRowBroadcast(&pre, p.b.value);

  Matrix<S> z(T, H), r(T, H), c(T, H), h(T, H);
  std::vector<S> zero(H, S(0));
  const S* h_prev = zero.data();
  for (int t = 0; t < T; ++t) {
    S* a = pre.Row(t);
    // Recurrent terms for z and r.
    for (int k = 0; k < H; ++k) {
      const S hk = h_prev[k];
      if (hk == S(0)) continue;
      const S* wrow = p.wh_gates.value.Row(k);
      for (int j = 0; j < 2 * H; ++j) a[j] += hk * wrow[j];
    }
    S* zt = z.Row(t);
    S* rt = r.Row(t);
    for (int j = 0; j < H; ++j) zt[j] = Sigmoid(a[j]);
    for (int j = 0; j < H; ++j) rt[j] = Sigmoid(a[H + j]);
    // Candidate sees the reset-scaled previous state.
    for (int k = 0; k < H; ++k) {
      const S rh = rt[k] * h_prev[k];
      if (rh == S(0)) continue;
      const S* wrow = p.wh_cand.value.Row(k);
      for (int j = 0; j < H; ++j) a[2 * H + j] += rh * wrow[j];
    }
    S* ct = c.Row(t);
    S* ht = h.Row(t);
    for (int j = 0; j < H; ++j) {
      ct[j] = std::tanh(a[2 * H + j]);
      ht[j] = (S(1) - zt[j]) * ct[j] + zt[j] * h_prev[j];
    }
    h_prev = ht;
  }

  Matrix<S> out = (dir == Direction::kForward) ? h : h.Reversed();
  if (cache != nullptr) {
    cache->x = std::move(xd);
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->c = std::move(c);
    cache->h = std::move(h);
  }
  return out;
}

template <typename S>
Matrix<S> GruBackward(GruParams<S>* p, const GruCache<S>& cache, Direction dir,
                      const Matrix<S>& dh) {
  const int T = cache.x.Rows();
  const int H = p->Hidden();
  Matrix<S> dhd = (dir == Direction::kForward) ? dh : dh.Reversed();

  Matrix<S> dpre(T, 3 * H);
  std::vector<S> carry(H, S(0));  // gradient w.r.t. h_{t} arriving from step t+1
  std::vector<S> zero(H, S(0));
  std::vector<S> total(H), u(H);

  for (int t = T - 1; t >= 0; --t) {
    const S* h_prev = (t > 0) ? cache.h.Row(t - 1) : zero.data();
    const S* zt = cache.z.Row(t);
    const S* rt = cache.r.Row(t);
    const S* ct = cache.c.Row(t);
    const S* dht = dhd.Row(t);
    S* dp = dpre.Row(t);

    for (int j = 0; j < H; ++j) total[j] = dht[j] + carry[j];

    for (int j = 0; j < H; ++j) {
      const S dz = total[j] * (h_prev[j] - ct[j]);
      dp[j] = dz * zt[j] * (S(1) - zt[j]);
      const S dc = total[j] * (S(1) - zt[j]);
      dp[2 * H + j] = dc * (S(1) - ct[j] * ct[j]);
    }
    // u = d(r.h_prev) = dc_pre Whc^T
    for (int k = 0; k < H; ++k) {
      const S* wrow = p->wh_cand.value.Row(k);
      S acc = S(0);
      for (int j = 0; j < H; ++j) acc += dp[2 * H + j] * wrow[j];
      u[k] = acc;
    }
    for (int j = 0; j < H; ++j) {
      const S dr = u[j] * h_prev[j];
      dp[H + j] = dr * rt[j] * (S(1) - rt[j]);
    }
    // Gradient into h_{t-1}: direct path, gate paths, candidate path.
    for (int k = 0; k < H; ++k) {
      const S* wrow = p->wh_gates.value.Row(k);
      S acc = total[k] * zt[k] + u[k] * rt[k];
      for (int j = 0; j < 2 * H; ++j) acc += dp[j] * wrow[j];
      carry[k] = acc;
    }
    // Recurrent weight gradients.
    for (int k = 0; k < H; ++k) {
      const S hk = h_prev[k];
      if (hk != S(0)) {
        S* grow = p->wh_gates.grad.Row(k);
        for (int j = 0; j < 2 * H; ++j) grow[j] += hk * dp[j];
      }
      const S rh = rt[k] * h_prev[k];
      if (rh != S(0)) {
        S* grow = p->wh_cand.grad.Row(k);
        for (int j = 0; j < H; ++j) grow[j] += rh * dp[2 * H + j];
      }
    }
  }

  MatMulTN(cache.x, dpre, &p->wx.grad, /*accumulate=*/true);
  AddColumnSums(dpre, &p->b);
  Matrix<S> dxd(T, cache.x.Cols());
  MatMulNT(dpre, p->wx.value, &dxd);
  return (dir == Direction::kForward) ? dxd : dxd.Reversed();
}

// ---------------------------------- LSTM -----------------------------------

template <typename S>
Matrix<S> LstmForward(const LstmParams<S>& p, const Matrix<S>& x, Direction dir,
                      LstmCache<S>* cache) {
  const int T = x.Rows();
  const int H = p.Hidden();
  Matrix<S> xd = (dir == Direction::kForward) ? x : x.Reversed();

  Matrix<S> pre(T, 4 * H);
  MatMulNN(xd, p.wx.value, &pre);
  AddRowBroadcast(&pre, p.b.value);

  Matrix<S> mi(T, H), mf(T, H), mg(T, H), mo(T, H), mc(T, H), mtc(T, H), mh(T, H);
  std::vector<S> zero(H, S(0));
  const S* h_prev = zero.data();
  const S* c_prev = zero.data();
  for (int t = 0; t < T; ++t) {
    S* a = pre.Row(t);
    for (int k = 0; k < H; ++k) {
      const S hk = h_prev[k];
      if (hk == S(0)) continue;
      const S* wrow = p.wh.value.Row(k);
      for (int j = 0; j < 4 * H; ++j) a[j] += hk * wrow[j];
    }
    S* it = mi.Row(t);
    S* ft = mf.Row(t);
    S* gt = mg.Row(t);
    S* ot = mo.Row(t);
    S* ct = mc.Row(t);
    S* tct = mtc.Row(t);
    S* ht = mh.Row(t);
    for (int j = 0; j < H; ++j) {
      it[j] = Sigmoid(a[j]);
      ft[j] = Sigmoid(a[H + j]);
      gt[j] = std::tanh(a[2 * H + j]);
      ot[j] = Sigmoid(a[3 * H + j]);
      ct[j] = ft[j] * c_prev[j] + it[j] * gt[j];
      tct[j] = std::tanh(ct[j]);
      ht[j] = ot[j] * tct[j];
    }
    h_prev = ht;
    c_prev = ct;
  }

  Matrix<S> out = (dir == Direction::kForward) ? mh : mh.Reversed();
  if (cache != nullptr) {
    cache->x = std::move(xd);
    cache->i = std::move(mi);
    cache->f = std::move(mf);
    cache->g = std::move(mg);
    cache->o = std::move(mo);
    cache->c = std::move(mc);
    cache->tanh_c = std::move(mtc);
    cache->h = std::move(mh);
  }
  return out;
}

template <typename S>
Matrix<S> LstmBackward(LstmParams<S>* p, const LstmCache<S>& cache, Direction dir,
                       const Matrix<S>& dh) {
  const int T = cache.x.Rows();
  const int H = p->Hidden();
  Matrix<S> dhd = (dir == Direction::kForward) ? dh : dh.Reversed();

  Matrix<S> dpre(T, 4 * H);
  std::vector<S> dh_carry(H, S(0)), dc_carry(H, S(0)), zero(H, S(0));

  for (int t = T - 1; t >= 0; --t) {
    const S* h_prev = (t > 0) ? cache.h.Row(t - 1) : zero.data();
    const S* c_prev = (t > 0) ? cache.c.Row(t - 1) : zero.data();
    const S* it = cache.i.Row(t);
    const S* ft = cache.f.Row(t);
    const S* gt = cache.g.Row(t);
    const S* ot = cache.o.Row(t);
    const S* tct = cache.tanh_c.Row(t);
    const S* dht = dhd.Row(t);
    S* dp = dpre.Row(t);

    for (int j = 0; j < H; ++j) {
      const S dh_total = dht[j] + dh_carry[j];
      const S do_ = dh_total * tct[j];
      const S dc_total = dh_total * ot[j] * (S(1) - tct[j] * tct[j]) + dc_carry[j];
      const S di = dc_total * gt[j];
      const S df = dc_total * c_prev[j];
      const S dg = dc_total * it[j];
      dp[j] = di * it[j] * (S(1) - it[j]);
      dp[H + j] = df * ft[j] * (S(1) - ft[j]);
      dp[2 * H + j] = dg * (S(1) - gt[j] * gt[j]);
      dp[3 * H + j] = do_ * ot[j] * (S(1) - ot[j]);
      dc_carry[j] = dc_total * ft[j];
    }
    for (int k = 0; k < H; ++k) {
      const S* wrow = p->wh.value.Row(k);
      S acc = S(0);
      for (int j = 0; j < 4 * H; ++j) acc += dp[j] * wrow[j];
      dh_carry[k] = acc;
    }
    for (int k = 0; k < H; ++k) {
      const S hk = h_prev[k];
      if (hk == S(0)) continue;
      S* grow = p->wh.grad.Row(k);
      for (int j = 0; j < 4 * H; ++j) grow[j] += hk * dp[j];
    }
  }

  MatMulTN(cache.x, dpre, &p->wx.grad, /*accumulate=*/true);
  AddColumnSums(dpre, &p->b);
  Matrix<S> dxd(T, cache.x.Cols());
  MatMulNT(dpre, p->wx.value, &dxd);
  return (dir == Direction::kForward) ? dxd : dxd.Reversed();
}

// ------------------------------ bidirectional ------------------------------

namespace {

template <typename S>
Matrix<S> ConcatColumns(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.Rows(), a.Cols() + b.Cols());
  for (int r = 0; r < a.Rows(); ++r) {
    S* dst = out.Row(r);
    const S* pa = a.Row(r);
    const S* pb = b.Row(r);
    for (int c = 0; c < a.Cols(); ++c) dst[c] = pa[c];
    for (int c = 0; c < b.Cols(); ++c) dst[a.Cols() + c] = pb[c];
  }
  return out;
}

template <typename S>
Matrix<S> SliceColumns(const Matrix<S>& m, int begin, int count) {
  Matrix<S> out(m.Rows(), count);
  for (int r = 0; r < m.Rows(); ++r) {
    const S* src = m.Row(r) + begin;
    S* dst = out.Row(r);
    for (int c = 0; c < count; ++c) dst[c] = src[c];
  }
  return out;
}

template <typename S>
void AddInto(Matrix<S>* dst, const Matrix<S>& src) {
  for (size_t i = 0; i < dst->Size(); ++i) dst->Data()[i] += src.Data()[i];
}

}  // namespace

template <typename S>
Matrix<S> BiGruForward(const BiGruParams<S>& p, const Matrix<S>& x, BiGruCache<S>* cache) {
  Matrix<S> hf = GruForward(p.fwd, x, Direction::kForward, cache ? &cache->fwd : nullptr);
  Matrix<S> hb = GruForward(p.bwd, x, Direction::kBackward, cache ? &cache->bwd : nullptr);
  return ConcatColumns(hf, hb);
}

template <typename S>
Matrix<S> BiGruBackward(BiGruParams<S>* p, const BiGruCache<S>& cache, const Matrix<S>& dy) {
  const int h = p->fwd.Hidden();
  Matrix<S> dx = GruBackward(&p->fwd, cache.fwd, Direction::kForward,
                             SliceColumns(dy, 0, h));
  Matrix<S> dxb = GruBackward(&p->bwd, cache.bwd, Direction::kBackward,
                              SliceColumns(dy, h, p->bwd.Hidden()));
  AddInto(&dx, dxb);
  return dx;
}

template <typename S>
Matrix<S> BiLstmForward(const BiLstmParams<S>& p, const Matrix<S>& x, BiLstmCache<S>* cache) {
  Matrix<S> hf = LstmForward(p.fwd, x, Direction::kForward, cache ? &cache->fwd : nullptr);
  Matrix<S> hb = LstmForward(p.bwd, x, Direction::kBackward, cache ? &cache->bwd : nullptr);
  return ConcatColumns(hf, hb);
}

template <typename S>
Matrix<S> BiLstmBackward(BiLstmParams<S>* p, const BiLstmCache<S>& cache, const Matrix<S>& dy) {
  const int h = p->fwd.Hidden();
  Matrix<S> dx = LstmBackward(&p->fwd, cache.fwd, Direction::kForward,
                              SliceColumns(dy, 0, h));
  Matrix<S> dxb = LstmBackward(&p->bwd, cache.bwd, Direction::kBackward,
                               SliceColumns(dy, h, p->bwd.Hidden()));
  AddInto(&dx, dxb);
  return dx;
}

// ------------------------------- downsample --------------------------------

template <typename S>
Matrix<S> DownsampleForward(const Matrix<S>& x, int factor) {
  const int out_rows = DownsampledLength(x.Rows(), factor);
  Matrix<S> out(out_rows, x.Cols());
  for (int r = 0; r < out_rows; ++r) {
    const S* src = x.Row(r * factor);
    S* dst = out.Row(r);
    for (int c = 0; c < x.Cols(); ++c) dst[c] = src[c];
  }
  return out;
}

template <typename S>
Matrix<S> DownsampleBackward(const Matrix<S>& dy, int in_rows, int factor) {
  Matrix<S> dx(in_rows, dy.Cols());
  for (int r = 0; r < dy.Rows(); ++r) {
    const S* src = dy.Row(r);
    S* dst = dx.Row(r * factor);
    for (int c = 0; c < dy.Cols(); ++c) dst[c] = src[c];
  }
  return dx;
}

// --------------------------------- dropout ---------------------------------

template <typename S>
Matrix<S> DropoutForward(const Matrix<S>& x, double rate, Rng* rng, bool training,
                         DropoutCache<S>* cache) {
  if (!training || rate <= 0.0) {
    if (cache != nullptr) cache->identity = true;
    return x;
  }
  if (rate >= 1.0) throw std::invalid_argument("dropout rate must be < 1");
  const S scale = static_cast<S>(1.0 / (1.0 - rate));
  Matrix<S> mask(x.Rows(), x.Cols());
  Matrix<S> out(x.Rows(), x.Cols());
  for (size_t idx = 0; idx < x.Size(); ++idx) {
    const S m = rng->Bernoulli(rate) ? S(0) : scale;
    mask.Data()[idx] = m;
    out.Data()[idx] = x.Data()[idx] * m;
  }
  if (cache != nullptr) {
    cache->identity = false;
    cache->mask = std::move(mask);
  }
  return out;
}

template <typename S>
Matrix<S> DropoutBackward(const DropoutCache<S>& cache, const Matrix<S>& dy) {
  if (cache.identity) return dy;
  Matrix<S> dx(dy.Rows(), dy.Cols());
  for (size_t i = 0; i < dy.Size(); ++i) dx.Data()[i] = dy.Data()[i] * cache.mask.Data()[i];
  return dx;
}

// ------------------------------ sum over time ------------------------------

template <typename S>
Matrix<S> SumOverTime(const Matrix<S>& x) {
  Matrix<S> out(1, x.Cols());
  S* dst = out.Row(0);
  for (int r = 0; r < x.Rows(); ++r) {
    const S* src = x.Row(r);
    for (int c = 0; c < x.Cols(); ++c) dst[c] += src[c];
  }
  return out;
}

template <typename S>
Matrix<S> SumOverTimeBackward(const Matrix<S>& d, int rows) {
  Matrix<S> dx(rows, d.Cols());
  for (int r = 0; r < rows; ++r) {
    S* dst = dx.Row(r);
    const S* src = d.Row(0);
    for (int c = 0; c < d.Cols(); ++c) dst[c] = src[c];
  }
  return dx;
}

// ------------------------------ instantiation ------------------------------

#define KWS_INSTANTIATE_LAYERS(S)                                                       \
  template Matrix<S> EmbeddingForward<S>(const Tensor<S>&, const std::vector<int>&,     \
                                         EmbeddingCache*);                              \
  template void EmbeddingBackward<S>(Tensor<S>*, const EmbeddingCache&, const Matrix<S>&);\
  template Matrix<S> AffineForward<S>(const AffineParams<S>&, const Matrix<S>&,         \
                                      AffineCache<S>*);                                 \
  template Matrix<S> AffineBackward<S>(AffineParams<S>*, const AffineCache<S>&,         \
                                       const Matrix<S>&);                               \
  template Matrix<S> GruForward<S>(const GruParams<S>&, const Matrix<S>&, Direction,    \
                                   GruCache<S>*);                                       \
  template Matrix<S> GruBackward<S>(GruParams<S>*, const GruCache<S>&, Direction,       \
                                    const Matrix<S>&);                                  \
  template Matrix<S> LstmForward<S>(const LstmParams<S>&, const Matrix<S>&, Direction,  \
                                    LstmCache<S>*);                                     \
  template Matrix<S> LstmBackward<S>(LstmParams<S>*, const LstmCache<S>&, Direction,    \
                                     const Matrix<S>&);                                 \
  template Matrix<S> BiGruForward<S>(const BiGruParams<S>&, const Matrix<S>&,           \
                                     BiGruCache<S>*);                                   \
  template Matrix<S> BiGruBackward<S>(BiGruParams<S>*, const BiGruCache<S>&,            \
                                      const Matrix<S>&);                                \
  template Matrix<S> BiLstmForward<S>(const BiLstmParams<S>&, const Matrix<S>&,         \
                                      BiLstmCache<S>*);                                 \
  template Matrix<S> BiLstmBackward<S>(BiLstmParams<S>*, const BiLstmCache<S>&,         \
                                       const Matrix<S>&);                               \
  template Matrix<S> DownsampleForward<S>(const Matrix<S>&, int);                       \
  template Matrix<S> DownsampleBackward<S>(const Matrix<S>&, int, int);                 \
  template Matrix<S> DropoutForward<S>(const Matrix<S>&, double, Rng*, bool,            \
                                       DropoutCache<S>*);                               \
  template Matrix<S> DropoutBackward<S>(const DropoutCache<S>&, const Matrix<S>&);      \
  template Matrix<S> SumOverTime<S>(const Matrix<S>&);                                  \
  template Matrix<S> SumOverTimeBackward<S>(const Matrix<S>&, int);

KWS_INSTANTIATE_LAYERS(float)
KWS_INSTANTIATE_LAYERS(double)

#undef KWS_INSTANTIATE_LAYERS

}  // namespace kws
