// kws/kernels.cc

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

#include "kws/kernels.h"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kws {

namespace {
bool g_parallel = true;
}  // namespace

void SetParallelKernels(bool enabled) { g_parallel = enabled; }
bool ParallelKernelsEnabled() {
#ifdef _OPENMP
  return g_parallel;
#else
  return false;
#endif
}

int KernelThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <typename S>
static void GemmNNRow(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c,
                      bool accumulate, int i) {
  const int k_dim = a.Cols();
  const int n = b.Cols();
  S* crow = c->Row(i);
  if (!accumulate) {
    for (int j = 0; j < n; ++j) crow[j] = S(0);
  }
  const S* arow = a.Row(i);
  for (int k = 0; k < k_dim; ++k) {
    const S aik = arow[k];
    if (aik == S(0)) continue;
    const S* brow = b.Row(k);
    for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
  }
}

template <typename S>
void GemmNNSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Cols() == b.Rows() && c->Rows() == a.Rows() && c->Cols() == b.Cols());
  for (int i = 0; i < a.Rows(); ++i) GemmNNRow(a, b, c, accumulate, i);
}

template <typename S>
void GemmNNParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Cols() == b.Rows() && c->Rows() == a.Rows() && c->Cols() == b.Cols());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.Rows(); ++i) GemmNNRow(a, b, c, accumulate, i);
}

template <typename S>
static void GemmNTRow(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c,
                      bool accumulate, int i) {
  const int k_dim = a.Cols();
  const int n = b.Rows();
  const S* arow = a.Row(i);
  S* crow = c->Row(i);
  for (int j = 0; j < n; ++j) {
    const S* brow = b.Row(j);
    S acc = S(0);
    for (int k = 0; k < k_dim; ++k) acc += arow[k] * brow[k];
    crow[j] = accumulate ? crow[j] + acc : acc;
  }
}

template <typename S>
void GemmNTSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Cols() == b.Cols() && c->Rows() == a.Rows() && c->Cols() == b.Rows());
  for (int i = 0; i < a.Rows(); ++i) GemmNTRow(a, b, c, accumulate, i);
}

template <typename S>
void GemmNTParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Cols() == b.Cols() && c->Rows() == a.Rows() && c->Cols() == b.Rows());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.Rows(); ++i) GemmNTRow(a, b, c, accumulate, i);
}

template <typename S>
static void GemmTNRow(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c,
                      bool accumulate, int i) {
  // C(i,j) = sum_k A(k,i) * B(k,j); row i of C touches column i of A.
  const int k_dim = a.Rows();
  const int n = b.Cols();
  S* crow = c->Row(i);
  if (!accumulate) {
    for (int j = 0; j < n; ++j) crow[j] = S(0);
  }
  for (int k = 0; k < k_dim; ++k) {
    const S aki = a(k, i);
    if (aki == S(0)) continue;
    const S* brow = b.Row(k);
    for (int j = 0; j < n; ++j) crow[j] += aki * brow[j];
  }
}

template <typename S>
void GemmTNSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Rows() == b.Rows() && c->Rows() == a.Cols() && c->Cols() == b.Cols());
  for (int i = 0; i < a.Cols(); ++i) GemmTNRow(a, b, c, accumulate, i);
}

template <typename S>
void GemmTNParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  assert(a.Rows() == b.Rows() && c->Rows() == a.Cols() && c->Cols() == b.Cols());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.Cols(); ++i) GemmTNRow(a, b, c, accumulate, i);
}

template <typename S>
void MatMulNN(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  if (ParallelKernelsEnabled()) {
    GemmNNParallel(a, b, c, accumulate);
  } else {
    GemmNNSerial(a, b, c, accumulate);
  }
}

template <typename S>
void MatMulNT(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  if (ParallelKernelsEnabled()) {
    GemmNTParallel(a, b, c, accumulate);
  } else {
    GemmNTSerial(a, b, c, accumulate);
  }
}

template <typename S>
void MatMulTN(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate) {
  if (ParallelKernelsEnabled()) {
    GemmTNParallel(a, b, c, accumulate);
  } else {
    GemmTNSerial(a, b, c, accumulate);
  }
}

template <typename S>
void MatVec(const S* x, const Matrix<S>& b, S* y, bool accumulate) {
  const int k_dim = b.Rows();
  const int n = b.Cols();
  if (!accumulate) {
    for (int j = 0; j < n; ++j) y[j] = S(0);
  }
  for (int k = 0; k < k_dim; ++k) {
    const S xk = x[k];
    if (xk == S(0)) continue;
    const S* brow = b.Row(k);
    for (int j = 0; j < n; ++j) y[j] += xk * brow[j];
  }
}

template <typename S>
void RowDotSerial(const Matrix<S>& a, const S* v, S* out) {
  for (int t = 0; t < a.Rows(); ++t) {
    const S* row = a.Row(t);
    S acc = S(0);
    for (int d = 0; d < a.Cols(); ++d) acc += row[d] * v[d];
    out[t] = acc;
  }
}

template <typename S>
void RowDotParallel(const Matrix<S>& a, const S* v, S* out) {
#pragma omp parallel for schedule(static)
  for (int t = 0; t < a.Rows(); ++t) {
    const S* row = a.Row(t);
    S acc = S(0);
    for (int d = 0; d < a.Cols(); ++d) acc += row[d] * v[d];
    out[t] = acc;
  }
}

template <typename S>
void RowDot(const Matrix<S>& a, const S* v, S* out) {
  if (ParallelKernelsEnabled()) {
    RowDotParallel(a, v, out);
  } else {
    RowDotSerial(a, v, out);
  }
}

#define KWS_INSTANTIATE_KERNELS(S)                                                      \
  template void GemmNNSerial<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);  \
  template void GemmNTSerial<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);  \
  template void GemmTNSerial<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);  \
  template void GemmNNParallel<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);\
  template void GemmNTParallel<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);\
  template void GemmTNParallel<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);\
  template void MatMulNN<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);      \
  template void MatMulNT<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);      \
  template void MatMulTN<S>(const Matrix<S>&, const Matrix<S>&, Matrix<S>*, bool);      \
  template void MatVec<S>(const S*, const Matrix<S>&, S*, bool);                        \
  template void RowDotSerial<S>(const Matrix<S>&, const S*, S*);                        \
  template void RowDotParallel<S>(const Matrix<S>&, const S*, S*);                      \
  template void RowDot<S>(const Matrix<S>&, const S*, S*);

KWS_INSTANTIATE_KERNELS(float)
KWS_INSTANTIATE_KERNELS(double)

#undef KWS_INSTANTIATE_KERNELS

}  // namespace kws
