// kws/kernels.h

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

#ifndef KWS_KERNELS_H_
#define KWS_KERNELS_H_

#include "kws/matrix.h"

namespace kws {

// Matrix-product kernels. Each comes in a serial reference version and an
// OpenMP version parallelized over output rows; because every output element
// is still reduced in the same serial k-order, the two are bitwise identical
// for any thread count. MatMul* dispatches to the OpenMP version when the
// library was built with OpenMP and parallel kernels are enabled.
//
// Shapes (row-major):
//   NN:  C(MxN) (+)= A(MxK)  * B(KxN)
//   NT:  C(MxN) (+)= A(MxK)  * B(NxK)^T
//   TN:  C(MxN) (+)= A(KxM)^T * B(KxN)

void SetParallelKernels(bool enabled);
bool ParallelKernelsEnabled();
// Number of threads the OpenMP kernels would use (1 without OpenMP).
int KernelThreads();

template <typename S>
void GemmNNSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);
template <typename S>
void GemmNTSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);
template <typename S>
void GemmTNSerial(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);

template <typename S>
void GemmNNParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);
template <typename S>
void GemmNTParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);
template <typename S>
void GemmTNParallel(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate);

template <typename S>
void MatMulNN(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate = false);
template <typename S>
void MatMulNT(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate = false);
template <typename S>
void MatMulTN(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>* c, bool accumulate = false);

// y(1xN) (+)= x(1xK) * B(KxN). Serial everywhere; the rows are too small for
// parallelism to pay off inside recurrent steps.
template <typename S>
void MatVec(const S* x, const Matrix<S>& b, S* y, bool accumulate);

// out[t] = sum_d a(t,d) * v[d] for every row of `a`; the frame-scoring
// kernel. Serial reference plus row-parallel version, bitwise identical.
template <typename S>
void RowDotSerial(const Matrix<S>& a, const S* v, S* out);
template <typename S>
void RowDotParallel(const Matrix<S>& a, const S* v, S* out);
template <typename S>
void RowDot(const Matrix<S>& a, const S* v, S* out);

}  // namespace kws

#endif  // KWS_KERNELS_H_
