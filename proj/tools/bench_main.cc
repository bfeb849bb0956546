// tools/bench_main.cc

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

// Compares the serial reference kernels against the OpenMP versions and
// checks that their outputs are bitwise identical.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "kws/kernels.h"
#include "kws/rng.h"

using namespace kws;

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix<float> RandomMatrix(int rows, int cols, Rng* rng) {
  Matrix<float> m(rows, cols);
  for (size_t i = 0; i < m.Size(); ++i) {
    m.Data()[i] = static_cast<float>(rng->Uniform() * 2.0 - 1.0);
  }
  return m;
}

struct BenchResult {
  double serial_sec;
  double parallel_sec;
  bool identical;
};

template <typename SerialFn, typename ParallelFn>
BenchResult TimePair(int repeats, Matrix<float>* out_serial, Matrix<float>* out_parallel,
                     SerialFn serial, ParallelFn parallel) {
  BenchResult r{};
  auto t0 = Clock::now();
  for (int i = 0; i < repeats; ++i) serial(out_serial);
  r.serial_sec = SecondsSince(t0);
  t0 = Clock::now();
  for (int i = 0; i < repeats; ++i) parallel(out_parallel);
  r.parallel_sec = SecondsSince(t0);
  r.identical = std::memcmp(out_serial->Data(), out_parallel->Data(),
                            out_serial->Size() * sizeof(float)) == 0;
  return r;
}

void Report(const char* name, const BenchResult& r) {
  std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n",
              name, r.serial_sec * 1e3, r.parallel_sec * 1e3,
              r.serial_sec / r.parallel_sec, r.identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
  Rng rng(7);
  std::printf("kernel threads: %d\n", KernelThreads());

  {
    const int m = 256, k = 192, n = 256, repeats = 50;
    const Matrix<float> a = RandomMatrix(m, k, &rng);
    const Matrix<float> b = RandomMatrix(k, n, &rng);
    Matrix<float> cs(m, n), cp(m, n);
    Report("gemm NN 256x192x256",
           TimePair(repeats, &cs, &cp,
                    [&](Matrix<float>* c) { GemmNNSerial(a, b, c, false); },
                    [&](Matrix<float>* c) { GemmNNParallel(a, b, c, false); }));
  }
  {
    const int m = 256, k = 192, n = 256, repeats = 50;
    const Matrix<float> a = RandomMatrix(m, k, &rng);
    const Matrix<float> b = RandomMatrix(n, k, &rng);
    Matrix<float> cs(m, n), cp(m, n);
    Report("gemm NT 256x192x256",
           TimePair(repeats, &cs, &cp,
                    [&](Matrix<float>* c) { GemmNTSerial(a, b, c, false); },
                    [&](Matrix<float>* c) { GemmNTParallel(a, b, c, false); }));
  }
  {
    const int m = 192, k = 256, n = 256, repeats = 50;
    const Matrix<float> a = RandomMatrix(k, m, &rng);
    const Matrix<float> b = RandomMatrix(k, n, &rng);
    Matrix<float> cs(m, n), cp(m, n);
    Report("gemm TN 192x256x256",
           TimePair(repeats, &cs, &cp,
                    [&](Matrix<float>* c) { GemmTNSerial(a, b, c, false); },
                    [&](Matrix<float>* c) { GemmTNParallel(a, b, c, false); }));
  }
  {
    // Archive scoring: one query vector against many encoded frames.
    const int frames = 200000, dim = 64, repeats = 20;
    const Matrix<float> enc = RandomMatrix(frames, dim, &rng);
    const Matrix<float> query = RandomMatrix(1, dim, &rng);
    Matrix<float> zs(1, frames), zp(1, frames);
    Report("frame scoring 200k frames",
           TimePair(repeats, &zs, &zp,
                    [&](Matrix<float>* z) { RowDotSerial(enc, query.Row(0), z->Data()); },
                    [&](Matrix<float>* z) { RowDotParallel(enc, query.Row(0), z->Data()); }));
  }
  return 0;
}
