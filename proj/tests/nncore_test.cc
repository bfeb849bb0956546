// tests/nncore_test.cc

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

#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "grad_harness.h"
#include "kws/checkpoint.h"
#include "kws/grad_check.h"
#include "kws/layers.h"
#include "kws/optimizer.h"

using namespace kws;
using kws::testing::RandomMatrix;

TEST_CASE("embedding selects rows and scatters gradients") {
  Tensor<double> table(2, 2);
  table.value(0, 0) = 1;
  table.value(0, 1) = 2;
  table.value(1, 0) = 3;
  table.value(1, 1) = 4;

  const Matrix<double> out = EmbeddingForward(table, {1, 0});
  CHECK(out(0, 0) == 3);
  CHECK(out(0, 1) == 4);
  CHECK(out(1, 0) == 1);
  CHECK(out(1, 1) == 2);

  EmbeddingCache cache;
  EmbeddingForward(table, {0, 0}, &cache);
  Matrix<double> dy(2, 2, 1.0);
  EmbeddingBackward(&table, cache, dy);
  CHECK(table.grad(0, 0) == 2);
  CHECK(table.grad(0, 1) == 2);
  CHECK(table.grad(1, 0) == 0);
  CHECK(table.grad(1, 1) == 0);

  CHECK_THROWS_AS(EmbeddingForward(table, {5}), std::out_of_range);
}

TEST_CASE("affine identity and zero cases") {
  AffineParams<double> p;
  Rng rng(1);
  p.Init(2, 2, &rng);
  p.w.value.SetZero();
  p.w.value(0, 0) = 1;
  p.w.value(1, 1) = 1;
  p.b.value.SetZero();
  Matrix<double> x = RandomMatrix(3, 2, &rng);
  const Matrix<double> y = AffineForward(p, x);
  for (int r = 0; r < 3; ++r) {
    CHECK(y(r, 0) == x(r, 0));
    CHECK(y(r, 1) == x(r, 1));
  }

  AffineParams<double> q;
  q.Init(2, 1, &rng);
  q.w.value.SetZero();
  q.b.value(0, 0) = 1.0;
  const Matrix<double> ones = AffineForward(q, x);
  for (int r = 0; r < 3; ++r) CHECK(ones(r, 0) == 1.0);
}

TEST_CASE("zero-weight recurrences sit at their fixed points") {
  Rng rng(2);
  const Matrix<double> x = RandomMatrix(4, 3, &rng);

  GruParams<double> gp;
  gp.Init(3, 2, &rng);
  gp.wx.value.SetZero();
  gp.wh_gates.value.SetZero();
  gp.wh_cand.value.SetZero();
  gp.b.value.SetZero();
  GruCache<double> gc;
  const Matrix<double> gh = GruForward(gp, x, Direction::kForward, &gc);
  for (size_t i = 0; i < gh.Size(); ++i) CHECK(gh.Data()[i] == 0.0);
  for (size_t i = 0; i < gc.z.Size(); ++i) CHECK(gc.z.Data()[i] == 0.5);

  LstmParams<double> lp;
  lp.Init(3, 2, &rng);
  lp.wx.value.SetZero();
  lp.wh.value.SetZero();
  lp.b.value.SetZero();
  LstmCache<double> lc;
  const Matrix<double> lh = LstmForward(lp, x, Direction::kForward, &lc);
  for (size_t i = 0; i < lh.Size(); ++i) CHECK(lh.Data()[i] == 0.0);
  for (size_t i = 0; i < lc.i.Size(); ++i) CHECK(lc.i.Data()[i] == 0.5);
  for (size_t i = 0; i < lc.c.Size(); ++i) CHECK(lc.c.Data()[i] == 0.0);
}

TEST_CASE("length-1 sequences make direction irrelevant") {
  Rng rng(3);
  const Matrix<double> x = RandomMatrix(1, 3, &rng);
  GruParams<double> gp;
  gp.Init(3, 2, &rng);
  const Matrix<double> f = GruForward(gp, x, Direction::kForward);
  const Matrix<double> b = GruForward(gp, x, Direction::kBackward);
  CHECK(std::memcmp(f.Data(), b.Data(), f.Size() * sizeof(double)) == 0);

  LstmParams<double> lp;
  lp.Init(3, 2, &rng);
  const Matrix<double> lf = LstmForward(lp, x, Direction::kForward);
  const Matrix<double> lb = LstmForward(lp, x, Direction::kBackward);
  CHECK(std::memcmp(lf.Data(), lb.Data(), lf.Size() * sizeof(double)) == 0);
}

TEST_CASE("bidirectional output on a palindrome mirrors with swapped halves") {
  Rng rng(4);
  const int t = 5, a = 3, h = 2;
  Matrix<double> x(t, a);
  for (int r = 0; r < (t + 1) / 2; ++r) {
    for (int c = 0; c < a; ++c) {
      const double v = rng.Uniform() - 0.5;
      x(r, c) = v;
      x(t - 1 - r, c) = v;
    }
  }
  BiLstmParams<double> p;
  p.Init(a, h, &rng);
  p.bwd = p.fwd;  // tied directions
  const Matrix<double> y = BiLstmForward(p, x);
  for (int r = 0; r < t; ++r) {
    for (int c = 0; c < h; ++c) {
      CHECK(y(r, c) == doctest::Approx(y(t - 1 - r, h + c)).epsilon(1e-12));
      CHECK(y(r, h + c) == doctest::Approx(y(t - 1 - r, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("temporal downsampling keeps strided frames") {
  Rng rng(5);
  const Matrix<double> x4 = RandomMatrix(4, 2, &rng);
  const Matrix<double> d4 = DownsampleForward(x4, 2);
  REQUIRE(d4.Rows() == 2);
  CHECK(d4(0, 0) == x4(0, 0));
  CHECK(d4(1, 0) == x4(2, 0));

  const Matrix<double> x5 = RandomMatrix(5, 2, &rng);
  const Matrix<double> d5 = DownsampleForward(x5, 2);
  REQUIRE(d5.Rows() == 3);
  CHECK(d5(2, 1) == x5(4, 1));

  for (int t = 1; t <= 9; ++t) {
    CHECK(DownsampleForward(RandomMatrix(t, 1, &rng), 2).Rows() == (t + 1) / 2);
  }

  // Gradient routes only to kept frames.
  Matrix<double> dy(2, 2, 1.0);
  const Matrix<double> dx = DownsampleBackward(dy, 4, 2);
  CHECK(dx(0, 0) == 1.0);
  CHECK(dx(1, 0) == 0.0);
  CHECK(dx(2, 0) == 1.0);
  CHECK(dx(3, 0) == 0.0);
}

TEST_CASE("dropout identity cases and empirical rate") {
  Rng rng(6);
  const Matrix<double> x = RandomMatrix(10, 10, &rng);
  DropoutCache<double> cache;
  const Matrix<double> same_rate0 = DropoutForward(x, 0.0, &rng, true, &cache);
  CHECK(std::memcmp(same_rate0.Data(), x.Data(), x.Size() * sizeof(double)) == 0);
  const Matrix<double> same_eval = DropoutForward(x, 0.5, &rng, false, &cache);
  CHECK(std::memcmp(same_eval.Data(), x.Data(), x.Size() * sizeof(double)) == 0);

  const double rate = 0.4;
  const int n = 100000;
  Matrix<double> big(n / 100, 100, 1.0);
  DropoutCache<double> c2;
  const Matrix<double> dropped = DropoutForward(big, rate, &rng, true, &c2);
  int zeros = 0;
  for (size_t i = 0; i < dropped.Size(); ++i) zeros += dropped.Data()[i] == 0.0;
  CHECK(std::fabs(static_cast<double>(zeros) / n - rate) < 0.01);
}

TEST_CASE("sum over time is a permutation-invariant broadcast in reverse") {
  Rng rng(7);
  const Matrix<double> x1 = RandomMatrix(1, 4, &rng);
  const Matrix<double> s1 = SumOverTime(x1);
  CHECK(std::memcmp(s1.Data(), x1.Data(), 4 * sizeof(double)) == 0);

  Matrix<double> x = RandomMatrix(5, 3, &rng);
  const Matrix<double> s = SumOverTime(x);
  Matrix<double> permuted(5, 3);
  const int perm[5] = {3, 0, 4, 2, 1};
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 3; ++c) permuted(r, c) = x(perm[r], c);
  }
  const Matrix<double> sp = SumOverTime(permuted);
  for (int c = 0; c < 3; ++c) CHECK(s(0, c) == doctest::Approx(sp(0, c)).epsilon(1e-12));

  const Matrix<double> d = RandomMatrix(1, 3, &rng);
  const Matrix<double> dx = SumOverTimeBackward(d, 5);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(dx(r, c) == d(0, c));
  }
}

TEST_CASE("grad_check on a quadratic is exact to roundoff") {
  Tensor<double> p(1, 3);
  p.value(0, 0) = 0.7;
  p.value(0, 1) = -1.2;
  p.value(0, 2) = 2.5;
  ParameterSet<double> params;
  params.Register("p", &p);
  const auto loss = [&]() {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += p.value(0, i) * p.value(0, i);
    return 0.5 * acc;
  };
  for (int i = 0; i < 3; ++i) p.grad(0, i) = p.value(0, i);
  CHECK(GradCheck(loss, params) < 1e-9);

  // Zero-gradient point.
  p.value.SetZero();
  p.grad.SetZero();
  CHECK(GradCheck(loss, params) < 1e-9);
}

TEST_CASE("every layer passes central finite differences at 64-bit") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CHECK(kws::testing::CheckEmbedding(seed) < 1e-4);
    CHECK(kws::testing::CheckAffine(seed) < 1e-4);
    CHECK(kws::testing::CheckGru(seed, Direction::kForward) < 1e-4);
    CHECK(kws::testing::CheckGru(seed, Direction::kBackward) < 1e-4);
    CHECK(kws::testing::CheckLstm(seed, Direction::kForward) < 1e-4);
    CHECK(kws::testing::CheckLstm(seed, Direction::kBackward) < 1e-4);
    CHECK(kws::testing::CheckBiGru(seed) < 1e-4);
    CHECK(kws::testing::CheckBiLstm(seed) < 1e-4);
    CHECK(kws::testing::CheckDownsample(seed) < 1e-4);
    CHECK(kws::testing::CheckSumOverTime(seed) < 1e-4);
    CHECK(kws::testing::CheckDropout(seed) < 1e-4);
  }
}

TEST_CASE("optimizer semantics") {
  SUBCASE("zero gradients leave parameters unchanged") {
    Tensor<float> p(1, 2);
    p.value(0, 0) = 1.5f;
    p.value(0, 1) = -2.0f;
    ParameterSet<float> params;
    params.Register("p", &p);
    AdamOptimizer<float> opt(params, {});
    p.ZeroGrad();
    opt.Step(params);
    CHECK(p.value(0, 0) == 1.5f);
    CHECK(p.value(0, 1) == -2.0f);
  }

  SUBCASE("bias-corrected first step moves by about the learning rate") {
    Tensor<float> p(1, 1);
    p.value(0, 0) = 1.0f;
    ParameterSet<float> params;
    params.Register("p", &p);
    OptimizerConfig cfg;
    cfg.learning_rate = 0.1;
    AdamOptimizer<float> opt(params, cfg);
    p.grad(0, 0) = 1.0f;
    opt.Step(params);
    CHECK(p.value(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  }

  SUBCASE("global-norm clipping rescales to the threshold") {
    Tensor<float> p(1, 2);
    ParameterSet<float> params;
    params.Register("p", &p);
    OptimizerConfig cfg;
    cfg.clip_norm = 5.0;
    AdamOptimizer<float> opt(params, cfg);
    p.grad(0, 0) = 6.0f;
    p.grad(0, 1) = 8.0f;  // norm 10
    opt.Step(params);
    CHECK(params.GradNorm() == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(p.grad(0, 0) == doctest::Approx(3.0f).epsilon(1e-6));
    CHECK(p.grad(0, 1) == doctest::Approx(4.0f).epsilon(1e-6));
  }
}

TEST_CASE("checkpoint archive roundtrips tensors, extras and the step") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "kws_ckpt_test.ckpt").string();
  Checkpoint ckpt;
  ckpt.step = 1234;
  Rng rng(8);
  Matrix<float> m(3, 4);
  for (size_t i = 0; i < m.Size(); ++i) m.Data()[i] = static_cast<float>(rng.Normal());
  ckpt.tensors.emplace_back("layer.w", m);
  ckpt.extras.emplace_back("rng", std::vector<uint64_t>{1, 2, 3, 4});

  WriteCheckpoint(path, ckpt);
  const Checkpoint r = ReadCheckpoint(path);
  CHECK(r.step == 1234);
  REQUIRE(r.FindTensor("layer.w") != nullptr);
  CHECK(std::memcmp(r.FindTensor("layer.w")->Data(), m.Data(),
                    m.Size() * sizeof(float)) == 0);
  REQUIRE(r.FindExtra("rng") != nullptr);
  CHECK((*r.FindExtra("rng"))[3] == 4);

  std::filesystem::remove(path);
}
