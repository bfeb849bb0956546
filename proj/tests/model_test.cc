// tests/model_test.cc

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

#include "kws/model.h"

#include <cmath>
#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "grad_harness.h"
#include "kws/error.h"

using namespace kws;

namespace {

EncoderConfig TinyConfig() {
  EncoderConfig c = EncoderConfig::Desk();
  c.feature_dim = 4;
  c.query_embed_dim = 4;
  c.query_gru_hidden = 3;
  c.doc_hidden = 3;
  c.output_dim = 5;
  c.text_embed_dim = 3;
  c.text_lstm_hidden = 3;
  return c;
}

GraphemeVocab TestVocab() { return GraphemeVocab({U'a', U'b', U'c'}); }

Matrix<float> RandomFeatures(int frames, int dim, uint64_t seed) {
  Rng rng(seed);
  Matrix<float> m(frames, dim);
  for (size_t i = 0; i < m.Size(); ++i) {
    m.Data()[i] = static_cast<float>(rng.Uniform() - 0.5);
  }
  return m;
}

}  // namespace

TEST_CASE("vocabulary rejects the mask symbol and unknown graphemes") {
  CHECK_THROWS_AS(GraphemeVocab({U'a', U'_'}), DataError);
  const GraphemeVocab v = TestVocab();
  CHECK(v.IdOf(U'b') == 1);
  CHECK(v.MaskId() == 3);
  CHECK_THROWS_AS(v.IdOf(U'z'), VocabularyError);
  CHECK_THROWS_AS(v.IdOf(kMaskSymbol), VocabularyError);
  CHECK(v.IdOf(kMaskSymbol, /*allow_mask=*/true) == 3);
}

TEST_CASE("query embeddings have the configured output width") {
  EncoderConfig cfg = TinyConfig();
  cfg.output_dim = 400;  // paper-sized projection on a tiny stack
  KwsModel<float> model(cfg, TestVocab(), false, 1);
  for (int len : {1, 3, 9}) {
    std::vector<int> ids(len, 0);
    const Matrix<float> e = model.EncodeQuery(ids);
    CHECK(e.Rows() == 1);
    CHECK(e.Cols() == 400);
  }
}

TEST_CASE("single-grapheme query embedding is the projection of one frame") {
  KwsModel<double> model(TinyConfig(), TestVocab(), false, 2);
  QueryTrace<double> trace;
  const Matrix<double> e = model.EncodeQueryTraced({1}, &trace);
  REQUIRE(trace.frames == 1);
  // Summing one projected frame is the frame itself.
  AffineCache<double> unused;
  (void)unused;
  for (int c = 0; c < e.Cols(); ++c) {
    CHECK(e(0, c) == doctest::Approx(trace.embedding(0, c)));
  }
}

TEST_CASE("differently seeded models embed the same query differently") {
  KwsModel<float> a(TinyConfig(), TestVocab(), false, 3);
  KwsModel<float> b(TinyConfig(), TestVocab(), false, 4);
  const std::vector<int> ids = {0, 1, 2};
  const Matrix<float> ea = a.EncodeQuery(ids);
  const Matrix<float> eb = b.EncodeQuery(ids);
  bool any_diff = false;
  for (int c = 0; c < ea.Cols(); ++c) any_diff |= ea(0, c) != eb(0, c);
  CHECK(any_diff);
}

TEST_CASE("speech encoding length follows the stride") {
  KwsModel<float> model(TinyConfig(), TestVocab(), false, 5);
  CHECK(model.EncodeSpeech(RandomFeatures(10, 4, 7)).Rows() == 5);
  CHECK(model.EncodeSpeech(RandomFeatures(11, 4, 7)).Rows() == 6);
  CHECK(model.Config().OutputFrameShiftMs(20.0) == 40.0);

  // Inference is deterministic (no dropout noise).
  const Matrix<float> feats = RandomFeatures(9, 4, 8);
  const Matrix<float> e1 = model.EncodeSpeech(feats);
  const Matrix<float> e2 = model.EncodeSpeech(feats);
  CHECK(std::memcmp(e1.Data(), e2.Data(), e1.Size() * sizeof(float)) == 0);

  CHECK_THROWS_AS(model.EncodeSpeech(RandomFeatures(4, 3, 9)), ConfigError);
}

TEST_CASE("text encoding runs through the shared stack") {
  KwsModel<float> model(TinyConfig(), TestVocab(), true, 6);
  std::vector<int> ids(12, 1);
  ids[3] = model.Vocab().MaskId();
  const Matrix<float> enc = model.EncodeText(ids);
  CHECK(enc.Rows() == 6);  // stride 2
  CHECK(enc.Cols() == model.Config().output_dim);

  KwsModel<float> baseline(TinyConfig(), TestVocab(), false, 6);
  CHECK_THROWS_AS(baseline.EncodeText(ids), ConfigError);
}

TEST_CASE("zero shared layers keeps the text path outside the speech stack") {
  EncoderConfig cfg = TinyConfig();
  cfg.shared_layers = 0;
  cfg.downsample_after = 1;  // lives in the speech-only part now
  KwsModel<float> model(cfg, TestVocab(), true, 7);
  CHECK(cfg.TextDownsampleFactor() == 1);
  const std::vector<int> ids(5, 0);
  const Matrix<float> enc = model.EncodeText(ids);
  CHECK(enc.Rows() == 5);  // no downsampling on the text path
  CHECK(model.Config().SpeechOutputFrames(10) == 5);
}

TEST_CASE("rebalancing shared vs speech-only layers preserves the speech path") {
  EncoderConfig a = TinyConfig();
  a.doc_layers = 2;
  a.shared_layers = 2;
  EncoderConfig b = a;
  b.shared_layers = 1;

  KwsModel<float> ma(a, TestVocab(), true, 8);
  KwsModel<float> mb(b, TestVocab(), true, 8);
  auto speech_params = [](const KwsModel<float>& m) {
    size_t n = 0;
    for (size_t i = 0; i < m.Params().NumTensors(); ++i) {
      const std::string& name = m.Params().Name(i);
      if (name.rfind("doc.", 0) == 0) n += m.Params().Get(i)->value.Size();
    }
    return n;
  };
  CHECK(speech_params(ma) == speech_params(mb));
}

TEST_CASE("frame scores are sigmoids of dot products") {
  Matrix<float> h(2, 1);
  h(0, 0) = 0.0f;
  h(1, 0) = std::log(3.0f);
  Matrix<float> e(1, 1);
  e(0, 0) = 1.0f;
  const std::vector<float> z = ScoreFrames(h, e);
  CHECK(z[0] == doctest::Approx(0.5));
  CHECK(z[1] == doctest::Approx(0.75));
  for (float v : z) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }

  Matrix<float> wrong(1, 2);
  CHECK_THROWS_AS(ScoreFrames(wrong, e), std::invalid_argument);
}

TEST_CASE("document encodings are query-independent and reloadable") {
  KwsModel<float> model(TinyConfig(), TestVocab(), false, 10);
  const Matrix<float> feats = RandomFeatures(12, 4, 11);
  const Matrix<float> enc = model.EncodeSpeech(feats);

  const std::string path =
      (std::filesystem::temp_directory_path() / "kws_model_enc.jfea").string();
  FeatureMatrix persisted;
  persisted.frame_shift_ms = 40.0f;
  persisted.frames = enc;
  WriteFeatures(persisted, path);
  const FeatureMatrix reloaded = ReadFeatures(path);
  std::filesystem::remove(path);

  for (const std::vector<int>& ids :
       {std::vector<int>{0}, std::vector<int>{2, 1}, std::vector<int>{1, 1, 0}}) {
    const Matrix<float> e = model.EncodeQuery(ids);
    const std::vector<float> direct = ScoreFrames(enc, e);
    const std::vector<float> from_file = ScoreFrames(reloaded.frames, e);
    REQUIRE(direct.size() == from_file.size());
    CHECK(std::memcmp(direct.data(), from_file.data(),
                      direct.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("model checkpoints reload bitwise and carry the vocabulary") {
  const EncoderConfig cfg = TinyConfig();
  KwsModel<float> model(cfg, TestVocab(), true, 12);
  const std::string path =
      (std::filesystem::temp_directory_path() / "kws_model_test.ckpt").string();
  WriteCheckpoint(path, MakeModelCheckpoint(model, 77));

  const Checkpoint ckpt = ReadCheckpoint(path);
  CHECK(ckpt.step == 77);
  CHECK(VocabFromCheckpoint(ckpt) == model.Vocab());

  // A search-time model (no text front-end) loads the same checkpoint.
  KwsModel<float> search_model(cfg, TestVocab(), false, 99);
  LoadModelParameters(ckpt, &search_model);
  const Matrix<float> feats = RandomFeatures(6, 4, 13);
  const Matrix<float> a = model.EncodeSpeech(feats);
  const Matrix<float> b = search_model.EncodeSpeech(feats);
  CHECK(std::memcmp(a.Data(), b.Data(), a.Size() * sizeof(float)) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("full-pipeline gradient check on a toy configuration") {
  CHECK(kws::testing::CheckFullTrainStep(21) < 1e-4);
}

TEST_CASE("paper-scale preset constructs and encodes" * doctest::skip(false)) {
  EncoderConfig cfg = EncoderConfig::Paper();
  cfg.feature_dim = 42;  // bottleneck-feature width
  KwsModel<float> model(cfg, TestVocab(), true, 1);

  const Matrix<float> e = model.EncodeQuery({0, 1, 2});
  CHECK(e.Cols() == 400);

  const Matrix<float> enc = model.EncodeSpeech(RandomFeatures(6, 42, 3));
  CHECK(enc.Rows() == 3);  // stride 2 after the fourth layer
  CHECK(enc.Cols() == 400);

  const Matrix<float> text_enc = model.EncodeText({0, model.Vocab().MaskId(), 2, 1});
  CHECK(text_enc.Rows() == 2);
  CHECK(text_enc.Cols() == 400);
}
