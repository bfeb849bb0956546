// tests/trainer_test.cc

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

#include "kws/trainer.h"

#include <filesystem>
#include <unistd.h>
#include <fstream>

#include "doctest.h"
#include "kws/error.h"
#include "kws/io_util.h"
#include "kws/synth.h"

using namespace kws;

namespace {

std::string TempDir() {
  static int counter = 0;
  const std::string dir =
      (std::filesystem::temp_directory_path() /
       ("kws_trainer_test_" + std::to_string(::getpid()) + "_" +
        std::to_string(counter++)))
          .string();
  std::filesystem::create_directories(dir);
  return dir;
}

// A small deterministic dataset: 6 sentences over a 4-word vocabulary.
std::string MakeDataset(uint64_t seed) {
  const std::string dir = TempDir();
  const std::vector<std::string> lines = {
      "dim = 4",
      "frame_shift_ms = 20",
      "noise_std = 0.01",
      "speaker_offset_std = 0",
      "seed = " + std::to_string(seed),
      "grapheme a 2",
      "grapheme b 2",
      "grapheme c 2",
      "grapheme d 2",
      "sentence ab cd",
      "sentence cd ab ab",
      "sentence ad",
      "sentence bc ad cd",
      "sentence ab",
      "sentence bc",
  };
  WriteSynthOutput(SynthesizeCorpus(SynthSpec::Parse(lines, "test")), dir);
  return dir;
}

std::string MakeTextCorpus() {
  const std::string dir = TempDir();
  std::ofstream out(dir + "/text.tsv");
  out << "t0\tab cd\nt1\tda bc\nt2\tcd cd ab\nt3\tbd\n";
  out.close();
  return dir + "/text.tsv";
}

RunConfig SmallConfig(const std::string& paired_dir) {
  RunConfig cfg;
  cfg.mode = "baseline";
  cfg.paired_dir = paired_dir;
  cfg.encoder = EncoderConfig::Desk();
  cfg.encoder.feature_dim = 4;
  cfg.encoder.doc_hidden = 8;
  cfg.encoder.query_gru_hidden = 6;
  cfg.encoder.query_embed_dim = 6;
  cfg.encoder.output_dim = 8;
  cfg.encoder.text_embed_dim = 4;
  cfg.encoder.text_lstm_hidden = 4;
  cfg.steps = 6;
  cfg.queries_per_step = 2;
  cfg.docs_per_query_audio = 2;
  cfg.docs_per_query_text = 2;
  cfg.checkpoint_interval = 3;
  cfg.seed = 5;
  return cfg;
}

std::string FileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("modified BCE values and gates") {
  const LossConfig cfg;  // phi = 0.7, lambda = 5

  SUBCASE("hand-evaluated examples") {
    CHECK(ModifiedBce({0.2}, {0}, cfg) == doctest::Approx(0.0));
    CHECK(ModifiedBce({0.5}, {0}, cfg) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(ModifiedBce({0.5}, {1}, cfg) ==
          doctest::Approx(3.4657359027997265).epsilon(1e-12));
  }

  SUBCASE("nonnegative, zero exactly when every frame is gated out") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + static_cast<int>(rng.UniformInt(6));
      std::vector<double> z(n);
      std::vector<uint8_t> y(n);
      for (int i = 0; i < n; ++i) {
        z[i] = 0.01 + 0.98 * rng.Uniform();
        y[i] = rng.UniformInt(2);
      }
      const double loss = ModifiedBce(z, y, cfg);
      CHECK(loss >= 0.0);
      bool all_gated = true;
      for (int i = 0; i < n; ++i) {
        if (y[i] ? z[i] < cfg.phi : z[i] > 1.0 - cfg.phi) all_gated = false;
      }
      CHECK((loss == 0.0) == all_gated);
    }
  }

  SUBCASE("phi = 1 recovers plain weighted BCE") {
    LossConfig open;
    open.phi = 1.0;
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + static_cast<int>(rng.UniformInt(5));
      std::vector<double> z(n);
      std::vector<uint8_t> y(n);
      double expected = 0.0;
      for (int i = 0; i < n; ++i) {
        z[i] = 0.05 + 0.9 * rng.Uniform();
        y[i] = rng.UniformInt(2);
        expected -= y[i] ? open.lambda * std::log(z[i]) : std::log(1.0 - z[i]);
      }
      CHECK(ModifiedBce(z, y, open) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("gradient pushes open-gate scores the right way") {
    const std::vector<float> logits = {0.0f};  // z = 0.5
    std::vector<float> d;
    ModifiedBceFromLogits<float>(logits, {1}, cfg, 1.0, &d);
    CHECK(d[0] < 0.0f);  // raising the score lowers the loss
    ModifiedBceFromLogits<float>(logits, {0}, cfg, 1.0, &d);
    CHECK(d[0] > 0.0f);
  }

  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(ModifiedBce({0.5, 0.5}, {1}, cfg), std::invalid_argument);
  }
}

TEST_CASE("modality sampling") {
  Rng rng(3);
  CHECK(SampleModality(&rng, false) == Modality::kAudio);

  Rng seeded_a(7), seeded_b(7);
  for (int i = 0; i < 10; ++i) {
    CHECK(SampleModality(&seeded_a, true) == SampleModality(&seeded_b, true));
  }

  int audio = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    audio += SampleModality(&rng, true) == Modality::kAudio;
  }
  const double freq = static_cast<double>(audio) / n;
  CHECK(freq >= 0.48);
  CHECK(freq <= 0.52);
}

TEST_CASE("query sampling is proportional to occurrence count") {
  const QueryInventory inv =
      QueryInventory::Build({Transcript{"d0", {"a"}}, Transcript{"d1", {"a"}},
                             Transcript{"d2", {"b"}}},
                            /*n_max=*/1);
  // Inventory {a:2, b:1}.
  Rng rng(11);
  int a_draws = 0;
  const int n = 100000;
  for (const size_t flat : SampleQueryBatch(inv, n, &rng)) {
    const auto [entry, occ] = inv.OccurrenceAt(flat);
    a_draws += inv.Entry(entry).words[0] == "a";
  }
  CHECK(std::fabs(a_draws / static_cast<double>(n) - 2.0 / 3.0) < 0.01);

  const QueryInventory single = QueryInventory::Build({Transcript{"d", {"x"}}});
  for (const size_t flat : SampleQueryBatch(single, 10, &rng)) {
    CHECK(inv.OccurrenceAt(0).first == 0);
    (void)flat;
  }

  CHECK_THROWS_AS(SampleQueryBatch(inv, 0, &rng), std::invalid_argument);
}

TEST_CASE("batch assembly invariants") {
  const std::string dir = MakeDataset(31);
  Dataset ds = Dataset::Load(dir);
  ds.LoadFeatures();
  const QueryInventory inv = QueryInventory::Build(ds.transcripts);
  const AudioSource source{&ds, &inv};
  const GraphemeVocab vocab(ds.graphemes);
  const EncoderConfig enc = SmallConfig(dir).encoder;
  Rng rng(13);

  SUBCASE("M = 1 yields positives only, each with a positive frame") {
    const auto draws = SampleQueryBatch(inv, 8, &rng);
    const Batch batch = AssembleAudioBatch(draws, source, 1, enc, vocab, &rng);
    for (const QueryTask& task : batch.queries) {
      REQUIRE(task.docs.size() == 1);
      int positives = 0;
      for (uint8_t b : task.docs[0].labels) positives += b;
      CHECK(positives >= 1);
    }
  }

  SUBCASE("document 0 always contains the query even with negatives") {
    const auto draws = SampleQueryBatch(inv, 8, &rng);
    const Batch batch = AssembleAudioBatch(draws, source, 3, enc, vocab, &rng);
    for (const QueryTask& task : batch.queries) {
      REQUIRE(task.docs.size() == 3);
      int positives = 0;
      for (uint8_t b : task.docs[0].labels) positives += b;
      CHECK(positives >= 1);
      for (const TrainDoc& doc : task.docs) {
        CHECK(doc.labels.size() ==
              static_cast<size_t>(
                  enc.SpeechOutputFrames(ds.features[doc.dataset_index].NumFrames())));
      }
    }
  }

  SUBCASE("a negative that contains the query gets positive labels") {
    // Two documents, both containing the word; any negative draw collides.
    Dataset two;
    two.graphemes = {U'a', U'b'};
    for (int d = 0; d < 2; ++d) {
      const std::string id = "d" + std::to_string(d);
      two.records.push_back({id, "", 8, 2, 10.0});
      two.transcripts.push_back({id, {"ab"}});
      two.alignments.push_back({id, {{0, 0.0, 0.08}}});
      FeatureMatrix f;
      f.frame_shift_ms = 10.0f;
      f.frames.Resize(8, 2);
      two.features.push_back(f);
      two.doc_index[id] = d;
    }
    const QueryInventory inv2 = QueryInventory::Build(two.transcripts);
    const AudioSource source2{&two, &inv2};
    EncoderConfig enc2 = enc;
    enc2.feature_dim = 2;
    const auto draws = SampleQueryBatch(inv2, 4, &rng);
    const Batch batch =
        AssembleAudioBatch(draws, source2, 2, enc2, GraphemeVocab(two.graphemes), &rng);
    for (const QueryTask& task : batch.queries) {
      for (const TrainDoc& doc : task.docs) {
        int positives = 0;
        for (uint8_t b : doc.labels) positives += b;
        CHECK(positives >= 1);  // both docs contain every sampled query
      }
    }
  }
}

TEST_CASE("training runs are deterministic and resumable") {
  const std::string data = MakeDataset(41);

  SUBCASE("same config, same seed: identical checkpoints and metrics") {
    RunConfig a = SmallConfig(data);
    a.out_dir = TempDir();
    RunConfig b = a;
    b.out_dir = TempDir();
    Trainer(a).Run();
    Trainer(b).Run();
    CHECK(FileBytes(a.out_dir + "/last.ckpt") == FileBytes(b.out_dir + "/last.ckpt"));
    CHECK(FileBytes(a.out_dir + "/metrics.tsv") == FileBytes(b.out_dir + "/metrics.tsv"));
  }

  SUBCASE("resume from a mid-run checkpoint reproduces the full run") {
    RunConfig full = SmallConfig(data);
    full.out_dir = TempDir();
    Trainer(full).Run();

    RunConfig half = SmallConfig(data);
    half.steps = 3;
    half.out_dir = TempDir();
    Trainer(half).Run();

    RunConfig rest = SmallConfig(data);
    rest.out_dir = TempDir();
    rest.resume = half.out_dir + "/last.ckpt";
    Trainer(rest).Run();

    CHECK(FileBytes(full.out_dir + "/last.ckpt") ==
          FileBytes(rest.out_dir + "/last.ckpt"));
  }

  SUBCASE("metrics log has one line per interval") {
    RunConfig cfg = SmallConfig(data);
    cfg.steps = 12;
    cfg.checkpoint_interval = 4;
    cfg.out_dir = TempDir();
    Trainer(cfg).Run();
    CHECK(ReadLines(cfg.out_dir + "/metrics.tsv").size() == 3);
  }
}

TEST_CASE("joint mode requires unpaired text and consumes it") {
  const std::string data = MakeDataset(43);

  RunConfig cfg = SmallConfig(data);
  cfg.mode = "joint";
  cfg.out_dir = TempDir();
  SUBCASE("missing unpaired_text names the key") {
    try {
      Trainer t(cfg);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unpaired_text") != std::string::npos);
    }
  }

  SUBCASE("joint training steps over both modalities") {
    cfg.unpaired_text = MakeTextCorpus();
    cfg.steps = 8;
    cfg.checkpoint_interval = 8;
    Trainer t(cfg);
    const TrainResult result = t.Run();
    CHECK(result.steps_run == 8);
    const auto lines = ReadLines(cfg.out_dir + "/metrics.tsv");
    REQUIRE(lines.size() == 1);
    // modality mix field "a:t" with both nonzero is overwhelmingly likely
    // after 8 fair coin flips, but assert only the format here.
    const auto fields = SplitOn(lines[0], '\t');
    REQUIRE(fields.size() == 4);
    CHECK(fields[1].find(':') != std::string::npos);
  }
}

TEST_CASE("a single example repeated descends monotonically to near zero") {
  // One fixed batch, stepped repeatedly: deterministic full-batch descent.
  const std::string data = MakeDataset(53);
  Dataset ds = Dataset::Load(data);
  ds.LoadFeatures();
  const QueryInventory inv = QueryInventory::Build(ds.transcripts, 1);
  const AudioSource source{&ds, &inv};
  const GraphemeVocab vocab(ds.graphemes);
  EncoderConfig enc = SmallConfig(data).encoder;
  enc.dropout = 0.0;  // keep the repeated objective fixed
  Rng rng(3);
  const Batch batch =
      AssembleAudioBatch(SampleQueryBatch(inv, 2, &rng), source, 1, enc, vocab, &rng);

  // With phi < 1 the objective is only piecewise smooth: a frame whose
  // score crosses the tolerance re-enters the sum with a jump, so strict
  // monotonicity is checked on the ungated phi = 1 objective. The default
  // gated loss still has to reach the same floor.
  for (double phi : {1.0, 0.7}) {
    KwsModel<float> model(enc, vocab, false, 11);
    AdamOptimizer<float> opt(model.Params(),
                             OptimizerConfig{1e-3, 0.9, 0.999, 1e-8, 5.0});
    LossConfig loss_cfg;
    loss_cfg.phi = phi;
    double prev = 1e300;
    int below_at = -1;
    for (int step = 1; step <= 2000; ++step) {
      model.Params().ZeroGrad();
      const double loss =
          ComputeBatchGradients(&model, batch, loss_cfg, true, false, nullptr);
      opt.Step(model.Params());
      if (phi == 1.0 && step > 10) CHECK(loss <= prev + 1e-9);
      prev = loss;
      if (loss < 0.01 && below_at < 0) below_at = step;
      if (below_at > 0 && step > below_at + 20) break;
    }
    CHECK(below_at > 0);
    CHECK(below_at <= 2000);
  }
}

TEST_CASE("loss decreases when overfitting a few steps") {
  const std::string data = MakeDataset(47);
  RunConfig cfg = SmallConfig(data);
  cfg.steps = 40;
  cfg.checkpoint_interval = 10;
  cfg.learning_rate = 3e-3;
  cfg.out_dir = TempDir();
  Trainer t(cfg);
  t.Run();
  const auto lines = ReadLines(cfg.out_dir + "/metrics.tsv");
  REQUIRE(lines.size() == 4);
  const double first = ParseDouble(SplitOn(lines.front(), '\t')[2], "loss");
  const double last = ParseDouble(SplitOn(lines.back(), '\t')[2], "loss");
  CHECK(last < first);
}
