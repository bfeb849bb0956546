// tests/cli_test.cc

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

#include "kws/run_config.h"

#include "doctest.h"
#include "kws/error.h"
#include "kws/io_util.h"

using namespace kws;

TEST_CASE("run config defaults parse back to themselves") {
  const RunConfig defaults;
  const std::string emitted = defaults.Emit();
  const RunConfig reparsed = RunConfig::Parse(SplitOn(emitted, '\n'), "emit");
  CHECK(reparsed == defaults);
  CHECK(reparsed.Emit() == emitted);
}

TEST_CASE("parse -> emit -> parse is a fixpoint for custom configs") {
  const std::vector<std::string> lines = {
      "# comment lines are ignored",
      "mode = joint",
      "preset = paper",
      "doc_hidden = 96",
      "steps = 250",
      "seed = 99",
      "mask_prob = 0.15",
      "learning_rate = 0.0005",
      "paired_dir = /tmp/data",
      "unpaired_text = /tmp/text.tsv",
  };
  const RunConfig cfg = RunConfig::Parse(lines, "test");
  CHECK(cfg.encoder.doc_hidden == 96);
  CHECK(cfg.encoder.doc_layers == 6);  // from the paper preset
  CHECK(cfg.mask_prob == 0.15);

  const RunConfig again = RunConfig::Parse(SplitOn(cfg.Emit(), '\n'), "emit");
  CHECK(again == cfg);
  CHECK(again.Emit() == cfg.Emit());
}

TEST_CASE("preset supplies defaults regardless of key order") {
  const RunConfig a = RunConfig::Parse({"doc_hidden = 32", "preset = paper"}, "t");
  const RunConfig b = RunConfig::Parse({"preset = paper", "doc_hidden = 32"}, "t");
  CHECK(a == b);
  CHECK(a.encoder.doc_layers == 6);
  CHECK(a.encoder.doc_hidden == 32);
}

TEST_CASE("unknown, duplicate and invalid keys are rejected") {
  CHECK_THROWS_AS(RunConfig::Parse({"no_such_key = 1"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"steps = 5", "steps = 6"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"mode = magic"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"phi = 0.4"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"threshold = 1.5"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"loss_reduction = median"}, "t"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse({"not a key value line"}, "t"), ConfigError);
}
