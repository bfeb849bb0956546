// kws/run_config.h

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

#ifndef KWS_RUN_CONFIG_H_
#define KWS_RUN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "kws/model.h"

namespace kws {

// UTF-8 'key = value' run configuration. Unknown keys are rejected; every
// key has a documented default; Emit() produces a canonical form that
// parses back to the same configuration (parse -> emit -> parse fixpoint).
// The 'preset' key (desk | paper) supplies encoder-size defaults which
// explicit keys then override, wherever they appear in the file.
struct RunConfig {
  std::string mode = "baseline";  // baseline | joint
  std::string preset = "desk";    // desk | paper

  EncoderConfig encoder = EncoderConfig::Desk();

  std::string paired_dir;
  std::string unpaired_text;
  std::string dev_dir;
  std::string dev_keywords;

  int64_t steps = 1000;
  uint64_t seed = 0;
  int queries_per_step = 16;     // L
  int docs_per_query_audio = 4;  // M(audio)
  int docs_per_query_text = 4;   // M(text)

  double phi = 0.7;
  double lambda = 5.0;

  double mask_prob = 0.3;         // pi
  int repeat = 2;                 // rho
  std::string duration_table;    // path; non-empty selects per-grapheme durations

  double learning_rate = 1e-3;
  // Exponential decay: lr(step) = learning_rate * 2^(-step/lr_halflife);
  // 0 keeps the rate constant.
  int64_t lr_halflife = 0;
  double clip_norm = 5.0;
  std::string loss_reduction = "mean";  // mean | sum

  int64_t checkpoint_interval = 100;
  int64_t dev_interval = 0;  // 0 disables periodic dev evaluation

  double threshold = 0.5;  // detection threshold for hit extraction
  double kst_beta = 999.9;

  std::string resume;   // checkpoint path to continue from
  std::string out_dir = "run";

  static RunConfig Parse(const std::vector<std::string>& lines,
                         const std::string& origin);
  static RunConfig Load(const std::string& path);
  std::string Emit() const;
  void Validate() const;

  bool Joint() const { return mode == "joint"; }

  bool operator==(const RunConfig& o) const;
};

}  // namespace kws

#endif  // KWS_RUN_CONFIG_H_
