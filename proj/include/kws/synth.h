// kws/synth.h

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

#ifndef KWS_SYNTH_H_
#define KWS_SYNTH_H_

#include <map>
#include <string>
#include <vector>

#include "kws/corpus.h"
#include "kws/utf8.h"

namespace kws {

// Deterministic synthetic corpus generation. Each grapheme gets a fixed
// random unit-norm prototype vector; an utterance is the concatenation of
// per-grapheme prototype blocks plus a per-document speaker offset and
// per-frame Gaussian noise. Alignments are exact by construction.
//
// Spec file: '#' comments, 'key = value' scalars (dim, frame_shift_ms,
// noise_std, speaker_offset_std, seed), one 'grapheme <g> <duration_frames>'
// line per grapheme and one 'sentence <w1> <w2> ...' line per utterance.

struct GraphemePrototype {
  Grapheme grapheme = 0;
  int duration_frames = 1;
  std::vector<float> prototype;  // unit-norm, dim values
};

struct SynthSpec {
  int dim = 0;
  double frame_shift_ms = 0.0;
  double noise_std = 0.0;
  double speaker_offset_std = 0.0;
  uint64_t seed = 0;
  // Prototypes derive from this seed (defaults to `seed`); corpora meant to
  // share one acoustic space (train/dev/eval splits) share it.
  uint64_t prototype_seed = 0;
  std::vector<GraphemePrototype> prototypes;  // declaration order
  std::map<Grapheme, size_t> prototype_index;
  std::vector<std::vector<std::string>> sentences;

  std::vector<std::string> Vocabulary() const;

  // Parses and validates, then fills the prototype vectors from the seed.
  // Throws ConfigError on an invalid spec, including any sentence grapheme
  // that has no prototype line.
  static SynthSpec Load(const std::string& path);
  static SynthSpec Parse(const std::vector<std::string>& lines,
                         const std::string& origin);
};

struct SynthOutput {
  std::vector<ManifestRecord> records;
  std::vector<FeatureMatrix> features;  // index-aligned with records
  std::vector<Transcript> transcripts;
  std::vector<Alignment> alignments;
  std::vector<Grapheme> graphemes;
  std::vector<std::pair<Grapheme, int>> durations;  // exact per-grapheme frames
};

SynthOutput SynthesizeCorpus(const SynthSpec& spec);

// Writes manifest.tsv, transcripts.tsv, alignments.tsv, graphemes.txt,
// durations.tsv and feats/*.jfea under out_dir.
void WriteSynthOutput(const SynthOutput& out, const std::string& out_dir);

}  // namespace kws

#endif  // KWS_SYNTH_H_
