// kws/textdoc.h

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

#ifndef KWS_TEXTDOC_H_
#define KWS_TEXTDOC_H_

#include <map>
#include <string>
#include <vector>

#include "kws/corpus.h"
#include "kws/rng.h"
#include "kws/utf8.h"

namespace kws {

// Written-document pipeline: per-symbol masking, duration expansion by
// repetition, and frame-level 0/1 label generation for both modalities.

// The mask replaces symbols in written documents. Grapheme sets that
// contain '_' are rejected at vocabulary construction.
inline constexpr Grapheme kMaskSymbol = U'_';

// A sentence as the text pipeline sees it: words concatenated into one
// grapheme sequence (no separator symbol), with word boundaries kept as
// side metadata for label generation.
struct WrittenDocument {
  std::vector<std::string> words;
  std::vector<Grapheme> graphemes;
  std::vector<std::pair<int, int>> word_spans;  // [begin, end) grapheme offsets

  static WrittenDocument FromWords(const std::vector<std::string>& words);
};

struct TextPipelineConfig {
  double mask_prob = 0.3;                    // pi
  int repeat = 2;                            // rho, used when !use_table
  bool use_table = false;                    // per-grapheme duration mode
  std::map<Grapheme, int> duration_table;

  int DurationOf(Grapheme original) const;
};

// Each symbol is independently replaced by the mask with probability pi.
std::vector<Grapheme> MaskDocument(const std::vector<Grapheme>& symbols,
                                   double mask_prob, Rng* rng);
// Deterministic variant: mask exactly the flagged positions.
std::vector<Grapheme> MaskDocument(const std::vector<Grapheme>& symbols,
                                   const std::vector<bool>& mask);

// Maps original symbol positions to their spans in the expanded sequence.
struct ExpansionMap {
  std::vector<std::pair<int, int>> spans;  // per original position, [begin, end)
  int expanded_length = 0;
};

// Repeats symbol i DurationOf(original[i]) times. In table mode the masked
// sequence still uses the durations of the underlying original symbols.
std::vector<Grapheme> ExpandDurations(const std::vector<Grapheme>& masked,
                                      const std::vector<Grapheme>& original,
                                      const TextPipelineConfig& cfg,
                                      ExpansionMap* map);

// Labels over expanded symbol positions: 1 across the expanded span of every
// consecutive-word match of the query, 0 elsewhere. Masking never changes
// these labels; they derive from the unmasked word structure.
std::vector<uint8_t> TextLabelPositions(const Query& q, const WrittenDocument& doc,
                                        const ExpansionMap& map);

// Majority vote over the `factor` positions covered by each output frame;
// ties count as 1.
std::vector<uint8_t> DownsampleLabels(const std::vector<uint8_t>& labels, int factor);

std::vector<uint8_t> MakeTextLabels(const Query& q, const WrittenDocument& doc,
                                    const ExpansionMap& map, int downsample_factor);

// Speech labels: output frame n (center time (n + 0.5) * shift) is 1 iff the
// center lies inside any occurrence span [first word start, last word end).
std::vector<uint8_t> MakeSpeechLabels(const Query& q, const Alignment& alignment,
                                      const Transcript& transcript,
                                      double output_frame_shift_sec, int num_output_frames);

// Occurrence spans in seconds for consecutive-word matches of the query.
std::vector<std::pair<double, double>> OccurrenceSpans(const Query& q,
                                                       const Alignment& alignment,
                                                       const Transcript& transcript);

// durations.tsv: grapheme <TAB> mean_duration_frames.
std::map<Grapheme, int> LoadDurationTable(const std::string& path);

}  // namespace kws

#endif  // KWS_TEXTDOC_H_
