// kws/textdoc.cc

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

#include "kws/textdoc.h"

#include <stdexcept>

#include "kws/error.h"
#include "kws/io_util.h"

namespace kws {

WrittenDocument WrittenDocument::FromWords(const std::vector<std::string>& words) {
  WrittenDocument doc;
  doc.words = words;
  for (const std::string& w : words) {
    const int begin = static_cast<int>(doc.graphemes.size());
    const std::vector<Grapheme> cps = Utf8Decode(w);
    doc.graphemes.insert(doc.graphemes.end(), cps.begin(), cps.end());
    doc.word_spans.emplace_back(begin, static_cast<int>(doc.graphemes.size()));
  }
  return doc;
}

int TextPipelineConfig::DurationOf(Grapheme original) const {
  if (!use_table) return repeat;
  auto it = duration_table.find(original);
  if (it == duration_table.end()) {
    throw DataError("no duration-table entry for grapheme '" + Utf8Encode(original) + "'");
  }
  return it->second;
}

std::vector<Grapheme> MaskDocument(const std::vector<Grapheme>& symbols,
                                   double mask_prob, Rng* rng) {
  if (mask_prob < 0.0 || mask_prob > 1.0) {
    throw std::invalid_argument("mask probability must be in [0, 1]");
  }
  std::vector<Grapheme> out(symbols);
  for (Grapheme& g : out) {
    if (rng->Bernoulli(mask_prob)) g = kMaskSymbol;
  }
  return out;
}

std::vector<Grapheme> MaskDocument(const std::vector<Grapheme>& symbols,
                                   const std::vector<bool>& mask) {
  if (mask.size() != symbols.size()) {
    throw std::invalid_argument("mask vector length does not match the document");
  }
  std::vector<Grapheme> out(symbols);
  for (size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) out[i] = kMaskSymbol;
  }
  return out;
}

std::vector<Grapheme> ExpandDurations(const std::vector<Grapheme>& masked,
                                      const std::vector<Grapheme>& original,
                                      const TextPipelineConfig& cfg,
                                      ExpansionMap* map) {
  if (masked.size() != original.size()) {
    throw std::invalid_argument("masked and original sequences differ in length");
  }
  std::vector<Grapheme> out;
  if (map != nullptr) {
    map->spans.clear();
    map->spans.reserve(masked.size());
  }
  for (size_t i = 0; i < masked.size(); ++i) {
    const int dur = cfg.DurationOf(original[i]);
    const int begin = static_cast<int>(out.size());
    out.insert(out.end(), static_cast<size_t>(dur), masked[i]);
    if (map != nullptr) map->spans.emplace_back(begin, begin + dur);
  }
  if (map != nullptr) map->expanded_length = static_cast<int>(out.size());
  return out;
}

std::vector<uint8_t> TextLabelPositions(const Query& q, const WrittenDocument& doc,
                                        const ExpansionMap& map) {
  if (map.spans.size() != doc.graphemes.size()) {
    throw std::invalid_argument("expansion map does not match the document");
  }
  std::vector<uint8_t> labels(map.expanded_length, 0);
  for (int start : FindWordMatches(doc.words, q.words)) {
    const int g_begin = doc.word_spans[start].first;
    const int g_end = doc.word_spans[start + q.words.size() - 1].second;
    const int e_begin = map.spans[g_begin].first;
    const int e_end = map.spans[g_end - 1].second;
    for (int p = e_begin; p < e_end; ++p) labels[p] = 1;
  }
  return labels;
}

std::vector<uint8_t> DownsampleLabels(const std::vector<uint8_t>& labels, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (factor == 1) return labels;
  const int n = static_cast<int>(labels.size());
  const int out_len = (n + factor - 1) / factor;
  std::vector<uint8_t> out(out_len, 0);
  for (int j = 0; j < out_len; ++j) {
    const int begin = j * factor;
    const int end = std::min(n, begin + factor);
    int ones = 0;
    for (int p = begin; p < end; ++p) ones += labels[p];
    out[j] = (2 * ones >= end - begin) ? 1 : 0;
  }
  return out;
}

std::vector<uint8_t> MakeTextLabels(const Query& q, const WrittenDocument& doc,
                                    const ExpansionMap& map, int downsample_factor) {
  return DownsampleLabels(TextLabelPositions(q, doc, map), downsample_factor);
}

std::vector<std::pair<double, double>> OccurrenceSpans(const Query& q,
                                                       const Alignment& alignment,
                                                       const Transcript& transcript) {
  if (alignment.entries.size() != transcript.words.size()) {
    throw DataError("alignment for " + transcript.doc_id +
                    " does not cover the transcript");
  }
  std::vector<std::pair<double, double>> spans;
  for (int start : FindWordMatches(transcript.words, q.words)) {
    const AlignmentEntry& first = alignment.entries[start];
    const AlignmentEntry& last = alignment.entries[start + q.words.size() - 1];
    spans.emplace_back(first.start_sec, last.start_sec + last.dur_sec);
  }
  return spans;
}

std::vector<uint8_t> MakeSpeechLabels(const Query& q, const Alignment& alignment,
                                      const Transcript& transcript,
                                      double output_frame_shift_sec,
                                      int num_output_frames) {
  const auto spans = OccurrenceSpans(q, alignment, transcript);
  std::vector<uint8_t> labels(num_output_frames, 0);
  for (int n = 0; n < num_output_frames; ++n) {
    const double center = (n + 0.5) * output_frame_shift_sec;
    for (const auto& [s, e] : spans) {
      if (center >= s && center < e) {
        labels[n] = 1;
        break;
      }
    }
  }
  return labels;
}

std::map<Grapheme, int> LoadDurationTable(const std::string& path) {
  std::map<Grapheme, int> table;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 2) {
      throw DataError("malformed duration-table line in " + path + ": '" + line + "'");
    }
    const std::vector<Grapheme> cps = Utf8Decode(fields[0]);
    if (cps.size() != 1) {
      throw DataError("duration-table key is not a single grapheme: '" + fields[0] + "'");
    }
    const int dur = static_cast<int>(ParseInt(fields[1], "duration"));
    if (dur < 1) throw DataError("duration must be >= 1 in " + path);
    table[cps[0]] = dur;
  }
  return table;
}

}  // namespace kws
