// kws/corpus.h

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

#ifndef KWS_CORPUS_H_
#define KWS_CORPUS_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kws/feature_io.h"
#include "kws/utf8.h"

namespace kws {

// Dataset model and line-oriented file formats:
//   manifest.tsv:    doc_id <TAB> feature_path <TAB> num_frames <TAB> dim <TAB> frame_shift_ms
//   transcripts.tsv: doc_id <TAB> w1 w2 ...
//   alignments.tsv:  doc_id <TAB> word_index <TAB> start_sec <TAB> dur_sec
//   graphemes.txt:   one grapheme per line (declares the grapheme set)
//   keyword list:    kwid <TAB> phrase
// Words are whitespace tokens; a grapheme is one Unicode scalar value.

struct Transcript {
  std::string doc_id;
  std::vector<std::string> words;
};

struct AlignmentEntry {
  int word_index = 0;
  double start_sec = 0.0;
  double dur_sec = 0.0;
};

struct Alignment {
  std::string doc_id;
  std::vector<AlignmentEntry> entries;  // ordered by start_sec, 1:1 with words
};

// A written query: a word n-gram plus its flattened grapheme sequence.
struct Query {
  std::vector<std::string> words;
  std::vector<Grapheme> graphemes;  // concatenation of the words, no separator

  // Whitespace-splits a phrase. Throws std::invalid_argument when the
  // phrase contains no words.
  static Query FromPhrase(const std::string& phrase);
  static Query FromWords(const std::vector<std::string>& words);

  int NumLetters() const { return static_cast<int>(graphemes.size()); }
};

enum class QueryCategory { kInIn, kOutIn, kOutOut };
const char* QueryCategoryName(QueryCategory c);

// II: every word in both vocabularies. OI: every word in the unpaired
// vocabulary but at least one missing from the paired one. OO: at least
// one word missing from the unpaired vocabulary.
QueryCategory CategorizeQuery(const Query& q,
                              const std::set<std::string>& paired_vocab,
                              const std::set<std::string>& unpaired_vocab);

// One concrete location of a query n-gram: words [word_begin, word_end).
struct Occurrence {
  int doc_index = 0;
  int word_begin = 0;
  int word_end = 0;
};

struct InventoryEntry {
  std::vector<std::string> words;
  std::vector<Occurrence> occurrences;

  size_t Count() const { return occurrences.size(); }
};

// Multiset of all word 1..n-grams of a transcript collection, each with its
// occurrence records. Occurrences are kept in a deterministic flat order so
// sampling an occurrence uniformly makes query probability proportional to
// occurrence count.
class QueryInventory {
 public:
  static QueryInventory Build(const std::vector<Transcript>& transcripts,
                              int n_max = 3);

  size_t NumEntries() const { return entries_.size(); }
  const InventoryEntry& Entry(size_t i) const { return entries_[i]; }
  const InventoryEntry* Find(const std::vector<std::string>& words) const;

  size_t TotalOccurrences() const { return flat_.size(); }
  // flat_idx in [0, TotalOccurrences()): (entry index, occurrence index).
  std::pair<size_t, size_t> OccurrenceAt(size_t flat_idx) const { return flat_[flat_idx]; }

 private:
  std::vector<InventoryEntry> entries_;
  std::map<std::string, size_t> index_;             // joined words -> entry
  std::vector<std::pair<size_t, size_t>> flat_;
};

// Start indices of every consecutive-word match of `query_words` in
// `doc_words` (overlapping matches all count).
std::vector<int> FindWordMatches(const std::vector<std::string>& doc_words,
                                 const std::vector<std::string>& query_words);

struct ManifestRecord {
  std::string doc_id;
  std::string feature_path;  // relative to the dataset directory
  int num_frames = 0;
  int dim = 0;
  double frame_shift_ms = 0.0;

  double DurationSec() const { return num_frames * frame_shift_ms / 1000.0; }
};

// A dataset directory: manifest + transcripts + alignments + grapheme set.
// Immutable once loaded; features are read on demand into `features`.
struct Dataset {
  std::string dir;
  std::vector<ManifestRecord> records;
  std::vector<Transcript> transcripts;  // index-aligned with records
  std::vector<Alignment> alignments;    // index-aligned with records
  std::vector<Grapheme> graphemes;      // declared set, in file order
  std::map<std::string, int> doc_index;
  std::vector<FeatureMatrix> features;  // filled by LoadFeatures()

  static Dataset Load(const std::string& dir);
  void LoadFeatures();

  size_t NumDocs() const { return records.size(); }
  double TotalDurationSec() const;
  std::set<std::string> Vocabulary() const;
};

std::vector<Transcript> LoadTranscripts(const std::string& path);
void SaveTranscripts(const std::vector<Transcript>& transcripts,
                     const std::string& path);

std::vector<Alignment> LoadAlignments(const std::string& path);
void SaveAlignments(const std::vector<Alignment>& alignments,
                    const std::string& path);

std::vector<ManifestRecord> LoadManifest(const std::string& path);
void SaveManifest(const std::vector<ManifestRecord>& records,
                  const std::string& path);

std::vector<Grapheme> LoadGraphemeSet(const std::string& path);
void SaveGraphemeSet(const std::vector<Grapheme>& graphemes,
                     const std::string& path);

std::vector<std::pair<std::string, Query>> LoadKeywordList(const std::string& path);

// Vocabulary (set of distinct words) of a transcript collection.
std::set<std::string> TranscriptVocabulary(const std::vector<Transcript>& transcripts);

}  // namespace kws

#endif  // KWS_CORPUS_H_
