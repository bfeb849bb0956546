// kws/corpus.cc

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

#include "kws/corpus.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "kws/error.h"
#include "kws/io_util.h"

namespace kws {

Query Query::FromWords(const std::vector<std::string>& words) {
  if (words.empty()) throw std::invalid_argument("query has no words");
  Query q;
  q.words = words;
  for (const std::string& w : words) {
    if (w.empty()) throw std::invalid_argument("query contains an empty word");
    const std::vector<Grapheme> cps = Utf8Decode(w);
    q.graphemes.insert(q.graphemes.end(), cps.begin(), cps.end());
  }
  return q;
}

Query Query::FromPhrase(const std::string& phrase) {
  return FromWords(SplitWhitespace(phrase));
}

const char* QueryCategoryName(QueryCategory c) {
  switch (c) {
    case QueryCategory::kInIn: return "II";
    case QueryCategory::kOutIn: return "OI";
    case QueryCategory::kOutOut: return "OO";
  }
  return "?";
}

QueryCategory CategorizeQuery(const Query& q,
                              const std::set<std::string>& paired_vocab,
                              const std::set<std::string>& unpaired_vocab) {
  if (q.words.empty()) throw std::invalid_argument("cannot categorize an empty query");
  bool all_unpaired = true;
  bool all_paired = true;
  for (const std::string& w : q.words) {
    if (!unpaired_vocab.count(w)) all_unpaired = false;
    if (!paired_vocab.count(w)) all_paired = false;
  }
  if (!all_unpaired) return QueryCategory::kOutOut;
  return all_paired ? QueryCategory::kInIn : QueryCategory::kOutIn;
}

namespace {
std::string JoinWords(const std::vector<std::string>& words, size_t begin, size_t end) {
  std::string key;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) key += ' ';
    key += words[i];
  }
  return key;
}
}  // namespace

QueryInventory QueryInventory::Build(const std::vector<Transcript>& transcripts,
                                     int n_max) {
  if (transcripts.empty()) {
    throw std::invalid_argument("cannot build an inventory from zero transcripts");
  }
  QueryInventory inv;
  for (size_t d = 0; d < transcripts.size(); ++d) {
    const std::vector<std::string>& words = transcripts[d].words;
    for (size_t begin = 0; begin < words.size(); ++begin) {
      for (int n = 1; n <= n_max && begin + n <= words.size(); ++n) {
        const size_t end = begin + n;
        const std::string key = JoinWords(words, begin, end);
        auto it = inv.index_.find(key);
        size_t entry_idx;
        if (it == inv.index_.end()) {
          entry_idx = inv.entries_.size();
          inv.index_[key] = entry_idx;
          InventoryEntry entry;
          entry.words.assign(words.begin() + begin, words.begin() + end);
          inv.entries_.push_back(std::move(entry));
        } else {
          entry_idx = it->second;
        }
        Occurrence occ;
        occ.doc_index = static_cast<int>(d);
        occ.word_begin = static_cast<int>(begin);
        occ.word_end = static_cast<int>(end);
        inv.flat_.emplace_back(entry_idx, inv.entries_[entry_idx].occurrences.size());
        inv.entries_[entry_idx].occurrences.push_back(occ);
      }
    }
  }
  return inv;
}

const InventoryEntry* QueryInventory::Find(const std::vector<std::string>& words) const {
  auto it = index_.find(JoinWords(words, 0, words.size()));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::vector<int> FindWordMatches(const std::vector<std::string>& doc_words,
                                 const std::vector<std::string>& query_words) {
  std::vector<int> starts;
  if (query_words.empty() || doc_words.size() < query_words.size()) return starts;
  for (size_t i = 0; i + query_words.size() <= doc_words.size(); ++i) {
    bool match = true;
    for (size_t k = 0; k < query_words.size(); ++k) {
      if (doc_words[i + k] != query_words[k]) {
        match = false;
        break;
      }
    }
    if (match) starts.push_back(static_cast<int>(i));
  }
  return starts;
}

// ------------------------------- file formats -------------------------------

std::vector<Transcript> LoadTranscripts(const std::string& path) {
  std::vector<Transcript> out;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 2) {
      throw DataError("malformed transcript line in " + path + ": '" + line + "'");
    }
    Transcript t;
    t.doc_id = fields[0];
    t.words = SplitWhitespace(fields[1]);
    if (t.words.empty()) {
      throw DataError("transcript for " + t.doc_id + " has no words");
    }
    out.push_back(std::move(t));
  }
  return out;
}

void SaveTranscripts(const std::vector<Transcript>& transcripts,
                     const std::string& path) {
  std::string content;
  for (const Transcript& t : transcripts) {
    content += t.doc_id;
    content += '\t';
    for (size_t i = 0; i < t.words.size(); ++i) {
      if (i > 0) content += ' ';
      content += t.words[i];
    }
    content += '\n';
  }
  WriteFileAtomic(path, content);
}

std::vector<Alignment> LoadAlignments(const std::string& path) {
  std::map<std::string, size_t> by_doc;
  std::vector<Alignment> out;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 4) {
      throw DataError("malformed alignment line in " + path + ": '" + line + "'");
    }
    AlignmentEntry e;
    e.word_index = static_cast<int>(ParseInt(fields[1], "word_index"));
    e.start_sec = ParseDouble(fields[2], "start_sec");
    e.dur_sec = ParseDouble(fields[3], "dur_sec");
    if (e.dur_sec <= 0.0) {
      throw DataError("non-positive word duration in " + path + ": '" + line + "'");
    }
    auto it = by_doc.find(fields[0]);
    if (it == by_doc.end()) {
      by_doc[fields[0]] = out.size();
      out.push_back(Alignment{fields[0], {e}});
    } else {
      out[it->second].entries.push_back(e);
    }
  }
  for (Alignment& a : out) {
    std::stable_sort(a.entries.begin(), a.entries.end(),
                     [](const AlignmentEntry& x, const AlignmentEntry& y) {
                       return x.start_sec < y.start_sec;
                     });
  }
  return out;
}

void SaveAlignments(const std::vector<Alignment>& alignments, const std::string& path) {
  std::string content;
  for (const Alignment& a : alignments) {
    for (const AlignmentEntry& e : a.entries) {
      content += a.doc_id;
      content += '\t';
      content += std::to_string(e.word_index);
      content += '\t';
      content += FormatFixed(e.start_sec, 4);
      content += '\t';
      content += FormatFixed(e.dur_sec, 4);
      content += '\n';
    }
  }
  WriteFileAtomic(path, content);
}

std::vector<ManifestRecord> LoadManifest(const std::string& path) {
  std::vector<ManifestRecord> out;
  std::set<std::string> seen;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 5) {
      throw DataError("malformed manifest line in " + path + ": '" + line + "'");
    }
    ManifestRecord r;
    r.doc_id = fields[0];
    r.feature_path = fields[1];
    r.num_frames = static_cast<int>(ParseInt(fields[2], "num_frames"));
    r.dim = static_cast<int>(ParseInt(fields[3], "dim"));
    r.frame_shift_ms = ParseDouble(fields[4], "frame_shift_ms");
    if (r.num_frames < 1 || r.dim < 1 || r.frame_shift_ms <= 0.0) {
      throw DataError("invalid manifest record for " + r.doc_id);
    }
    if (!seen.insert(r.doc_id).second) {
      throw DataError("duplicate doc_id " + r.doc_id + " in " + path);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void SaveManifest(const std::vector<ManifestRecord>& records, const std::string& path) {
  std::string content;
  for (const ManifestRecord& r : records) {
    content += r.doc_id;
    content += '\t';
    content += r.feature_path;
    content += '\t';
    content += std::to_string(r.num_frames);
    content += '\t';
    content += std::to_string(r.dim);
    content += '\t';
    content += FormatFixed(r.frame_shift_ms, 3);
    content += '\n';
  }
  WriteFileAtomic(path, content);
}

std::vector<Grapheme> LoadGraphemeSet(const std::string& path) {
  std::vector<Grapheme> out;
  std::set<Grapheme> seen;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const std::vector<Grapheme> cps = Utf8Decode(line);
    if (cps.size() != 1) {
      throw DataError("grapheme-set line is not a single scalar value: '" + line + "'");
    }
    if (!seen.insert(cps[0]).second) {
      throw DataError("duplicate grapheme '" + line + "' in " + path);
    }
    out.push_back(cps[0]);
  }
  return out;
}

void SaveGraphemeSet(const std::vector<Grapheme>& graphemes, const std::string& path) {
  std::string content;
  for (Grapheme g : graphemes) {
    content += Utf8Encode(g);
    content += '\n';
  }
  WriteFileAtomic(path, content);
}

std::vector<std::pair<std::string, Query>> LoadKeywordList(const std::string& path) {
  std::vector<std::pair<std::string, Query>> out;
  std::set<std::string> seen;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 2) {
      throw DataError("malformed keyword line in " + path + ": '" + line + "'");
    }
    if (!seen.insert(fields[0]).second) {
      throw DataError("duplicate keyword id " + fields[0] + " in " + path);
    }
    out.emplace_back(fields[0], Query::FromPhrase(fields[1]));
  }
  return out;
}

std::set<std::string> TranscriptVocabulary(const std::vector<Transcript>& transcripts) {
  std::set<std::string> vocab;
  for (const Transcript& t : transcripts) {
    vocab.insert(t.words.begin(), t.words.end());
  }
  return vocab;
}

// --------------------------------- dataset ---------------------------------

Dataset Dataset::Load(const std::string& dir) {
  Dataset ds;
  ds.dir = dir;
  ds.records = LoadManifest(dir + "/manifest.tsv");
  const std::vector<Transcript> transcripts = LoadTranscripts(dir + "/transcripts.tsv");
  const std::vector<Alignment> alignments = LoadAlignments(dir + "/alignments.tsv");
  ds.graphemes = LoadGraphemeSet(dir + "/graphemes.txt");

  std::map<std::string, const Transcript*> trans_by_id;
  for (const Transcript& t : transcripts) trans_by_id[t.doc_id] = &t;
  std::map<std::string, const Alignment*> align_by_id;
  for (const Alignment& a : alignments) align_by_id[a.doc_id] = &a;

  const std::set<Grapheme> grapheme_set(ds.graphemes.begin(), ds.graphemes.end());
  for (size_t i = 0; i < ds.records.size(); ++i) {
    const ManifestRecord& r = ds.records[i];
    auto t = trans_by_id.find(r.doc_id);
    if (t == trans_by_id.end()) throw DataError("no transcript for " + r.doc_id);
    auto a = align_by_id.find(r.doc_id);
    if (a == align_by_id.end()) throw DataError("no alignment for " + r.doc_id);
    if (a->second->entries.size() != t->second->words.size()) {
      throw DataError("alignment for " + r.doc_id + " has " +
                      std::to_string(a->second->entries.size()) + " entries for " +
                      std::to_string(t->second->words.size()) + " words");
    }
    for (const std::string& w : t->second->words) {
      for (Grapheme g : Utf8Decode(w)) {
        if (!grapheme_set.count(g)) {
          throw DataError("transcript word '" + w + "' uses grapheme '" +
                          Utf8Encode(g) + "' absent from the declared set");
        }
      }
    }
    ds.transcripts.push_back(*t->second);
    ds.alignments.push_back(*a->second);
    ds.doc_index[r.doc_id] = static_cast<int>(i);
  }
  return ds;
}

void Dataset::LoadFeatures() {
  if (!features.empty()) return;
  features.reserve(records.size());
  for (const ManifestRecord& r : records) {
    FeatureMatrix m = ReadFeatures(dir + "/" + r.feature_path);
    if (m.NumFrames() != r.num_frames || m.Dim() != r.dim) {
      throw DataError("feature file for " + r.doc_id + " does not match its manifest record");
    }
    features.push_back(std::move(m));
  }
}

double Dataset::TotalDurationSec() const {
  double total = 0.0;
  for (const ManifestRecord& r : records) total += r.DurationSec();
  return total;
}

std::set<std::string> Dataset::Vocabulary() const {
  return TranscriptVocabulary(transcripts);
}

}  // namespace kws
