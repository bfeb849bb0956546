// kws/search.cc

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

#include "kws/search.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "kws/error.h"
#include "kws/io_util.h"

namespace kws {

namespace {
// Minimum hit duration per query letter, in seconds.
constexpr double kMinSecondsPerLetter = 0.04;
}  // namespace

double ArchiveIndex::TotalTrialDurationSec() const {
  double total = 0.0;
  for (double d : source_duration_sec) total += d;
  return total;
}

ArchiveIndex EncodeArchive(const Dataset& dataset, const KwsModel<float>& model) {
  if (dataset.features.size() != dataset.records.size()) {
    throw DataError("dataset features are not loaded");
  }
  ArchiveIndex index;
  const int n = static_cast<int>(dataset.records.size());
  index.doc_ids.resize(n);
  index.encodings.resize(n);
  index.source_duration_sec.resize(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const FeatureMatrix& feats = dataset.features[i];
    FeatureMatrix enc;
    enc.frame_shift_ms = static_cast<float>(
        model.Config().OutputFrameShiftMs(feats.frame_shift_ms));
    enc.frames = model.EncodeSpeech(feats.frames);
    index.encodings[i] = std::move(enc);
    index.doc_ids[i] = dataset.records[i].doc_id;
    index.source_duration_sec[i] = dataset.records[i].DurationSec();
  }
  for (int i = 0; i < n; ++i) index.doc_index[index.doc_ids[i]] = i;
  return index;
}

void WriteIndex(const ArchiveIndex& index, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string manifest;
  for (size_t i = 0; i < index.doc_ids.size(); ++i) {
    const std::string rel = index.doc_ids[i] + ".jfea";
    WriteFeatures(index.encodings[i], dir + "/" + rel);
    manifest += index.doc_ids[i];
    manifest += '\t';
    manifest += rel;
    manifest += '\t';
    manifest += std::to_string(index.encodings[i].NumFrames());
    manifest += '\t';
    manifest += std::to_string(index.encodings[i].Dim());
    manifest += '\t';
    manifest += FormatFixed(index.encodings[i].frame_shift_ms, 3);
    manifest += '\t';
    manifest += FormatFixed(index.source_duration_sec[i], 4);
    manifest += '\n';
  }
  WriteFileAtomic(dir + "/index.tsv", manifest);
}

ArchiveIndex ReadIndex(const std::string& dir) {
  ArchiveIndex index;
  for (const std::string& line : ReadLines(dir + "/index.tsv")) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 6) {
      throw DataError("malformed index line in " + dir + ": '" + line + "'");
    }
    FeatureMatrix enc = ReadFeatures(dir + "/" + fields[1]);
    if (enc.NumFrames() != ParseInt(fields[2], "num_frames") ||
        enc.Dim() != ParseInt(fields[3], "dim")) {
      throw DataError("index entry for " + fields[0] + " does not match its file");
    }
    index.doc_index[fields[0]] = static_cast<int>(index.doc_ids.size());
    index.doc_ids.push_back(fields[0]);
    index.encodings.push_back(std::move(enc));
    index.source_duration_sec.push_back(ParseDouble(fields[5], "source_duration_sec"));
  }
  return index;
}

std::vector<Hit> ExtractHits(const std::vector<float>& scores, double threshold,
                             int query_letters, double frame_shift_sec) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  std::vector<Hit> hits;
  const int n = static_cast<int>(scores.size());
  const double min_duration = kMinSecondsPerLetter * query_letters;
  int run_begin = -1;
  for (int i = 0; i <= n; ++i) {
    const bool above = (i < n) && (scores[i] > threshold);
    if (above && run_begin < 0) run_begin = i;
    if (!above && run_begin >= 0) {
      const int run_end = i;  // [run_begin, run_end)
      const double t_start = run_begin * frame_shift_sec;
      const double t_end = run_end * frame_shift_sec;
      if (t_end - t_start >= min_duration) {
        std::vector<float> vals(scores.begin() + run_begin, scores.begin() + run_end);
        std::sort(vals.begin(), vals.end());
        const size_t m = vals.size();
        const double median =
            (m % 2 == 1) ? vals[m / 2]
                         : 0.5 * (static_cast<double>(vals[m / 2 - 1]) + vals[m / 2]);
        Hit hit;
        hit.t_start_sec = t_start;
        hit.t_end_sec = t_end;
        hit.score = median;
        hits.push_back(hit);
      }
      run_begin = -1;
    }
  }
  return hits;
}

std::vector<Hit> SearchArchive(const Query& q, const std::string& kwid,
                               const ArchiveIndex& index, const KwsModel<float>& model,
                               double threshold) {
  const std::vector<int> ids = model.Vocab().Encode(q.graphemes);
  const Matrix<float> e = model.EncodeQuery(ids);
  const int n = static_cast<int>(index.encodings.size());
  std::vector<std::vector<Hit>> per_doc(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const FeatureMatrix& enc = index.encodings[i];
    const std::vector<float> z = ScoreFrames(enc.frames, e);
    std::vector<Hit> hits = ExtractHits(z, threshold, q.NumLetters(),
                                        enc.frame_shift_ms / 1000.0);
    for (Hit& h : hits) {
      h.kwid = kwid;
      h.doc_id = index.doc_ids[i];
    }
    per_doc[i] = std::move(hits);
  }
  std::vector<Hit> all;
  for (auto& hits : per_doc) {
    all.insert(all.end(), hits.begin(), hits.end());
  }
  std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    return a.t_start_sec < b.t_start_sec;
  });
  return all;
}

void KstNormalize(std::vector<Hit>* hits, double t_trials_sec, double beta) {
  if (hits->empty()) return;
  double n_hat = 0.0;
  for (const Hit& h : *hits) n_hat += h.score;
  double thr = beta * n_hat / (t_trials_sec + (beta - 1.0) * n_hat);
  // The expected-count estimate can exceed the trial mass on degenerate
  // archives; keep the threshold a usable probability.
  thr = std::min(std::max(thr, 1e-12), 1.0 - 1e-12);
  const double exponent = std::log(0.5) / std::log(thr);
  for (Hit& h : *hits) {
    h.score = std::pow(h.score, exponent);
    h.decision = h.score >= 0.5;
  }
}

void WriteHits(const std::vector<Hit>& hits, const std::string& path) {
  std::string out;
  for (const Hit& h : hits) {
    out += h.kwid;
    out += '\t';
    out += h.doc_id;
    out += '\t';
    out += FormatFixed(h.t_start_sec, 4);
    out += '\t';
    out += FormatFixed(h.t_end_sec, 4);
    out += '\t';
    out += FormatFixed(h.score, 6);
    out += '\t';
    out += h.decision ? 'Y' : 'N';
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

std::vector<Hit> ReadHits(const std::string& path) {
  std::vector<Hit> hits;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 6 || (fields[5] != "Y" && fields[5] != "N")) {
      throw DataError("malformed hit line in " + path + ": '" + line + "'");
    }
    Hit h;
    h.kwid = fields[0];
    h.doc_id = fields[1];
    h.t_start_sec = ParseDouble(fields[2], "t_start");
    h.t_end_sec = ParseDouble(fields[3], "t_end");
    h.score = ParseDouble(fields[4], "score");
    h.decision = fields[5] == "Y";
    hits.push_back(std::move(h));
  }
  return hits;
}

}  // namespace kws
