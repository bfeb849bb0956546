// kws/search.h

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

#ifndef KWS_SEARCH_H_
#define KWS_SEARCH_H_

#include <string>
#include <vector>

#include "kws/corpus.h"
#include "kws/model.h"

namespace kws {

// Frame-level inner-product search over persisted document encodings:
// islands of frames scoring above the threshold become hits, scored by
// their median frame probability and filtered by a 40 ms/letter minimum
// duration.

// Frame n of an encoding covers [n*shift, (n+1)*shift) seconds.
struct ArchiveIndex {
  std::vector<std::string> doc_ids;
  std::vector<FeatureMatrix> encodings;  // dim = output_dim, shift = output shift
  std::vector<double> source_duration_sec;  // original audio durations
  std::map<std::string, int> doc_index;

  double TotalTrialDurationSec() const;  // T_trials
};

// Inference-mode speech encodings for every document; deterministic, and
// parallel across documents.
ArchiveIndex EncodeArchive(const Dataset& dataset, const KwsModel<float>& model);

// One feature-container file per document plus index.tsv:
//   doc_id <TAB> path <TAB> num_frames <TAB> dim <TAB> frame_shift_ms <TAB> source_duration_sec
void WriteIndex(const ArchiveIndex& index, const std::string& dir);
ArchiveIndex ReadIndex(const std::string& dir);

struct Hit {
  std::string kwid;
  std::string doc_id;
  double t_start_sec = 0.0;
  double t_end_sec = 0.0;
  double score = 0.0;
  bool decision = false;
};

// Maximal runs of frames with score > threshold; hit score is the median of
// the run (even runs: mean of the central pair); candidates shorter than
// 0.04 s per query letter are discarded. kwid/doc_id are left empty.
std::vector<Hit> ExtractHits(const std::vector<float>& scores, double threshold,
                             int query_letters, double frame_shift_sec);

// Encodes the query once and scans every document; hits ordered by
// (doc_id, t_start). Parallel across documents, identical to serial.
std::vector<Hit> SearchArchive(const Query& q, const std::string& kwid,
                               const ArchiveIndex& index, const KwsModel<float>& model,
                               double threshold);

// Keyword-specific threshold normalization over one query's hits:
//   Nhat = sum of scores, thr = beta*Nhat / (T_trials + (beta-1)*Nhat),
//   s' = s^(log 0.5 / log thr), decision = (s' >= 0.5).
// Strictly monotone per query; a no-op on an empty hit list.
void KstNormalize(std::vector<Hit>* hits, double t_trials_sec, double beta = 999.9);

// Hit file: kwid TAB doc TAB t_start TAB t_end TAB score TAB Y|N with
// 4-decimal times and 6-decimal scores.
void WriteHits(const std::vector<Hit>& hits, const std::string& path);
std::vector<Hit> ReadHits(const std::string& path);

}  // namespace kws

#endif  // KWS_SEARCH_H_
