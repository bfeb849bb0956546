// kws/evaldet.h

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

#ifndef KWS_EVALDET_H_
#define KWS_EVALDET_H_

#include <map>
#include <string>
#include <vector>

#include "kws/corpus.h"
#include "kws/search.h"

namespace kws {

// Term-weighted-value scoring: hits are aligned one-to-one to reference
// occurrences, then TWV(zeta) = 1 - mean_q(P_miss + beta * P_FA) over the
// queries with at least one reference occurrence, reported in percent.
// False-alarm probability uses one-second trials:
// P_FA = N_FA / (T_trials - N_true).

struct ReferenceOccurrence {
  std::string kwid;
  std::string doc_id;
  double t_start_sec = 0.0;
  double t_end_sec = 0.0;
};

// Every consecutive-word match of each keyword, spanning first word start
// to last word end.
std::vector<ReferenceOccurrence> BuildReference(
    const std::vector<Transcript>& transcripts,
    const std::vector<Alignment>& alignments,
    const std::vector<std::pair<std::string, Query>>& keywords);

struct LabeledHit {
  Hit hit;
  bool correct = false;  // matched to a reference occurrence
};

// Greedy one-to-one matching per (kwid, doc): hits in descending score order
// claim the unmatched reference with the nearest midpoint within
// midpoint_tolerance_sec. Unmatched hits are false alarms.
std::vector<LabeledHit> AlignHits(const std::vector<Hit>& hits,
                                  const std::vector<ReferenceOccurrence>& refs,
                                  double midpoint_tolerance_sec = 0.5);

struct TwvQueryStat {
  int n_true = 0;
  int n_correct = 0;
  int n_fa = 0;
  double p_miss = 0.0;
  double p_fa = 0.0;
};

struct TwvReport {
  double twv_percent = 0.0;
  double beta = 999.9;
  double zeta = 0.5;
  double t_trials_sec = 0.0;
  int queries_scored = 0;  // queries with n_true > 0
  std::map<std::string, TwvQueryStat> per_query;
};

// Counts hits with score >= zeta. `keyword_ids` fixes the query set; those
// with zero reference occurrences are excluded from the average. Throws
// DataError when every query has zero occurrences.
TwvReport Twv(const std::vector<LabeledHit>& hits,
              const std::vector<ReferenceOccurrence>& refs,
              const std::vector<std::string>& keyword_ids, double beta,
              double zeta, double t_trials_sec);

// Sweeps zeta over the distinct hit scores plus {0, 1}; returns the best
// TWV (percent) and the smallest zeta attaining it.
std::pair<double, double> Mtwv(const std::vector<LabeledHit>& hits,
                               const std::vector<ReferenceOccurrence>& refs,
                               const std::vector<std::string>& keyword_ids,
                               double beta, double t_trials_sec);

// TWV at a threshold transferred from the dev set.
double Atwv(const std::vector<LabeledHit>& hits,
            const std::vector<ReferenceOccurrence>& refs,
            const std::vector<std::string>& keyword_ids, double beta,
            double zeta_dev, double t_trials_sec);

struct DetPoint {
  double zeta = 0.0;
  double p_fa = 0.0;
  double p_miss = 0.0;
};

// Query-averaged (P_FA, P_miss) at each threshold; P_miss is nondecreasing
// and P_FA nonincreasing in zeta.
std::vector<DetPoint> DetPoints(const std::vector<LabeledHit>& hits,
                                const std::vector<ReferenceOccurrence>& refs,
                                const std::vector<std::string>& keyword_ids,
                                const std::vector<double>& thresholds,
                                double t_trials_sec);

// det data file: zeta TAB p_fa TAB p_miss.
void WriteDetData(const std::vector<DetPoint>& points, const std::string& path);
// Minimal standalone SVG rendering of the curve.
void WriteDetSvg(const std::vector<DetPoint>& points, const std::string& path);

// Tab-separated per-query block plus an aggregate line.
std::string FormatTwvReport(const TwvReport& report);

}  // namespace kws

#endif  // KWS_EVALDET_H_
