// kws/evaldet.cc

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

#include "kws/evaldet.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kws/error.h"
#include "kws/io_util.h"
#include "kws/textdoc.h"

namespace kws {

std::vector<ReferenceOccurrence> BuildReference(
    const std::vector<Transcript>& transcripts,
    const std::vector<Alignment>& alignments,
    const std::vector<std::pair<std::string, Query>>& keywords) {
  if (transcripts.size() != alignments.size()) {
    throw DataError("transcript/alignment collections differ in size");
  }
  std::vector<ReferenceOccurrence> refs;
  for (size_t d = 0; d < transcripts.size(); ++d) {
    for (const auto& [kwid, query] : keywords) {
      for (const auto& [start, end] : OccurrenceSpans(query, alignments[d], transcripts[d])) {
        refs.push_back({kwid, transcripts[d].doc_id, start, end});
      }
    }
  }
  return refs;
}

std::vector<LabeledHit> AlignHits(const std::vector<Hit>& hits,
                                  const std::vector<ReferenceOccurrence>& refs,
                                  double midpoint_tolerance_sec) {
  // Group references by (kwid, doc) with a matched flag.
  struct RefSlot {
    double midpoint;
    bool taken = false;
  };
  std::map<std::pair<std::string, std::string>, std::vector<RefSlot>> ref_slots;
  for (const ReferenceOccurrence& r : refs) {
    ref_slots[{r.kwid, r.doc_id}].push_back(
        {0.5 * (r.t_start_sec + r.t_end_sec), false});
  }

  // Process hits in descending score; ties broken by time for determinism.
  std::vector<size_t> order(hits.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&hits](size_t a, size_t b) {
    if (hits[a].score != hits[b].score) return hits[a].score > hits[b].score;
    if (hits[a].t_start_sec != hits[b].t_start_sec) {
      return hits[a].t_start_sec < hits[b].t_start_sec;
    }
    return a < b;
  });

  std::vector<LabeledHit> labeled(hits.size());
  for (size_t i = 0; i < hits.size(); ++i) labeled[i].hit = hits[i];
  for (size_t idx : order) {
    const Hit& h = hits[idx];
    auto it = ref_slots.find({h.kwid, h.doc_id});
    if (it == ref_slots.end()) continue;
    const double mid = 0.5 * (h.t_start_sec + h.t_end_sec);
    int best = -1;
    double best_dist = midpoint_tolerance_sec;
    for (size_t r = 0; r < it->second.size(); ++r) {
      if (it->second[r].taken) continue;
      const double dist = std::fabs(it->second[r].midpoint - mid);
      if (dist <= best_dist) {
        // Strict improvement keeps the earliest reference on exact ties.
        if (best < 0 || dist < best_dist) {
          best = static_cast<int>(r);
          best_dist = dist;
        }
      }
    }
    if (best >= 0) {
      it->second[best].taken = true;
      labeled[idx].correct = true;
    }
  }
  return labeled;
}

namespace {

std::map<std::string, int> CountTrue(const std::vector<ReferenceOccurrence>& refs) {
  std::map<std::string, int> n_true;
  for (const ReferenceOccurrence& r : refs) ++n_true[r.kwid];
  return n_true;
}

}  // namespace

TwvReport Twv(const std::vector<LabeledHit>& hits,
              const std::vector<ReferenceOccurrence>& refs,
              const std::vector<std::string>& keyword_ids, double beta,
              double zeta, double t_trials_sec) {
  const std::map<std::string, int> n_true = CountTrue(refs);
  TwvReport report;
  report.beta = beta;
  report.zeta = zeta;
  report.t_trials_sec = t_trials_sec;

  std::map<std::string, TwvQueryStat> stats;
  for (const std::string& kwid : keyword_ids) {
    TwvQueryStat s;
    auto it = n_true.find(kwid);
    s.n_true = (it == n_true.end()) ? 0 : it->second;
    stats[kwid] = s;
  }
  for (const LabeledHit& lh : hits) {
    if (lh.hit.score < zeta) continue;
    auto it = stats.find(lh.hit.kwid);
    if (it == stats.end()) continue;  // hit for a keyword outside the set
    if (lh.correct) {
      ++it->second.n_correct;
    } else {
      ++it->second.n_fa;
    }
  }

  double sum_cost = 0.0;
  int scored = 0;
  for (auto& [kwid, s] : stats) {
    if (s.n_true == 0) continue;
    s.p_miss = 1.0 - static_cast<double>(s.n_correct) / s.n_true;
    const double trials = t_trials_sec - s.n_true;
    s.p_fa = trials > 0.0 ? s.n_fa / trials : 0.0;
    sum_cost += s.p_miss + beta * s.p_fa;
    ++scored;
  }
  if (scored == 0) {
    throw DataError("TWV is undefined: no keyword has a reference occurrence");
  }
  report.per_query = std::move(stats);
  report.queries_scored = scored;
  report.twv_percent = 100.0 * (1.0 - sum_cost / scored);
  return report;
}

std::pair<double, double> Mtwv(const std::vector<LabeledHit>& hits,
                               const std::vector<ReferenceOccurrence>& refs,
                               const std::vector<std::string>& keyword_ids,
                               double beta, double t_trials_sec) {
  std::set<double> sweep = {0.0, 1.0};
  for (const LabeledHit& lh : hits) sweep.insert(lh.hit.score);
  double best_twv = -1e300;
  double best_zeta = 1.0;
  for (double zeta : sweep) {
    const double twv =
        Twv(hits, refs, keyword_ids, beta, zeta, t_trials_sec).twv_percent;
    if (twv > best_twv) {
      best_twv = twv;
      best_zeta = zeta;
    }
  }
  return {best_twv, best_zeta};
}

double Atwv(const std::vector<LabeledHit>& hits,
            const std::vector<ReferenceOccurrence>& refs,
            const std::vector<std::string>& keyword_ids, double beta,
            double zeta_dev, double t_trials_sec) {
  return Twv(hits, refs, keyword_ids, beta, zeta_dev, t_trials_sec).twv_percent;
}

std::vector<DetPoint> DetPoints(const std::vector<LabeledHit>& hits,
                                const std::vector<ReferenceOccurrence>& refs,
                                const std::vector<std::string>& keyword_ids,
                                const std::vector<double>& thresholds,
                                double t_trials_sec) {
  std::vector<DetPoint> points;
  points.reserve(thresholds.size());
  for (double zeta : thresholds) {
    const TwvReport report =
        Twv(hits, refs, keyword_ids, /*beta=*/0.0, zeta, t_trials_sec);
    DetPoint p;
    p.zeta = zeta;
    double miss = 0.0, fa = 0.0;
    int n = 0;
    for (const auto& [kwid, s] : report.per_query) {
      if (s.n_true == 0) continue;
      miss += s.p_miss;
      fa += s.p_fa;
      ++n;
    }
    p.p_miss = miss / n;
    p.p_fa = fa / n;
    points.push_back(p);
  }
  return points;
}

void WriteDetData(const std::vector<DetPoint>& points, const std::string& path) {
  std::string out;
  for (const DetPoint& p : points) {
    out += FormatFixed(p.zeta, 6);
    out += '\t';
    out += FormatFixed(p.p_fa, 8);
    out += '\t';
    out += FormatFixed(p.p_miss, 8);
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

void WriteDetSvg(const std::vector<DetPoint>& points, const std::string& path) {
  const int w = 480, h = 480, margin = 40;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes: x = P_FA in [0, max], y = P_miss in [0, 1], origin bottom-left.
  double max_fa = 0.0;
  for (const DetPoint& p : points) max_fa = std::max(max_fa, p.p_fa);
  if (max_fa <= 0.0) max_fa = 1e-6;
  auto xpix = [&](double fa) {
    return margin + (w - 2 * margin) * (fa / max_fa);
  };
  auto ypix = [&](double miss) {
    return h - margin - (h - 2 * margin) * (1.0 - miss);
  };
  svg += "<line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(h - margin) +
         "\" x2=\"" + std::to_string(w - margin) + "\" y2=\"" + std::to_string(h - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(margin) +
         "\" x2=\"" + std::to_string(margin) + "\" y2=\"" + std::to_string(h - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + std::to_string(w / 2) + "\" y=\"" + std::to_string(h - 8) +
         "\" font-size=\"12\">false alarm probability</text>\n";
  svg += "<text x=\"12\" y=\"" + std::to_string(h / 2) +
         "\" font-size=\"12\" transform=\"rotate(-90 12 " + std::to_string(h / 2) +
         ")\">miss probability</text>\n";
  svg += "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"";
  std::vector<DetPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const DetPoint& a, const DetPoint& b) { return a.zeta < b.zeta; });
  for (const DetPoint& p : sorted) {
    svg += FormatFixed(xpix(p.p_fa), 2) + "," + FormatFixed(ypix(p.p_miss), 2) + " ";
  }
  svg += "\"/>\n</svg>\n";
  WriteFileAtomic(path, svg);
}

std::string FormatTwvReport(const TwvReport& report) {
  std::string out = "kwid\tn_true\tn_correct\tn_fa\tp_miss\tp_fa\n";
  for (const auto& [kwid, s] : report.per_query) {
    out += kwid;
    out += '\t';
    out += std::to_string(s.n_true);
    out += '\t';
    out += std::to_string(s.n_correct);
    out += '\t';
    out += std::to_string(s.n_fa);
    out += '\t';
    out += FormatFixed(s.p_miss, 6);
    out += '\t';
    out += FormatFixed(s.p_fa, 8);
    out += '\n';
  }
  out += "twv\t" + FormatFixed(report.twv_percent, 4) + "\tzeta\t" +
         FormatFixed(report.zeta, 6) + "\tqueries\t" +
         std::to_string(report.queries_scored) + "\n";
  return out;
}

}  // namespace kws
