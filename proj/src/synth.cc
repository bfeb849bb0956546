// kws/synth.cc

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

#include "kws/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "kws/error.h"
#include "kws/io_util.h"
#include "kws/rng.h"

namespace kws {

namespace {
// Substream tags for per-purpose generators.
constexpr uint64_t kPrototypeStream = 0;
constexpr uint64_t kDocStreamBase = 1;
}  // namespace

std::vector<std::string> SynthSpec::Vocabulary() const {
  std::set<std::string> seen;
  std::vector<std::string> vocab;
  for (const auto& sentence : sentences) {
    for (const std::string& w : sentence) {
      if (seen.insert(w).second) vocab.push_back(w);
    }
  }
  return vocab;
}

SynthSpec SynthSpec::Parse(const std::vector<std::string>& lines,
                           const std::string& origin) {
  SynthSpec spec;
  bool have_dim = false, have_shift = false, have_seed = false;
  bool have_proto_seed = false;
  for (const std::string& raw : lines) {
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("grapheme ", 0) == 0) {
      const auto toks = SplitWhitespace(line);
      if (toks.size() != 3) throw ConfigError(origin + ": malformed grapheme line '" + line + "'");
      const std::vector<Grapheme> cps = Utf8Decode(toks[1]);
      if (cps.size() != 1) throw ConfigError(origin + ": grapheme must be a single symbol: '" + toks[1] + "'");
      GraphemePrototype p;
      p.grapheme = cps[0];
      p.duration_frames = static_cast<int>(ParseInt(toks[2], "duration_frames"));
      if (p.duration_frames < 1) throw ConfigError(origin + ": duration_frames must be >= 1");
      if (spec.prototype_index.count(p.grapheme)) {
        throw ConfigError(origin + ": duplicate grapheme '" + toks[1] + "'");
      }
      spec.prototype_index[p.grapheme] = spec.prototypes.size();
      spec.prototypes.push_back(std::move(p));
      continue;
    }
    if (line.rfind("sentence ", 0) == 0) {
      auto toks = SplitWhitespace(line);
      toks.erase(toks.begin());
      if (toks.empty()) throw ConfigError(origin + ": empty sentence line");
      spec.sentences.push_back(std::move(toks));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": unrecognized line '" + line + "'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key == "dim") {
      spec.dim = static_cast<int>(ParseInt(value, "dim"));
      have_dim = true;
    } else if (key == "frame_shift_ms") {
      spec.frame_shift_ms = ParseDouble(value, "frame_shift_ms");
      have_shift = true;
    } else if (key == "noise_std") {
      spec.noise_std = ParseDouble(value, "noise_std");
    } else if (key == "speaker_offset_std") {
      spec.speaker_offset_std = ParseDouble(value, "speaker_offset_std");
    } else if (key == "seed") {
      spec.seed = static_cast<uint64_t>(ParseInt(value, "seed"));
      have_seed = true;
    } else if (key == "prototype_seed") {
      spec.prototype_seed = static_cast<uint64_t>(ParseInt(value, "prototype_seed"));
      have_proto_seed = true;
    } else {
      throw ConfigError(origin + ": unknown key '" + key + "'");
    }
  }
  if (!have_dim || spec.dim < 1) throw ConfigError(origin + ": dim must be a positive integer");
  if (!have_shift || spec.frame_shift_ms <= 0.0) throw ConfigError(origin + ": frame_shift_ms must be positive");
  if (!have_seed) throw ConfigError(origin + ": seed is required");
  if (!have_proto_seed) spec.prototype_seed = spec.seed;
  if (spec.noise_std < 0.0 || spec.speaker_offset_std < 0.0) {
    throw ConfigError(origin + ": noise_std and speaker_offset_std must be >= 0");
  }
  if (spec.sentences.empty()) throw ConfigError(origin + ": at least one sentence is required");

  for (const auto& sentence : spec.sentences) {
    for (const std::string& w : sentence) {
      for (Grapheme g : Utf8Decode(w)) {
        if (!spec.prototype_index.count(g)) {
          throw ConfigError(origin + ": grapheme '" + Utf8Encode(g) +
                            "' in sentences has no prototype");
        }
      }
    }
  }

  // Unit-norm Gaussian prototypes, one fixed draw per declared grapheme.
  Rng proto_rng(Rng::MixSeed(spec.prototype_seed, kPrototypeStream));
  for (GraphemePrototype& p : spec.prototypes) {
    p.prototype.resize(spec.dim);
    double norm_sq = 0.0;
    for (int d = 0; d < spec.dim; ++d) {
      const double v = proto_rng.Normal();
      p.prototype[d] = static_cast<float>(v);
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
      for (int d = 0; d < spec.dim; ++d) {
        p.prototype[d] = static_cast<float>(p.prototype[d] / norm);
      }
    }
  }
  return spec;
}

SynthSpec SynthSpec::Load(const std::string& path) {
  return Parse(ReadLines(path), path);
}

SynthOutput SynthesizeCorpus(const SynthSpec& spec) {
  SynthOutput out;
  for (const GraphemePrototype& p : spec.prototypes) {
    out.graphemes.push_back(p.grapheme);
    out.durations.emplace_back(p.grapheme, p.duration_frames);
  }

  for (size_t d = 0; d < spec.sentences.size(); ++d) {
    const std::vector<std::string>& sentence = spec.sentences[d];
    char doc_id[32];
    std::snprintf(doc_id, sizeof(doc_id), "doc%05zu", d);

    // Word frame spans from exact grapheme durations.
    std::vector<std::pair<int, int>> word_frames;  // (start, count)
    int total_frames = 0;
    for (const std::string& w : sentence) {
      const int start = total_frames;
      for (Grapheme g : Utf8Decode(w)) {
        total_frames += spec.prototypes[spec.prototype_index.at(g)].duration_frames;
      }
      word_frames.emplace_back(start, total_frames - start);
    }

    FeatureMatrix m;
    m.frame_shift_ms = static_cast<float>(spec.frame_shift_ms);
    m.frames.Resize(total_frames, spec.dim);
    int frame = 0;
    for (const std::string& w : sentence) {
      for (Grapheme g : Utf8Decode(w)) {
        const GraphemePrototype& p = spec.prototypes[spec.prototype_index.at(g)];
        for (int rep = 0; rep < p.duration_frames; ++rep, ++frame) {
          float* row = m.frames.Row(frame);
          for (int c = 0; c < spec.dim; ++c) row[c] = p.prototype[c];
        }
      }
    }

    Rng doc_rng(Rng::MixSeed(spec.seed, kDocStreamBase + d));
    if (spec.speaker_offset_std > 0.0) {
      std::vector<float> offset(spec.dim);
      for (int c = 0; c < spec.dim; ++c) {
        offset[c] = static_cast<float>(doc_rng.Normal() * spec.speaker_offset_std);
      }
      for (int r = 0; r < total_frames; ++r) {
        float* row = m.frames.Row(r);
        for (int c = 0; c < spec.dim; ++c) row[c] += offset[c];
      }
    }
    if (spec.noise_std > 0.0) {
      for (int r = 0; r < total_frames; ++r) {
        float* row = m.frames.Row(r);
        for (int c = 0; c < spec.dim; ++c) {
          row[c] += static_cast<float>(doc_rng.Normal() * spec.noise_std);
        }
      }
    }

    ManifestRecord rec;
    rec.doc_id = doc_id;
    rec.feature_path = std::string("feats/") + doc_id + ".jfea";
    rec.num_frames = total_frames;
    rec.dim = spec.dim;
    rec.frame_shift_ms = spec.frame_shift_ms;
    out.records.push_back(rec);
    out.features.push_back(std::move(m));
    out.transcripts.push_back(Transcript{doc_id, sentence});

    Alignment align;
    align.doc_id = doc_id;
    const double sec_per_frame = spec.frame_shift_ms / 1000.0;
    for (size_t w = 0; w < sentence.size(); ++w) {
      AlignmentEntry e;
      e.word_index = static_cast<int>(w);
      e.start_sec = word_frames[w].first * sec_per_frame;
      e.dur_sec = word_frames[w].second * sec_per_frame;
      align.entries.push_back(e);
    }
    out.alignments.push_back(std::move(align));
  }
  return out;
}

void WriteSynthOutput(const SynthOutput& out, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir + "/feats");
  for (size_t i = 0; i < out.records.size(); ++i) {
    WriteFeatures(out.features[i], out_dir + "/" + out.records[i].feature_path);
  }
  SaveManifest(out.records, out_dir + "/manifest.tsv");
  SaveTranscripts(out.transcripts, out_dir + "/transcripts.tsv");
  SaveAlignments(out.alignments, out_dir + "/alignments.tsv");
  SaveGraphemeSet(out.graphemes, out_dir + "/graphemes.txt");
  std::string durations;
  for (const auto& [g, frames] : out.durations) {
    durations += Utf8Encode(g);
    durations += '\t';
    durations += std::to_string(frames);
    durations += '\n';
  }
  WriteFileAtomic(out_dir + "/durations.tsv", durations);
}

}  // namespace kws
