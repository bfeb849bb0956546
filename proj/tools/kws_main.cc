// tools/kws_main.cc

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

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "kws/error.h"
#include "kws/evaldet.h"
#include "kws/io_util.h"
#include "kws/run_config.h"
#include "kws/search.h"
#include "kws/synth.h"
#include "kws/trainer.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace kws;

struct GlobalArgs {
  std::string config_path;
  std::optional<int64_t> seed;
  std::optional<int> threads;
  std::string out;
};

RunConfig LoadRunConfig(const GlobalArgs& g, bool required) {
  RunConfig cfg;
  if (!g.config_path.empty()) {
    cfg = RunConfig::Load(g.config_path);
  } else if (required) {
    throw ConfigError("--config is required for this subcommand");
  }
  if (g.seed.has_value()) cfg.seed = static_cast<uint64_t>(*g.seed);
  if (!g.out.empty()) cfg.out_dir = g.out;
  return cfg;
}

std::unique_ptr<KwsModel<float>> LoadSearchModel(const RunConfig& cfg,
                                                 const std::string& ckpt_path) {
  const Checkpoint ckpt = ReadCheckpoint(ckpt_path);
  const GraphemeVocab vocab = VocabFromCheckpoint(ckpt);
  auto model = std::make_unique<KwsModel<float>>(cfg.encoder, vocab,
                                                 /*with_text_frontend=*/false, 0);
  LoadModelParameters(ckpt, model.get());
  return model;
}

int CmdSynth(const GlobalArgs& g, const std::string& spec_path) {
  if (g.out.empty()) throw ConfigError("synth requires --out DIR");
  std::vector<std::string> lines = ReadLines(spec_path);
  if (g.seed.has_value()) {
    // Prototypes derive from the seed, so override it before parsing.
    std::vector<std::string> kept;
    for (const std::string& line : lines) {
      const auto eq = line.find('=');
      if (eq != std::string::npos && Trim(line.substr(0, eq)) == "seed") continue;
      kept.push_back(line);
    }
    kept.push_back("seed = " + std::to_string(*g.seed));
    lines = std::move(kept);
  }
  const SynthSpec spec = SynthSpec::Parse(lines, spec_path);
  WriteSynthOutput(SynthesizeCorpus(spec), g.out);
  std::cout << "wrote " << spec.sentences.size() << " documents to " << g.out << "\n";
  return 0;
}

int CmdTrain(const GlobalArgs& g) {
  RunConfig cfg = LoadRunConfig(g, /*required=*/true);
  Trainer trainer(cfg);
  const TrainResult result = trainer.Run();
  std::cout << "trained " << result.steps_run << " steps; checkpoints in "
            << cfg.out_dir << "\n";
  return 0;
}

int CmdEncode(const GlobalArgs& g, const std::string& model_path,
              const std::string& data_dir) {
  if (g.out.empty()) throw ConfigError("encode requires --out DIR");
  RunConfig cfg = LoadRunConfig(g, /*required=*/true);
  const auto model = LoadSearchModel(cfg, model_path);
  Dataset dataset = Dataset::Load(data_dir);
  dataset.LoadFeatures();
  const ArchiveIndex index = EncodeArchive(dataset, *model);
  WriteIndex(index, g.out);
  std::cout << "encoded " << index.doc_ids.size() << " documents into " << g.out << "\n";
  return 0;
}

int CmdSearch(const GlobalArgs& g, const std::string& model_path,
              const std::string& index_dir, const std::string& keywords_path,
              const std::string& hits_path, bool no_kst) {
  RunConfig cfg = LoadRunConfig(g, /*required=*/true);
  const auto model = LoadSearchModel(cfg, model_path);
  const ArchiveIndex index = ReadIndex(index_dir);
  const auto keywords = LoadKeywordList(keywords_path);
  const double t_trials = index.TotalTrialDurationSec();
  std::vector<Hit> all_hits;
  for (const auto& [kwid, query] : keywords) {
    std::vector<Hit> hits;
    try {
      hits = SearchArchive(query, kwid, index, *model, cfg.threshold);
    } catch (const VocabularyError& e) {
      std::cerr << "warning: keyword " << kwid << " skipped: " << e.what() << "\n";
      continue;
    }
    if (no_kst) {
      for (Hit& h : hits) h.decision = h.score >= cfg.threshold;
    } else {
      KstNormalize(&hits, t_trials, cfg.kst_beta);
    }
    all_hits.insert(all_hits.end(), hits.begin(), hits.end());
  }
  WriteHits(all_hits, hits_path);
  std::cout << "wrote " << all_hits.size() << " hits to " << hits_path << "\n";
  return 0;
}

std::vector<std::string> KeywordIds(
    const std::vector<std::pair<std::string, Query>>& keywords) {
  std::vector<std::string> ids;
  ids.reserve(keywords.size());
  for (const auto& [kwid, q] : keywords) ids.push_back(kwid);
  return ids;
}

double DataDurationSec(const std::string& data_dir) {
  double total = 0.0;
  for (const ManifestRecord& r : LoadManifest(data_dir + "/manifest.tsv")) {
    total += r.DurationSec();
  }
  return total;
}

int CmdScore(const GlobalArgs& g, const std::string& hits_path,
             const std::string& data_dir, const std::string& keywords_path,
             std::optional<double> zeta, double beta, const std::string& report_path) {
  const auto keywords = LoadKeywordList(keywords_path);
  const auto transcripts = LoadTranscripts(data_dir + "/transcripts.tsv");
  const auto alignments = LoadAlignments(data_dir + "/alignments.tsv");
  const auto refs = BuildReference(transcripts, alignments, keywords);
  const auto hits = ReadHits(hits_path);
  const auto labeled = AlignHits(hits, refs);
  const auto kwids = KeywordIds(keywords);
  const double t_trials = DataDurationSec(data_dir);

  const auto [mtwv, zeta_star] = Mtwv(labeled, refs, kwids, beta, t_trials);
  const double zeta_used = zeta.value_or(0.5);
  const TwvReport report = Twv(labeled, refs, kwids, beta, zeta_used, t_trials);
  std::cout << "TWV\t" << FormatFixed(report.twv_percent, 4) << "\tzeta\t"
            << FormatFixed(zeta_used, 6) << "\n";
  std::cout << "MTWV\t" << FormatFixed(mtwv, 4) << "\tzeta\t"
            << FormatFixed(zeta_star, 6) << "\n";
  if (!report_path.empty()) {
    WriteFileAtomic(report_path, FormatTwvReport(report));
  }
  return 0;
}

int CmdDet(const GlobalArgs& g, const std::string& hits_path,
           const std::string& data_dir, const std::string& keywords_path,
           double beta, const std::string& data_out, const std::string& svg_out) {
  const auto keywords = LoadKeywordList(keywords_path);
  const auto transcripts = LoadTranscripts(data_dir + "/transcripts.tsv");
  const auto alignments = LoadAlignments(data_dir + "/alignments.tsv");
  const auto refs = BuildReference(transcripts, alignments, keywords);
  const auto hits = ReadHits(hits_path);
  const auto labeled = AlignHits(hits, refs);
  const auto kwids = KeywordIds(keywords);

  std::set<double> sweep = {0.0, 1.0};
  for (const LabeledHit& lh : labeled) sweep.insert(lh.hit.score);
  const std::vector<double> thresholds(sweep.begin(), sweep.end());
  const auto points = DetPoints(labeled, refs, kwids, thresholds,
                                DataDurationSec(data_dir));
  WriteDetData(points, data_out);
  if (!svg_out.empty()) WriteDetSvg(points, svg_out);
  std::cout << "wrote " << points.size() << " det points to " << data_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"End-to-end keyword search toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs g;
  app.add_option("--config", g.config_path, "run configuration file");
  app.add_option("--seed", g.seed, "override the configured seed");
  app.add_option("--threads", g.threads, "kernel thread count");
  app.add_option("--out", g.out, "output directory or file");
  app.footer("Config keys and defaults:\n" + kws::RunConfig().Emit());

  std::string spec_path, model_path, data_dir, index_dir, keywords_path;
  std::string hits_path = "hits.tsv";
  std::string report_path, det_data = "det.tsv", det_svg;
  bool no_kst = false;
  double beta = 999.9;
  std::optional<double> zeta;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("spec", spec_path, "synthesis spec file")->required();

  app.add_subcommand("train", "train a model from --config");

  CLI::App* encode = app.add_subcommand("encode", "encode a dataset into a search index");
  encode->add_option("--model", model_path, "model checkpoint")->required();
  encode->add_option("--data", data_dir, "dataset directory")->required();

  CLI::App* search = app.add_subcommand("search", "search keywords over an index");
  search->add_option("--model", model_path, "model checkpoint")->required();
  search->add_option("--index", index_dir, "index directory")->required();
  search->add_option("--keywords", keywords_path, "keyword list")->required();
  search->add_option("--hits", hits_path, "output hit file");
  search->add_flag("--no-kst", no_kst, "skip keyword-specific score normalization");

  CLI::App* score = app.add_subcommand("score", "TWV/MTWV of a hit file");
  score->add_option("--hits", hits_path, "hit file")->required();
  score->add_option("--data", data_dir, "reference dataset directory")->required();
  score->add_option("--keywords", keywords_path, "keyword list")->required();
  score->add_option("--zeta", zeta, "decision threshold (default 0.5)");
  score->add_option("--beta", beta, "false-alarm weight");
  score->add_option("--report", report_path, "per-query report file");

  CLI::App* det = app.add_subcommand("det", "detection-error-tradeoff data");
  det->add_option("--hits", hits_path, "hit file")->required();
  det->add_option("--data", data_dir, "reference dataset directory")->required();
  det->add_option("--keywords", keywords_path, "keyword list")->required();
  det->add_option("--beta", beta, "false-alarm weight");
  det->add_option("--det-data", det_data, "output data file");
  det->add_option("--svg", det_svg, "optional SVG rendering");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (g.threads.has_value() && *g.threads > 0) omp_set_num_threads(*g.threads);
#endif

  try {
    if (synth->parsed()) return CmdSynth(g, spec_path);
    if (app.got_subcommand("train")) return CmdTrain(g);
    if (encode->parsed()) return CmdEncode(g, model_path, data_dir);
    if (search->parsed()) {
      return CmdSearch(g, model_path, index_dir, keywords_path, hits_path, no_kst);
    }
    if (score->parsed()) {
      return CmdScore(g, hits_path, data_dir, keywords_path, zeta, beta, report_path);
    }
    if (det->parsed()) {
      return CmdDet(g, hits_path, data_dir, keywords_path, beta, det_data, det_svg);
    }
  } catch (const kws::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kws::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
