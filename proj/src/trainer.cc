// kws/trainer.cc

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

#include "kws/trainer.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "kws/error.h"
#include "kws/io_util.h"
#include "kws/search.h"

namespace kws {

namespace {
// Seed substreams: the model draws its initialization from one stream and
// the trainer (sampling + dropout) from another, so adding steps never
// perturbs initialization.
constexpr uint64_t kModelStream = 101;
constexpr uint64_t kTrainStream = 102;
}  // namespace

Modality SampleModality(Rng* rng, bool has_text) {
  if (!has_text) return Modality::kAudio;
  return rng->UniformInt(2) == 0 ? Modality::kAudio : Modality::kText;
}

std::vector<size_t> SampleQueryBatch(const QueryInventory& inv, int count, Rng* rng) {
  if (count < 1) throw std::invalid_argument("query batch size must be >= 1");
  if (inv.TotalOccurrences() == 0) {
    throw std::invalid_argument("inventory has no occurrences");
  }
  std::vector<size_t> draws(count);
  for (int i = 0; i < count; ++i) {
    draws[i] = static_cast<size_t>(rng->UniformInt(inv.TotalOccurrences()));
  }
  return draws;
}

namespace {

void WarnSmallDataset(size_t num_docs, int docs_per_query) {
  static std::atomic<bool> warned{false};
  if (num_docs < static_cast<size_t>(docs_per_query) &&
      !warned.exchange(true)) {
    std::cerr << "warning: dataset has " << num_docs << " documents, fewer than "
              << docs_per_query << " per query; negatives repeat\n";
  }
}

}  // namespace

Batch AssembleAudioBatch(const std::vector<size_t>& occurrence_draws,
                         const AudioSource& source, int docs_per_query,
                         const EncoderConfig& enc, const GraphemeVocab& vocab,
                         Rng* rng) {
  const Dataset& ds = *source.dataset;
  const QueryInventory& inv = *source.inventory;
  WarnSmallDataset(ds.NumDocs(), docs_per_query);
  Batch batch;
  batch.modality = Modality::kAudio;
  for (size_t flat : occurrence_draws) {
    const auto [entry_idx, occ_idx] = inv.OccurrenceAt(flat);
    const InventoryEntry& entry = inv.Entry(entry_idx);
    const Occurrence& occ = entry.occurrences[occ_idx];
    const Query query = Query::FromWords(entry.words);

    QueryTask task;
    task.query_ids = vocab.Encode(query.graphemes);
    std::vector<int> doc_indices = {occ.doc_index};
    for (int m = 1; m < docs_per_query; ++m) {
      doc_indices.push_back(static_cast<int>(rng->UniformInt(ds.NumDocs())));
    }
    for (int idx : doc_indices) {
      TrainDoc doc;
      doc.dataset_index = idx;
      doc.features = &ds.features[idx];
      const double out_shift_sec =
          enc.OutputFrameShiftMs(ds.features[idx].frame_shift_ms) / 1000.0;
      const int out_frames = enc.SpeechOutputFrames(ds.features[idx].NumFrames());
      doc.labels = MakeSpeechLabels(query, ds.alignments[idx], ds.transcripts[idx],
                                    out_shift_sec, out_frames);
      task.docs.push_back(std::move(doc));
    }
    batch.queries.push_back(std::move(task));
  }
  return batch;
}

Batch AssembleTextBatch(const std::vector<size_t>& occurrence_draws,
                        const TextSource& source, int docs_per_query,
                        const EncoderConfig& enc, const GraphemeVocab& vocab,
                        Rng* rng) {
  const QueryInventory& inv = *source.inventory;
  const size_t num_docs = source.documents.size();
  WarnSmallDataset(num_docs, docs_per_query);
  Batch batch;
  batch.modality = Modality::kText;
  for (size_t flat : occurrence_draws) {
    const auto [entry_idx, occ_idx] = inv.OccurrenceAt(flat);
    const InventoryEntry& entry = inv.Entry(entry_idx);
    const Occurrence& occ = entry.occurrences[occ_idx];
    const Query query = Query::FromWords(entry.words);

    QueryTask task;
    task.query_ids = vocab.Encode(query.graphemes);
    std::vector<int> doc_indices = {occ.doc_index};
    for (int m = 1; m < docs_per_query; ++m) {
      doc_indices.push_back(static_cast<int>(rng->UniformInt(num_docs)));
    }
    for (int idx : doc_indices) {
      const WrittenDocument& wd = source.documents[idx];
      TrainDoc doc;
      doc.dataset_index = idx;
      const std::vector<Grapheme> masked =
          MaskDocument(wd.graphemes, source.pipeline.mask_prob, rng);
      ExpansionMap map;
      const std::vector<Grapheme> expanded =
          ExpandDurations(masked, wd.graphemes, source.pipeline, &map);
      doc.symbol_ids = vocab.Encode(expanded, /*allow_mask=*/true);
      doc.labels = MakeTextLabels(query, wd, map, enc.TextDownsampleFactor());
      task.docs.push_back(std::move(doc));
    }
    batch.queries.push_back(std::move(task));
  }
  return batch;
}

template <typename S>
double ComputeBatchGradients(KwsModel<S>* model, const Batch& batch,
                             const LossConfig& loss_cfg, bool mean_reduction,
                             bool training, Rng* dropout_rng) {
  if (batch.queries.empty()) throw std::invalid_argument("empty batch");
  const size_t docs_per_query = batch.queries.front().docs.size();
  const double scale =
      mean_reduction ? 1.0 / (batch.queries.size() * docs_per_query) : 1.0;
  const int dim = model->Config().output_dim;

  double total_loss = 0.0;
  for (const QueryTask& task : batch.queries) {
    QueryTrace<S> query_trace;
    const Matrix<S> e = model->EncodeQueryTraced(task.query_ids, &query_trace);
    Matrix<S> de(1, dim);
    for (const TrainDoc& doc : task.docs) {
      DocTrace<S> doc_trace;
      Matrix<S> enc;
      if (batch.modality == Modality::kAudio) {
        enc = model->EncodeSpeechTraced(doc.features->frames.template Cast<S>(),
                                        training, dropout_rng, &doc_trace);
      } else {
        enc = model->EncodeTextTraced(doc.symbol_ids, training, dropout_rng,
                                      &doc_trace);
      }
      if (static_cast<size_t>(enc.Rows()) != doc.labels.size()) {
        throw std::logic_error("label length does not match encoder output");
      }
      const std::vector<S> logits = ScoreLogits(enc, e);
      std::vector<S> dlogits;
      total_loss +=
          ModifiedBceFromLogits(logits, doc.labels, loss_cfg, scale, &dlogits);

      Matrix<S> denc(enc.Rows(), dim);
      S* de_row = de.Row(0);
      const S* e_row = e.Row(0);
      for (int t = 0; t < enc.Rows(); ++t) {
        const S g = dlogits[t];
        if (g == S(0)) continue;
        S* drow = denc.Row(t);
        const S* erow_enc = enc.Row(t);
        for (int d = 0; d < dim; ++d) {
          drow[d] = g * e_row[d];
          de_row[d] += g * erow_enc[d];
        }
      }
      model->BackwardDoc(doc_trace, denc);
    }
    model->BackwardQuery(query_trace, de);
  }
  return total_loss;
}

template double ComputeBatchGradients<float>(KwsModel<float>*, const Batch&,
                                             const LossConfig&, bool, bool, Rng*);
template double ComputeBatchGradients<double>(KwsModel<double>*, const Batch&,
                                              const LossConfig&, bool, bool, Rng*);

template <typename S>
double ComputeBatchLoss(const KwsModel<S>& model, const Batch& batch,
                        const LossConfig& loss_cfg, bool mean_reduction,
                        bool training, Rng* dropout_rng) {
  if (batch.queries.empty()) throw std::invalid_argument("empty batch");
  const size_t docs_per_query = batch.queries.front().docs.size();
  const double scale =
      mean_reduction ? 1.0 / (batch.queries.size() * docs_per_query) : 1.0;
  double total_loss = 0.0;
  for (const QueryTask& task : batch.queries) {
    const Matrix<S> e = model.EncodeQuery(task.query_ids);
    for (const TrainDoc& doc : task.docs) {
      Matrix<S> enc;
      if (batch.modality == Modality::kAudio) {
        enc = model.EncodeSpeechTraced(doc.features->frames.template Cast<S>(),
                                       training, dropout_rng, nullptr);
      } else {
        enc = model.EncodeTextTraced(doc.symbol_ids, training, dropout_rng, nullptr);
      }
      const std::vector<S> logits = ScoreLogits(enc, e);
      total_loss += ModifiedBceFromLogits<S>(logits, doc.labels, loss_cfg, scale,
                                             static_cast<std::vector<S>*>(nullptr));
    }
  }
  return total_loss;
}

template double ComputeBatchLoss<float>(const KwsModel<float>&, const Batch&,
                                        const LossConfig&, bool, bool, Rng*);
template double ComputeBatchLoss<double>(const KwsModel<double>&, const Batch&,
                                         const LossConfig&, bool, bool, Rng*);

// ---------------------------------- loop -----------------------------------

Trainer::Trainer(const RunConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  if (cfg_.paired_dir.empty()) throw ConfigError("paired_dir is required for training");
  if (cfg_.Joint() && cfg_.unpaired_text.empty()) {
    throw ConfigError("mode = joint requires the unpaired_text key");
  }

  paired_ = Dataset::Load(cfg_.paired_dir);
  paired_.LoadFeatures();
  audio_inventory_ = QueryInventory::Build(paired_.transcripts);
  audio_source_ = {&paired_, &audio_inventory_};

  std::vector<Grapheme> vocab_symbols = paired_.graphemes;
  if (cfg_.Joint()) {
    text_transcripts_ = LoadTranscripts(cfg_.unpaired_text);
    std::set<Grapheme> known(vocab_symbols.begin(), vocab_symbols.end());
    for (const Transcript& t : text_transcripts_) {
      for (const std::string& w : t.words) {
        for (Grapheme g : Utf8Decode(w)) {
          if (known.insert(g).second) vocab_symbols.push_back(g);
        }
      }
    }
  }
  vocab_ = GraphemeVocab(vocab_symbols);

  if (cfg_.Joint()) {
    text_inventory_ = QueryInventory::Build(text_transcripts_);
    TextSource src;
    src.transcripts = &text_transcripts_;
    for (const Transcript& t : text_transcripts_) {
      src.documents.push_back(WrittenDocument::FromWords(t.words));
    }
    src.inventory = &text_inventory_;
    src.pipeline.mask_prob = cfg_.mask_prob;
    src.pipeline.repeat = cfg_.repeat;
    if (!cfg_.duration_table.empty()) {
      src.pipeline.use_table = true;
      src.pipeline.duration_table = LoadDurationTable(cfg_.duration_table);
      for (const WrittenDocument& d : src.documents) {
        for (Grapheme g : d.graphemes) src.pipeline.DurationOf(g);
      }
    }
    text_source_ = std::move(src);
  }

  if (!cfg_.dev_dir.empty()) {
    if (cfg_.dev_keywords.empty()) {
      throw ConfigError("dev_dir is set but dev_keywords is not");
    }
    dev_ = Dataset::Load(cfg_.dev_dir);
    dev_->LoadFeatures();
    dev_keywords_ = LoadKeywordList(cfg_.dev_keywords);
    dev_refs_ = BuildReference(dev_->transcripts, dev_->alignments, dev_keywords_);
  }

  model_ = std::make_unique<KwsModel<float>>(cfg_.encoder, vocab_, cfg_.Joint(),
                                             Rng::MixSeed(cfg_.seed, kModelStream));
  optimizer_ = std::make_unique<AdamOptimizer<float>>(
      model_->Params(),
      OptimizerConfig{cfg_.learning_rate, 0.9, 0.999, 1e-8, cfg_.clip_norm});
  rng_.Seed(Rng::MixSeed(cfg_.seed, kTrainStream));

  if (!cfg_.resume.empty()) LoadCheckpointForResume(cfg_.resume);
}

Trainer::~Trainer() = default;

void Trainer::SaveCheckpoint(const std::string& path) {
  Checkpoint ckpt = MakeModelCheckpoint(*model_, optimizer_->StepCount());
  const ParameterSet<float>& params = model_->Params();
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    ckpt.tensors.emplace_back("opt.m." + params.Name(i),
                              optimizer_->FirstMoments()[i]);
    ckpt.tensors.emplace_back("opt.v." + params.Name(i),
                              optimizer_->SecondMoments()[i]);
  }
  const auto state = rng_.State();
  ckpt.extras.emplace_back("rng", std::vector<uint64_t>(state.begin(), state.end()));
  WriteCheckpoint(path, ckpt);
}

void Trainer::LoadCheckpointForResume(const std::string& path) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  LoadModelParameters(ckpt, model_.get());
  const ParameterSet<float>& params = model_->Params();
  for (size_t i = 0; i < params.NumTensors(); ++i) {
    const Matrix<float>* m = ckpt.FindTensor("opt.m." + params.Name(i));
    const Matrix<float>* v = ckpt.FindTensor("opt.v." + params.Name(i));
    if (m == nullptr || v == nullptr) {
      throw DataError("checkpoint lacks optimizer state for " + params.Name(i));
    }
    optimizer_->FirstMoments()[i] = *m;
    optimizer_->SecondMoments()[i] = *v;
  }
  const std::vector<uint64_t>* rng_state = ckpt.FindExtra("rng");
  if (rng_state == nullptr || rng_state->size() != 4) {
    throw DataError("checkpoint lacks sampler state");
  }
  rng_.SetState({(*rng_state)[0], (*rng_state)[1], (*rng_state)[2], (*rng_state)[3]});
  optimizer_->SetStepCount(ckpt.step);
}

double Trainer::EvalDevMtwv() {
  const ArchiveIndex index = EncodeArchive(*dev_, *model_);
  std::vector<Hit> all_hits;
  std::vector<std::string> kwids;
  for (const auto& [kwid, query] : dev_keywords_) {
    kwids.push_back(kwid);
    try {
      std::vector<Hit> hits =
          SearchArchive(query, kwid, index, *model_, cfg_.threshold);
      all_hits.insert(all_hits.end(), hits.begin(), hits.end());
    } catch (const VocabularyError&) {
      // A dev keyword outside the training vocabulary simply yields no hits.
    }
  }
  const std::vector<LabeledHit> labeled = AlignHits(all_hits, dev_refs_);
  return Mtwv(labeled, dev_refs_, kwids, cfg_.kst_beta, index.TotalTrialDurationSec())
      .first;
}

TrainResult Trainer::Run() {
  std::filesystem::create_directories(cfg_.out_dir);
  const std::string metrics_path = cfg_.out_dir + "/metrics.tsv";
  std::ofstream metrics(metrics_path,
                        cfg_.resume.empty() ? std::ios::trunc : std::ios::app);
  if (!metrics) throw DataError("cannot write " + metrics_path);

  TrainResult result;
  const LossConfig loss_cfg{cfg_.phi, cfg_.lambda};
  const bool mean_reduction = cfg_.loss_reduction == "mean";
  double interval_loss = 0.0;
  int64_t interval_steps = 0, interval_audio = 0, interval_text = 0;
  const uint64_t first_step = optimizer_->StepCount() + 1;

  for (uint64_t step = first_step; step <= static_cast<uint64_t>(cfg_.steps); ++step) {
    const Modality modality = SampleModality(&rng_, text_source_.has_value());
    Batch batch;
    if (modality == Modality::kAudio) {
      const auto draws =
          SampleQueryBatch(audio_inventory_, cfg_.queries_per_step, &rng_);
      batch = AssembleAudioBatch(draws, audio_source_, cfg_.docs_per_query_audio,
                                 model_->Config(), vocab_, &rng_);
      ++interval_audio;
    } else {
      const auto draws =
          SampleQueryBatch(text_inventory_, cfg_.queries_per_step, &rng_);
      batch = AssembleTextBatch(draws, *text_source_, cfg_.docs_per_query_text,
                                model_->Config(), vocab_, &rng_);
      ++interval_text;
    }

    if (cfg_.lr_halflife > 0) {
      optimizer_->SetLearningRate(
          cfg_.learning_rate *
          std::exp2(-static_cast<double>(step - 1) / cfg_.lr_halflife));
    }
    model_->Params().ZeroGrad();
    const double loss = ComputeBatchGradients(model_.get(), batch, loss_cfg,
                                              mean_reduction, /*training=*/true, &rng_);
    optimizer_->Step(model_->Params());
    interval_loss += loss;
    ++interval_steps;
    result.steps_run = step;

    const bool at_interval = (step % cfg_.checkpoint_interval == 0) ||
                             (step == static_cast<uint64_t>(cfg_.steps));
    if (at_interval) {
      SaveCheckpoint(cfg_.out_dir + "/last.ckpt");
      std::string dev_field = "-";
      if (dev_.has_value() && cfg_.dev_interval > 0 &&
          (step % cfg_.dev_interval == 0 || step == static_cast<uint64_t>(cfg_.steps))) {
        const double mtwv = EvalDevMtwv();
        dev_field = FormatFixed(mtwv, 4);
        if (mtwv > result.best_dev_mtwv) {
          result.best_dev_mtwv = mtwv;
          SaveCheckpoint(cfg_.out_dir + "/best.ckpt");
        }
      }
      result.final_interval_mean_loss = interval_loss / interval_steps;
      metrics << step << '\t' << interval_audio << ':' << interval_text << '\t'
              << FormatFixed(result.final_interval_mean_loss, 6) << '\t'
              << dev_field << '\n';
      metrics.flush();
      interval_loss = 0.0;
      interval_steps = interval_audio = interval_text = 0;
    }
  }
  if (result.steps_run == 0) SaveCheckpoint(cfg_.out_dir + "/last.ckpt");
  return result;
}

}  // namespace kws
