// kws/trainer.h

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

#ifndef KWS_TRAINER_H_
#define KWS_TRAINER_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kws/corpus.h"
#include "kws/evaldet.h"
#include "kws/loss.h"
#include "kws/model.h"
#include "kws/optimizer.h"
#include "kws/run_config.h"
#include "kws/textdoc.h"

namespace kws {

// Joint training: each step samples a modality, draws L queries with
// probability proportional to occurrence count, pairs each with one
// positive document and M-1 uniformly random ones, and minimizes the
// modified binary cross-entropy over all frames. Single-threaded per step
// (kernels may parallelize internally) so seeded runs are bitwise
// reproducible and resumable.

enum class Modality { kAudio, kText };

// One document instance inside a batch, with honest frame labels computed
// from its transcript (a random "negative" that happens to contain the
// query gets positive labels).
struct TrainDoc {
  int dataset_index = 0;
  const FeatureMatrix* features = nullptr;  // audio docs
  std::vector<int> symbol_ids;              // text docs: masked+expanded ids
  std::vector<uint8_t> labels;              // per encoder output frame
};

struct QueryTask {
  std::vector<int> query_ids;
  std::vector<TrainDoc> docs;  // docs[0] contains the query
};

struct Batch {
  Modality modality = Modality::kAudio;
  std::vector<QueryTask> queries;
};

// Uniform over {audio, text}; no draw is consumed when text is absent.
Modality SampleModality(Rng* rng, bool has_text);

// L flat occurrence indices into the inventory (query probability is
// proportional to occurrence count; the occurrence picks the positive).
std::vector<size_t> SampleQueryBatch(const QueryInventory& inv, int count, Rng* rng);

// Everything fixed about one training modality.
struct AudioSource {
  const Dataset* dataset = nullptr;
  const QueryInventory* inventory = nullptr;
};
struct TextSource {
  const std::vector<Transcript>* transcripts = nullptr;
  std::vector<WrittenDocument> documents;  // index-aligned with transcripts
  const QueryInventory* inventory = nullptr;
  TextPipelineConfig pipeline;
};

Batch AssembleAudioBatch(const std::vector<size_t>& occurrence_draws,
                         const AudioSource& source, int docs_per_query,
                         const EncoderConfig& enc, const GraphemeVocab& vocab,
                         Rng* rng);
Batch AssembleTextBatch(const std::vector<size_t>& occurrence_draws,
                        const TextSource& source, int docs_per_query,
                        const EncoderConfig& enc, const GraphemeVocab& vocab,
                        Rng* rng);

// Forward + backward over the whole batch; gradients accumulate into the
// model (callers zero them first). Returns the loss: frame losses summed,
// then averaged over L*M when mean_reduction.
template <typename S>
double ComputeBatchGradients(KwsModel<S>* model, const Batch& batch,
                             const LossConfig& loss_cfg, bool mean_reduction,
                             bool training, Rng* dropout_rng);

// Forward-only loss; leaves gradients untouched.
template <typename S>
double ComputeBatchLoss(const KwsModel<S>& model, const Batch& batch,
                        const LossConfig& loss_cfg, bool mean_reduction,
                        bool training, Rng* dropout_rng);

struct TrainResult {
  uint64_t steps_run = 0;
  double final_interval_mean_loss = 0.0;
  double best_dev_mtwv = -1e300;  // untouched when no dev set
};

// The full loop: step sampling, optimization, metrics.tsv logging,
// last/best checkpointing under cfg.out_dir, optional periodic dev MTWV.
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg);
  ~Trainer();

  TrainResult Run();

  const KwsModel<float>& Model() const { return *model_; }

 private:
  void SaveCheckpoint(const std::string& path);
  void LoadCheckpointForResume(const std::string& path);
  double EvalDevMtwv();

  RunConfig cfg_;
  Dataset paired_;
  QueryInventory audio_inventory_;
  AudioSource audio_source_;
  std::optional<TextSource> text_source_;
  std::vector<Transcript> text_transcripts_;
  QueryInventory text_inventory_;

  std::optional<Dataset> dev_;
  std::vector<std::pair<std::string, Query>> dev_keywords_;
  std::vector<ReferenceOccurrence> dev_refs_;

  GraphemeVocab vocab_;
  std::unique_ptr<KwsModel<float>> model_;
  std::unique_ptr<AdamOptimizer<float>> optimizer_;
  Rng rng_;
};

}  // namespace kws

#endif  // KWS_TRAINER_H_
