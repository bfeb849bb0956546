// kws/model.h

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

#ifndef KWS_MODEL_H_
#define KWS_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include "kws/checkpoint.h"
#include "kws/corpus.h"
#include "kws/layers.h"
#include "kws/tensor.h"
#include "kws/textdoc.h"

namespace kws {

// Query encoder, document encoder with configurable speech-only/shared
// split, optional text front-end, and the frame-wise sigmoid dot-product
// scorer. The document stack is a fixed sequence of BLSTM layers with
// dropout between successive layers and one stride-2 downsample; the last
// `shared_layers` of them are shared with the text path, which enters
// through its own embedding + BLSTM + affine front-end.

struct EncoderConfig {
  int feature_dim = 8;

  // Query encoder: embedding -> BiGRU stack -> per-frame projection -> sum.
  int query_embed_dim = 32;
  int query_gru_layers = 2;
  int query_gru_hidden = 256;  // per direction

  // Document encoder.
  int doc_layers = 6;
  int doc_hidden = 512;  // per direction
  int shared_layers = 6;
  int downsample_after = 4;  // 1-based layer count; 0 disables
  int downsample_factor = 2;
  double dropout = 0.4;

  // Shared output space of query and document projections.
  int output_dim = 400;

  // Text front-end: embedding -> 1 BiLSTM -> affine into the shared stack.
  int text_embed_dim = 32;
  int text_lstm_hidden = 512;  // per direction

  // Paper-scale sizes (the defaults above).
  static EncoderConfig Paper() { return EncoderConfig(); }
  // Small sizes for tests and laptop-scale experiments.
  static EncoderConfig Desk();

  void Validate() const;

  int SpeechOnlyLayers() const { return doc_layers - shared_layers; }
  // Input width of the first shared layer; the text front-end projects here.
  int SharedInputDim() const {
    return SpeechOnlyLayers() == 0 ? feature_dim : 2 * doc_hidden;
  }
  bool SpeechPathDownsampled() const { return downsample_after >= 1; }
  bool TextPathDownsampled() const { return downsample_after > SpeechOnlyLayers(); }
  int SpeechOutputFrames(int input_frames) const {
    return SpeechPathDownsampled()
               ? DownsampledLength(input_frames, downsample_factor)
               : input_frames;
  }
  int TextOutputFrames(int expanded_positions) const {
    return TextPathDownsampled()
               ? DownsampledLength(expanded_positions, downsample_factor)
               : expanded_positions;
  }
  int TextDownsampleFactor() const { return TextPathDownsampled() ? downsample_factor : 1; }
  double OutputFrameShiftMs(double input_shift_ms) const {
    return SpeechPathDownsampled() ? input_shift_ms * downsample_factor : input_shift_ms;
  }

  bool operator==(const EncoderConfig&) const = default;
};

// Grapheme ids in a fixed order; the mask symbol is an extra row of the
// text front-end embedding only and may not appear in queries.
class GraphemeVocab {
 public:
  GraphemeVocab() = default;
  explicit GraphemeVocab(std::vector<Grapheme> symbols);

  int Size() const { return static_cast<int>(symbols_.size()); }
  int MaskId() const { return Size(); }
  const std::vector<Grapheme>& Symbols() const { return symbols_; }

  // Throws VocabularyError for unknown graphemes (and for the mask symbol
  // unless allow_mask).
  int IdOf(Grapheme g, bool allow_mask = false) const;
  std::vector<int> Encode(const std::vector<Grapheme>& symbols,
                          bool allow_mask = false) const;

  bool operator==(const GraphemeVocab& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<Grapheme> symbols_;
  std::map<Grapheme, int> index_;
};

// Forward-pass records kept for backpropagation.
template <typename S>
struct QueryTrace {
  EmbeddingCache embed;
  std::vector<BiGruCache<S>> grus;
  AffineCache<S> proj;
  int frames = 0;
  Matrix<S> embedding;  // 1 x output_dim
};

template <typename S>
struct DocTrace {
  bool is_text = false;
  // Text front-end (text path only).
  EmbeddingCache text_embed;
  BiLstmCache<S> text_lstm;
  AffineCache<S> text_proj;
  // Stack; for the text path only entries [split, doc_layers) are used.
  std::vector<BiLstmCache<S>> lstms;
  std::vector<DropoutCache<S>> dropouts;  // dropouts[i] follows layer i
  AffineCache<S> proj;
  int rows_before_downsample = 0;
  Matrix<S> encoding;  // T' x output_dim
};

template <typename S>
class KwsModel {
 public:
  // with_text_frontend selects the joint-model parameter set; the baseline
  // has no text front-end at all. Parameter initialization order, and hence
  // every seeded draw, is fixed by construction order.
  KwsModel(const EncoderConfig& cfg, const GraphemeVocab& vocab,
           bool with_text_frontend, uint64_t seed);

  KwsModel(const KwsModel&) = delete;
  KwsModel& operator=(const KwsModel&) = delete;

  const EncoderConfig& Config() const { return cfg_; }
  const GraphemeVocab& Vocab() const { return vocab_; }
  bool HasTextFrontend() const { return text_ != nullptr; }
  const ParameterSet<S>& Params() const { return params_; }

  // --- inference (pure, no dropout) ---
  Matrix<S> EncodeQuery(const std::vector<int>& grapheme_ids) const;
  Matrix<S> EncodeSpeech(const Matrix<S>& features) const;
  Matrix<S> EncodeText(const std::vector<int>& symbol_ids) const;

  // --- training (dropout active when training=true, caches filled) ---
  Matrix<S> EncodeQueryTraced(const std::vector<int>& grapheme_ids,
                              QueryTrace<S>* trace) const;
  Matrix<S> EncodeSpeechTraced(const Matrix<S>& features, bool training, Rng* rng,
                               DocTrace<S>* trace) const;
  Matrix<S> EncodeTextTraced(const std::vector<int>& symbol_ids, bool training,
                             Rng* rng, DocTrace<S>* trace) const;

  // Accumulate parameter gradients; d_* are gradients w.r.t. the encoder
  // outputs. Query backward returns nothing (ids are not differentiable).
  void BackwardQuery(const QueryTrace<S>& trace, const Matrix<S>& d_embedding);
  void BackwardDoc(const DocTrace<S>& trace, const Matrix<S>& d_encoding);

 private:
  Matrix<S> RunDocStack(Matrix<S> x, int first_layer, bool training, Rng* rng,
                        DocTrace<S>* trace) const;
  Matrix<S> BackwardDocStack(const DocTrace<S>& trace, int first_layer,
                             Matrix<S> dx);

  EncoderConfig cfg_;
  GraphemeVocab vocab_;

  Tensor<S> query_embed_;
  std::vector<BiGruParams<S>> query_grus_;
  AffineParams<S> query_proj_;

  std::vector<BiLstmParams<S>> doc_lstms_;
  AffineParams<S> doc_proj_;

  struct TextFrontend {
    Tensor<S> embed;
    BiLstmParams<S> lstm;
    AffineParams<S> proj;
  };
  std::unique_ptr<TextFrontend> text_;

  ParameterSet<S> params_;
};

extern template class KwsModel<float>;
extern template class KwsModel<double>;

// z_n = sigmoid(h_n . e); strictly inside (0, 1).
template <typename S>
std::vector<S> ScoreFrames(const Matrix<S>& doc_encoding, const Matrix<S>& query_embedding);
// Raw dot products, for the training loss.
template <typename S>
std::vector<S> ScoreLogits(const Matrix<S>& doc_encoding, const Matrix<S>& query_embedding);

// Self-contained model checkpoint: parameters plus the vocabulary.
Checkpoint MakeModelCheckpoint(const KwsModel<float>& model, uint64_t step);
// Vocabulary stored in a checkpoint written by MakeModelCheckpoint.
GraphemeVocab VocabFromCheckpoint(const Checkpoint& ckpt);
// Loads parameters for every tensor this model registers (a search-time
// model without the text front-end loads a joint checkpoint fine).
void LoadModelParameters(const Checkpoint& ckpt, KwsModel<float>* model);

}  // namespace kws

#endif  // KWS_MODEL_H_
