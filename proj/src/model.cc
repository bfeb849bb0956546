// kws/model.cc

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

#include "kws/model.h"

#include <stdexcept>

#include "kws/error.h"
#include "kws/kernels.h"

namespace kws {

EncoderConfig EncoderConfig::Desk() {
  EncoderConfig c;
  c.feature_dim = 8;
  c.query_embed_dim = 16;
  c.query_gru_layers = 1;
  c.query_gru_hidden = 32;
  c.doc_layers = 2;
  c.doc_hidden = 64;
  c.shared_layers = 2;
  c.downsample_after = 1;
  c.downsample_factor = 2;
  c.dropout = 0.4;
  c.output_dim = 64;
  c.text_embed_dim = 16;
  c.text_lstm_hidden = 32;
  return c;
}

void EncoderConfig::Validate() const {
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (query_embed_dim < 1 || query_gru_layers < 1 || query_gru_hidden < 1) {
    throw ConfigError("query encoder sizes must be >= 1");
  }
  if (doc_layers < 1 || doc_hidden < 1 || output_dim < 1) {
    throw ConfigError("document encoder sizes must be >= 1");
  }
  if (shared_layers < 0 || shared_layers > doc_layers) {
    throw ConfigError("shared_layers must lie in [0, doc_layers]");
  }
  if (downsample_after < 0 || downsample_after > doc_layers) {
    throw ConfigError("downsample_after must lie in [0, doc_layers]");
  }
  if (downsample_factor < 2) throw ConfigError("downsample_factor must be >= 2");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (text_embed_dim < 1 || text_lstm_hidden < 1) {
    throw ConfigError("text front-end sizes must be >= 1");
  }
}

GraphemeVocab::GraphemeVocab(std::vector<Grapheme> symbols)
    : symbols_(std::move(symbols)) {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == kMaskSymbol) {
      throw DataError("the grapheme set may not contain the mask symbol '_'");
    }
    if (!index_.emplace(symbols_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate grapheme in vocabulary: '" +
                      Utf8Encode(symbols_[i]) + "'");
    }
  }
}

int GraphemeVocab::IdOf(Grapheme g, bool allow_mask) const {
  if (g == kMaskSymbol) {
    if (allow_mask) return MaskId();
    throw VocabularyError("the mask symbol may not appear in a query");
  }
  auto it = index_.find(g);
  if (it == index_.end()) {
    throw VocabularyError("grapheme '" + Utf8Encode(g) + "' is not in the vocabulary");
  }
  return it->second;
}

std::vector<int> GraphemeVocab::Encode(const std::vector<Grapheme>& symbols,
                                       bool allow_mask) const {
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (Grapheme g : symbols) ids.push_back(IdOf(g, allow_mask));
  return ids;
}

template <typename S>
KwsModel<S>::KwsModel(const EncoderConfig& cfg, const GraphemeVocab& vocab,
                      bool with_text_frontend, uint64_t seed)
    : cfg_(cfg), vocab_(vocab) {
  cfg_.Validate();
  if (vocab_.Size() < 1) throw ConfigError("the grapheme vocabulary is empty");
  Rng rng(seed);

  query_embed_.Resize(vocab_.Size(), cfg_.query_embed_dim);
  query_embed_.InitUniform(cfg_.query_embed_dim, &rng);
  params_.Register("query.embed", &query_embed_);
  query_grus_.resize(cfg_.query_gru_layers);
  int in_dim = cfg_.query_embed_dim;
  for (int i = 0; i < cfg_.query_gru_layers; ++i) {
    query_grus_[i].Init(in_dim, cfg_.query_gru_hidden, &rng);
    const std::string base = "query.gru" + std::to_string(i);
    for (auto [dir, p] : {std::pair{".fwd", &query_grus_[i].fwd},
                          std::pair{".bwd", &query_grus_[i].bwd}}) {
      params_.Register(base + dir + ".wx", &p->wx);
      params_.Register(base + dir + ".wh_gates", &p->wh_gates);
      params_.Register(base + dir + ".wh_cand", &p->wh_cand);
      params_.Register(base + dir + ".b", &p->b);
    }
    in_dim = 2 * cfg_.query_gru_hidden;
  }
  query_proj_.Init(in_dim, cfg_.output_dim, &rng);
  params_.Register("query.proj.w", &query_proj_.w);
  params_.Register("query.proj.b", &query_proj_.b);

  doc_lstms_.resize(cfg_.doc_layers);
  in_dim = cfg_.feature_dim;
  for (int i = 0; i < cfg_.doc_layers; ++i) {
    doc_lstms_[i].Init(in_dim, cfg_.doc_hidden, &rng);
    const std::string base = "doc.blstm" + std::to_string(i);
    for (auto [dir, p] : {std::pair{".fwd", &doc_lstms_[i].fwd},
                          std::pair{".bwd", &doc_lstms_[i].bwd}}) {
      params_.Register(base + dir + ".wx", &p->wx);
      params_.Register(base + dir + ".wh", &p->wh);
      params_.Register(base + dir + ".b", &p->b);
    }
    in_dim = 2 * cfg_.doc_hidden;
  }
  doc_proj_.Init(in_dim, cfg_.output_dim, &rng);
  params_.Register("doc.proj.w", &doc_proj_.w);
  params_.Register("doc.proj.b", &doc_proj_.b);

  if (with_text_frontend) {
    text_ = std::make_unique<TextFrontend>();
    text_->embed.Resize(vocab_.Size() + 1, cfg_.text_embed_dim);  // + mask row
    text_->embed.InitUniform(cfg_.text_embed_dim, &rng);
    params_.Register("text.embed", &text_->embed);
    text_->lstm.Init(cfg_.text_embed_dim, cfg_.text_lstm_hidden, &rng);
    for (auto [dir, p] : {std::pair{".fwd", &text_->lstm.fwd},
                          std::pair{".bwd", &text_->lstm.bwd}}) {
      params_.Register(std::string("text.blstm0") + dir + ".wx", &p->wx);
      params_.Register(std::string("text.blstm0") + dir + ".wh", &p->wh);
      params_.Register(std::string("text.blstm0") + dir + ".b", &p->b);
    }
    text_->proj.Init(2 * cfg_.text_lstm_hidden, cfg_.SharedInputDim(), &rng);
    params_.Register("text.proj.w", &text_->proj.w);
    params_.Register("text.proj.b", &text_->proj.b);
  }
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeQueryTraced(const std::vector<int>& grapheme_ids,
                                         QueryTrace<S>* trace) const {
  if (grapheme_ids.empty()) throw std::invalid_argument("empty query");
  Matrix<S> x = EmbeddingForward(query_embed_, grapheme_ids,
                                 trace ? &trace->embed : nullptr);
  if (trace != nullptr) {
    trace->frames = x.Rows();
    trace->grus.resize(query_grus_.size());
  }
  for (size_t i = 0; i < query_grus_.size(); ++i) {
    x = BiGruForward(query_grus_[i], x, trace ? &trace->grus[i] : nullptr);
  }
  x = AffineForward(query_proj_, x, trace ? &trace->proj : nullptr);
  Matrix<S> e = SumOverTime(x);
  if (trace != nullptr) trace->embedding = e;
  return e;
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeQuery(const std::vector<int>& grapheme_ids) const {
  return EncodeQueryTraced(grapheme_ids, nullptr);
}

template <typename S>
void KwsModel<S>::BackwardQuery(const QueryTrace<S>& trace, const Matrix<S>& d_embedding) {
  Matrix<S> dx = SumOverTimeBackward(d_embedding, trace.proj.x.Rows());
  dx = AffineBackward(&query_proj_, trace.proj, dx);
  for (size_t i = query_grus_.size(); i-- > 0;) {
    dx = BiGruBackward(&query_grus_[i], trace.grus[i], dx);
  }
  EmbeddingBackward(&query_embed_, trace.embed, dx);
}

template <typename S>
Matrix<S> KwsModel<S>::RunDocStack(Matrix<S> x, int first_layer, bool training,
                                   Rng* rng, DocTrace<S>* trace) const {
  if (trace != nullptr) {
    trace->lstms.resize(cfg_.doc_layers);
    trace->dropouts.resize(cfg_.doc_layers);
    trace->rows_before_downsample = 0;
  }
  for (int i = first_layer; i < cfg_.doc_layers; ++i) {
    x = BiLstmForward(doc_lstms_[i], x, trace ? &trace->lstms[i] : nullptr);
    if (cfg_.downsample_after == i + 1) {
      if (trace != nullptr) trace->rows_before_downsample = x.Rows();
      x = DownsampleForward(x, cfg_.downsample_factor);
    }
    const bool between_layers = (i + 1 < cfg_.doc_layers);
    if (between_layers) {
      DropoutCache<S> scratch;
      DropoutCache<S>* cache = trace ? &trace->dropouts[i] : &scratch;
      x = DropoutForward(x, cfg_.dropout, rng, training, cache);
    }
  }
  x = AffineForward(doc_proj_, x, trace ? &trace->proj : nullptr);
  return x;
}

template <typename S>
Matrix<S> KwsModel<S>::BackwardDocStack(const DocTrace<S>& trace, int first_layer,
                                        Matrix<S> dx) {
  dx = AffineBackward(&doc_proj_, trace.proj, dx);
  for (int i = cfg_.doc_layers - 1; i >= first_layer; --i) {
    if (i + 1 < cfg_.doc_layers) {
      dx = DropoutBackward(trace.dropouts[i], dx);
    }
    if (cfg_.downsample_after == i + 1) {
      dx = DownsampleBackward(dx, trace.rows_before_downsample, cfg_.downsample_factor);
    }
    dx = BiLstmBackward(&doc_lstms_[i], trace.lstms[i], dx);
  }
  return dx;
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeSpeechTraced(const Matrix<S>& features, bool training,
                                          Rng* rng, DocTrace<S>* trace) const {
  if (features.Cols() != cfg_.feature_dim) {
    throw ConfigError("feature dim " + std::to_string(features.Cols()) +
                      " does not match the configured input dim " +
                      std::to_string(cfg_.feature_dim));
  }
  if (features.Rows() < 1) throw std::invalid_argument("empty feature matrix");
  if (trace != nullptr) trace->is_text = false;
  Matrix<S> enc = RunDocStack(features, 0, training, rng, trace);
  if (trace != nullptr) trace->encoding = enc;
  return enc;
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeSpeech(const Matrix<S>& features) const {
  return EncodeSpeechTraced(features, /*training=*/false, nullptr, nullptr);
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeTextTraced(const std::vector<int>& symbol_ids,
                                        bool training, Rng* rng,
                                        DocTrace<S>* trace) const {
  if (text_ == nullptr) {
    throw ConfigError("this model was built without a text front-end");
  }
  if (symbol_ids.empty()) throw std::invalid_argument("empty text document");
  if (trace != nullptr) trace->is_text = true;
  Matrix<S> x = EmbeddingForward(text_->embed, symbol_ids,
                                 trace ? &trace->text_embed : nullptr);
  x = BiLstmForward(text_->lstm, x, trace ? &trace->text_lstm : nullptr);
  x = AffineForward(text_->proj, x, trace ? &trace->text_proj : nullptr);
  Matrix<S> enc = RunDocStack(std::move(x), cfg_.SpeechOnlyLayers(), training, rng, trace);
  if (trace != nullptr) trace->encoding = enc;
  return enc;
}

template <typename S>
Matrix<S> KwsModel<S>::EncodeText(const std::vector<int>& symbol_ids) const {
  return EncodeTextTraced(symbol_ids, /*training=*/false, nullptr, nullptr);
}

template <typename S>
void KwsModel<S>::BackwardDoc(const DocTrace<S>& trace, const Matrix<S>& d_encoding) {
  const int first_layer = trace.is_text ? cfg_.SpeechOnlyLayers() : 0;
  Matrix<S> dx = BackwardDocStack(trace, first_layer, d_encoding);
  if (trace.is_text) {
    dx = AffineBackward(&text_->proj, trace.text_proj, dx);
    dx = BiLstmBackward(&text_->lstm, trace.text_lstm, dx);
    EmbeddingBackward(&text_->embed, trace.text_embed, dx);
  }
  // Speech inputs are fixed features; their gradient is dropped.
}

template class KwsModel<float>;
template class KwsModel<double>;

template <typename S>
std::vector<S> ScoreLogits(const Matrix<S>& doc_encoding, const Matrix<S>& query_embedding) {
  if (doc_encoding.Cols() != query_embedding.Cols() || query_embedding.Rows() != 1) {
    throw std::invalid_argument("encoding/embedding dimension mismatch");
  }
  std::vector<S> logits(doc_encoding.Rows());
  RowDot(doc_encoding, query_embedding.Row(0), logits.data());
  return logits;
}

template <typename S>
std::vector<S> ScoreFrames(const Matrix<S>& doc_encoding, const Matrix<S>& query_embedding) {
  std::vector<S> z = ScoreLogits(doc_encoding, query_embedding);
  for (S& v : z) v = Sigmoid(v);
  return z;
}

template std::vector<float> ScoreLogits<float>(const Matrix<float>&, const Matrix<float>&);
template std::vector<double> ScoreLogits<double>(const Matrix<double>&, const Matrix<double>&);
template std::vector<float> ScoreFrames<float>(const Matrix<float>&, const Matrix<float>&);
template std::vector<double> ScoreFrames<double>(const Matrix<double>&, const Matrix<double>&);

Checkpoint MakeModelCheckpoint(const KwsModel<float>& model, uint64_t step) {
  Checkpoint ckpt;
  ckpt.step = step;
  AppendParameters(model.Params(), "", &ckpt);
  std::vector<uint64_t> vocab;
  for (Grapheme g : model.Vocab().Symbols()) vocab.push_back(static_cast<uint64_t>(g));
  ckpt.extras.emplace_back("vocab", std::move(vocab));
  return ckpt;
}

GraphemeVocab VocabFromCheckpoint(const Checkpoint& ckpt) {
  const std::vector<uint64_t>* vocab = ckpt.FindExtra("vocab");
  if (vocab == nullptr) throw DataError("checkpoint has no vocabulary record");
  std::vector<Grapheme> symbols;
  symbols.reserve(vocab->size());
  for (uint64_t v : *vocab) symbols.push_back(static_cast<Grapheme>(v));
  return GraphemeVocab(std::move(symbols));
}

void LoadModelParameters(const Checkpoint& ckpt, KwsModel<float>* model) {
  if (!(VocabFromCheckpoint(ckpt) == model->Vocab())) {
    throw DataError("checkpoint vocabulary does not match the model");
  }
  LoadParameters(ckpt, "", model->Params());
}

}  // namespace kws
