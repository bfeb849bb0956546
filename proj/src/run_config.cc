// kws/run_config.cc

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

#include "kws/run_config.h"

#include <charconv>
#include <map>

#include "kws/error.h"
#include "kws/io_util.h"
#include "kws/loss.h"

namespace kws {

namespace {

std::string DoubleToString(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

int ToInt(const std::string& v, const std::string& key) {
  const int64_t parsed = ParseInt(v, key);
  if (parsed < INT32_MIN || parsed > INT32_MAX) {
    throw ConfigError("value out of range for " + key);
  }
  return static_cast<int>(parsed);
}

}  // namespace

RunConfig RunConfig::Parse(const std::vector<std::string>& lines,
                           const std::string& origin) {
  std::map<std::string, std::string> kv;
  for (const std::string& raw : lines) {
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(origin + ": duplicate key '" + key + "'");
    }
  }

  RunConfig cfg;
  auto take = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };

  if (const auto* v = take("preset")) cfg.preset = *v;
  if (cfg.preset == "desk") {
    cfg.encoder = EncoderConfig::Desk();
  } else if (cfg.preset == "paper") {
    cfg.encoder = EncoderConfig::Paper();
  } else {
    throw ConfigError(origin + ": preset must be 'desk' or 'paper'");
  }

  static const std::map<std::string, int> kKnown = {
      {"mode", 0}, {"preset", 0}, {"feature_dim", 0}, {"query_embed_dim", 0},
      {"query_gru_layers", 0}, {"query_gru_hidden", 0}, {"doc_layers", 0},
      {"doc_hidden", 0}, {"shared_layers", 0}, {"downsample_after", 0},
      {"downsample_factor", 0}, {"dropout", 0}, {"output_dim", 0},
      {"text_embed_dim", 0}, {"text_lstm_hidden", 0}, {"paired_dir", 0},
      {"unpaired_text", 0}, {"dev_dir", 0}, {"dev_keywords", 0}, {"steps", 0},
      {"seed", 0}, {"queries_per_step", 0}, {"docs_per_query_audio", 0},
      {"docs_per_query_text", 0}, {"phi", 0}, {"lambda", 0}, {"mask_prob", 0},
      {"repeat", 0}, {"duration_table", 0}, {"learning_rate", 0}, {"lr_halflife", 0},
      {"clip_norm", 0}, {"loss_reduction", 0}, {"checkpoint_interval", 0},
      {"dev_interval", 0}, {"threshold", 0}, {"kst_beta", 0}, {"resume", 0},
      {"out_dir", 0}};
  for (const auto& [key, value] : kv) {
    if (!kKnown.count(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  }

  if (const auto* v = take("mode")) cfg.mode = *v;
  if (const auto* v = take("feature_dim")) cfg.encoder.feature_dim = ToInt(*v, "feature_dim");
  if (const auto* v = take("query_embed_dim")) cfg.encoder.query_embed_dim = ToInt(*v, "query_embed_dim");
  if (const auto* v = take("query_gru_layers")) cfg.encoder.query_gru_layers = ToInt(*v, "query_gru_layers");
  if (const auto* v = take("query_gru_hidden")) cfg.encoder.query_gru_hidden = ToInt(*v, "query_gru_hidden");
  if (const auto* v = take("doc_layers")) cfg.encoder.doc_layers = ToInt(*v, "doc_layers");
  if (const auto* v = take("doc_hidden")) cfg.encoder.doc_hidden = ToInt(*v, "doc_hidden");
  if (const auto* v = take("shared_layers")) cfg.encoder.shared_layers = ToInt(*v, "shared_layers");
  if (const auto* v = take("downsample_after")) cfg.encoder.downsample_after = ToInt(*v, "downsample_after");
  if (const auto* v = take("downsample_factor")) cfg.encoder.downsample_factor = ToInt(*v, "downsample_factor");
  if (const auto* v = take("dropout")) cfg.encoder.dropout = ParseDouble(*v, "dropout");
  if (const auto* v = take("output_dim")) cfg.encoder.output_dim = ToInt(*v, "output_dim");
  if (const auto* v = take("text_embed_dim")) cfg.encoder.text_embed_dim = ToInt(*v, "text_embed_dim");
  if (const auto* v = take("text_lstm_hidden")) cfg.encoder.text_lstm_hidden = ToInt(*v, "text_lstm_hidden");
  if (const auto* v = take("paired_dir")) cfg.paired_dir = *v;
  if (const auto* v = take("unpaired_text")) cfg.unpaired_text = *v;
  if (const auto* v = take("dev_dir")) cfg.dev_dir = *v;
  if (const auto* v = take("dev_keywords")) cfg.dev_keywords = *v;
  if (const auto* v = take("steps")) cfg.steps = ParseInt(*v, "steps");
  if (const auto* v = take("seed")) cfg.seed = static_cast<uint64_t>(ParseInt(*v, "seed"));
  if (const auto* v = take("queries_per_step")) cfg.queries_per_step = ToInt(*v, "queries_per_step");
  if (const auto* v = take("docs_per_query_audio")) cfg.docs_per_query_audio = ToInt(*v, "docs_per_query_audio");
  if (const auto* v = take("docs_per_query_text")) cfg.docs_per_query_text = ToInt(*v, "docs_per_query_text");
  if (const auto* v = take("phi")) cfg.phi = ParseDouble(*v, "phi");
  if (const auto* v = take("lambda")) cfg.lambda = ParseDouble(*v, "lambda");
  if (const auto* v = take("mask_prob")) cfg.mask_prob = ParseDouble(*v, "mask_prob");
  if (const auto* v = take("repeat")) cfg.repeat = ToInt(*v, "repeat");
  if (const auto* v = take("duration_table")) cfg.duration_table = *v;
  if (const auto* v = take("learning_rate")) cfg.learning_rate = ParseDouble(*v, "learning_rate");
  if (const auto* v = take("lr_halflife")) cfg.lr_halflife = ParseInt(*v, "lr_halflife");
  if (const auto* v = take("clip_norm")) cfg.clip_norm = ParseDouble(*v, "clip_norm");
  if (const auto* v = take("loss_reduction")) cfg.loss_reduction = *v;
  if (const auto* v = take("checkpoint_interval")) cfg.checkpoint_interval = ParseInt(*v, "checkpoint_interval");
  if (const auto* v = take("dev_interval")) cfg.dev_interval = ParseInt(*v, "dev_interval");
  if (const auto* v = take("threshold")) cfg.threshold = ParseDouble(*v, "threshold");
  if (const auto* v = take("kst_beta")) cfg.kst_beta = ParseDouble(*v, "kst_beta");
  if (const auto* v = take("resume")) cfg.resume = *v;
  if (const auto* v = take("out_dir")) cfg.out_dir = *v;

  cfg.Validate();
  return cfg;
}

RunConfig RunConfig::Load(const std::string& path) {
  try {
    return Parse(ReadLines(path), path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

std::string RunConfig::Emit() const {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  put("mode", mode);
  put("preset", preset);
  put("feature_dim", std::to_string(encoder.feature_dim));
  put("query_embed_dim", std::to_string(encoder.query_embed_dim));
  put("query_gru_layers", std::to_string(encoder.query_gru_layers));
  put("query_gru_hidden", std::to_string(encoder.query_gru_hidden));
  put("doc_layers", std::to_string(encoder.doc_layers));
  put("doc_hidden", std::to_string(encoder.doc_hidden));
  put("shared_layers", std::to_string(encoder.shared_layers));
  put("downsample_after", std::to_string(encoder.downsample_after));
  put("downsample_factor", std::to_string(encoder.downsample_factor));
  put("dropout", DoubleToString(encoder.dropout));
  put("output_dim", std::to_string(encoder.output_dim));
  put("text_embed_dim", std::to_string(encoder.text_embed_dim));
  put("text_lstm_hidden", std::to_string(encoder.text_lstm_hidden));
  put("paired_dir", paired_dir);
  put("unpaired_text", unpaired_text);
  put("dev_dir", dev_dir);
  put("dev_keywords", dev_keywords);
  put("steps", std::to_string(steps));
  put("seed", std::to_string(seed));
  put("queries_per_step", std::to_string(queries_per_step));
  put("docs_per_query_audio", std::to_string(docs_per_query_audio));
  put("docs_per_query_text", std::to_string(docs_per_query_text));
  put("phi", DoubleToString(phi));
  put("lambda", DoubleToString(lambda));
  put("mask_prob", DoubleToString(mask_prob));
  put("repeat", std::to_string(repeat));
  put("duration_table", duration_table);
  put("learning_rate", DoubleToString(learning_rate));
  put("lr_halflife", std::to_string(lr_halflife));
  put("clip_norm", DoubleToString(clip_norm));
  put("loss_reduction", loss_reduction);
  put("checkpoint_interval", std::to_string(checkpoint_interval));
  put("dev_interval", std::to_string(dev_interval));
  put("threshold", DoubleToString(threshold));
  put("kst_beta", DoubleToString(kst_beta));
  put("resume", resume);
  put("out_dir", out_dir);
  return out;
}

void RunConfig::Validate() const {
  if (mode != "baseline" && mode != "joint") {
    throw ConfigError("mode must be 'baseline' or 'joint'");
  }
  encoder.Validate();
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (queries_per_step < 1) throw ConfigError("queries_per_step must be >= 1");
  if (docs_per_query_audio < 1 || docs_per_query_text < 1) {
    throw ConfigError("docs_per_query_* must be >= 1");
  }
  LossConfig{phi, lambda}.Validate();
  if (mask_prob < 0.0 || mask_prob > 1.0) throw ConfigError("mask_prob must be in [0, 1]");
  if (repeat < 1) throw ConfigError("repeat must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (lr_halflife < 0) throw ConfigError("lr_halflife must be >= 0");
  if (loss_reduction != "mean" && loss_reduction != "sum") {
    throw ConfigError("loss_reduction must be 'mean' or 'sum'");
  }
  if (checkpoint_interval < 1) throw ConfigError("checkpoint_interval must be >= 1");
  if (dev_interval < 0) throw ConfigError("dev_interval must be >= 0");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("threshold must lie in (0, 1)");
  }
  if (kst_beta <= 1.0) throw ConfigError("kst_beta must be > 1");
}

bool RunConfig::operator==(const RunConfig& o) const {
  return mode == o.mode && preset == o.preset && encoder == o.encoder &&
         paired_dir == o.paired_dir && unpaired_text == o.unpaired_text &&
         dev_dir == o.dev_dir && dev_keywords == o.dev_keywords &&
         steps == o.steps && seed == o.seed &&
         queries_per_step == o.queries_per_step &&
         docs_per_query_audio == o.docs_per_query_audio &&
         docs_per_query_text == o.docs_per_query_text && phi == o.phi &&
         lambda == o.lambda && mask_prob == o.mask_prob && repeat == o.repeat &&
         duration_table == o.duration_table &&
         learning_rate == o.learning_rate && lr_halflife == o.lr_halflife &&
         clip_norm == o.clip_norm &&
         loss_reduction == o.loss_reduction &&
         checkpoint_interval == o.checkpoint_interval &&
         dev_interval == o.dev_interval && threshold == o.threshold &&
         kst_beta == o.kst_beta && resume == o.resume && out_dir == o.out_dir;
}

}  // namespace kws
