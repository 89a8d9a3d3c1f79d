// Copyright 2026 The ECSP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecsp/trainer.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ecsp/rng.h"
#include "json.hpp"

namespace ecsp {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration.

const std::vector<RegimePreset> &RegimePresets() {
  static const std::vector<RegimePreset> kPresets = {
      {"balanced", 1.0, 1.0, 1.0},
      {"single-task", 1.0, 0.1, 0.1},
      {"trigger", 1.0, 0.1, 0.1},
      {"event-maven", 1.0, 0.1, 0.1},
      {"event-onto", 0.1, 1.0, 0.1},
      {"temporal", 1.0, 0.1, 0.1},
      {"causal", 1.0, 0.1, 0.1},
      {"subevent", 1.0, 0.1, 0.08},
      {"+joint", 1.0, 1.0, 4.0},
      {"all-joint", 0.1, 0.1, 1.0},
  };
  return kPresets;
}

const RegimePreset &FindRegime(const std::string &name) {
  for (const RegimePreset &p : RegimePresets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const RegimePreset &p : RegimePresets()) known += " " + p.name;
  throw ConfigError("unknown regime '" + name + "' (known:" + known + ")");
}

void TrainConfig::ApplyRegime(const std::string &name) {
  const RegimePreset &p = FindRegime(name);
  regime = p.name;
  weights.lambda_token = p.lambda_token;
  weights.lambda_sentence = p.lambda_sentence;
  weights.lambda_document = p.lambda_document;
}

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (mention_cap < 2) throw ConfigError("mention_cap must be >= 2");
  if (max_length < 1) throw ConfigError("max_length must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("radius must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 &&
        adam_beta2 < 1.0 && adam_eps > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw ConfigError("holdout_fraction must lie in [0, 1)");
  }
  FindRegime(regime);
  weights.Validate();
  encoder.Validate();
}

KeyValues TrainConfig::ToKeyValues() const {
  KeyValues kv;
  kv["lr"] = FormatDouble(lr);
  kv["adam_beta1"] = FormatDouble(adam_beta1);
  kv["adam_beta2"] = FormatDouble(adam_beta2);
  kv["adam_eps"] = FormatDouble(adam_eps);
  kv["epochs"] = std::to_string(epochs);
  kv["batch_size"] = std::to_string(batch_size);
  kv["seed"] = std::to_string(seed);
  kv["regime"] = regime;
  kv["mu_token"] = FormatDouble(weights.mu_token);
  kv["mu_sentence"] = FormatDouble(weights.mu_sentence);
  kv["mu_document"] = FormatDouble(weights.mu_document);
  kv["lambda_token"] = FormatDouble(weights.lambda_token);
  kv["lambda_sentence"] = FormatDouble(weights.lambda_sentence);
  kv["lambda_document"] = FormatDouble(weights.lambda_document);
  kv["l2_coeff"] = FormatDouble(weights.l2_coeff);
  kv["cost"] = CostKindName(cost);
  kv["clip_norm"] = FormatDouble(clip_norm);
  kv["alternating"] = alternating ? "true" : "false";
  kv["eval_every"] = std::to_string(eval_every);
  kv["mention_cap"] = std::to_string(mention_cap);
  kv["max_length"] = std::to_string(max_length);
  kv["embed_dim"] = std::to_string(encoder.embed_dim);
  kv["mix_layers"] = std::to_string(encoder.mix_layers);
  kv["backbone"] = BackboneName(encoder.backbone);
  kv["radius"] = FormatDouble(radius);
  kv["per_class_radius"] = per_class_radius ? "true" : "false";
  kv["train_path"] = train_path;
  kv["valid_path"] = valid_path;
  kv["test_path"] = test_path;
  kv["synthetic"] = synthetic ? "true" : "false";
  kv["synth_docs"] = std::to_string(synthesis.n_docs);
  kv["synth_classes"] = std::to_string(synthesis.n_classes);
  kv["synth_relations"] = std::to_string(synthesis.n_relations);
  kv["synth_vocab"] = std::to_string(synthesis.vocab_size);
  kv["synth_mentions"] = std::to_string(synthesis.mentions_per_doc);
  kv["synth_seed"] = std::to_string(synthesis.seed);
  kv["synth_min_tokens"] = std::to_string(synthesis.min_tokens);
  kv["synth_max_tokens"] = std::to_string(synthesis.max_tokens);
  kv["synth_keep_prob"] = FormatDouble(synthesis.relation_keep_prob);
  kv["holdout_fraction"] = FormatDouble(holdout_fraction);
  return kv;
}

TrainConfig TrainConfig::FromKeyValues(const KeyValues &kv) {
  TrainConfig c;
  if (auto it = kv.find("regime"); it != kv.end()) c.ApplyRegime(it->second);
  auto as_int = [](const std::string &k, const std::string &v) {
    return static_cast<int>(ParseInt(k, v));
  };
  for (const auto &[k, v] : kv) {
    if (k == "regime") continue;
    if (k == "lr") c.lr = ParseDouble(k, v);
    else if (k == "adam_beta1") c.adam_beta1 = ParseDouble(k, v);
    else if (k == "adam_beta2") c.adam_beta2 = ParseDouble(k, v);
    else if (k == "adam_eps") c.adam_eps = ParseDouble(k, v);
    else if (k == "epochs") c.epochs = as_int(k, v);
    else if (k == "batch_size") c.batch_size = as_int(k, v);
    else if (k == "seed") c.seed = ParseUnsigned(k, v);
    else if (k == "mu_token") c.weights.mu_token = ParseDouble(k, v);
    else if (k == "mu_sentence") c.weights.mu_sentence = ParseDouble(k, v);
    else if (k == "mu_document") c.weights.mu_document = ParseDouble(k, v);
    else if (k == "lambda_token") c.weights.lambda_token = ParseDouble(k, v);
    else if (k == "lambda_sentence") c.weights.lambda_sentence = ParseDouble(k, v);
    else if (k == "lambda_document") c.weights.lambda_document = ParseDouble(k, v);
    else if (k == "l2_coeff") c.weights.l2_coeff = ParseDouble(k, v);
    else if (k == "cost") c.cost = ParseCostKind(v);
    else if (k == "clip_norm") c.clip_norm = ParseDouble(k, v);
    else if (k == "alternating") c.alternating = ParseBool(k, v);
    else if (k == "eval_every") c.eval_every = as_int(k, v);
    else if (k == "mention_cap") c.mention_cap = as_int(k, v);
    else if (k == "max_length") c.max_length = as_int(k, v);
    else if (k == "embed_dim") c.encoder.embed_dim = as_int(k, v);
    else if (k == "mix_layers") c.encoder.mix_layers = as_int(k, v);
    else if (k == "backbone") c.encoder.backbone = ParseBackbone(v);
    else if (k == "radius") c.radius = ParseDouble(k, v);
    else if (k == "per_class_radius") c.per_class_radius = ParseBool(k, v);
    else if (k == "train_path") c.train_path = v;
    else if (k == "valid_path") c.valid_path = v;
    else if (k == "test_path") c.test_path = v;
    else if (k == "synthetic") c.synthetic = ParseBool(k, v);
    else if (k == "synth_docs") c.synthesis.n_docs = as_int(k, v);
    else if (k == "synth_classes") c.synthesis.n_classes = as_int(k, v);
    else if (k == "synth_relations") c.synthesis.n_relations = as_int(k, v);
    else if (k == "synth_vocab") c.synthesis.vocab_size = as_int(k, v);
    else if (k == "synth_mentions") c.synthesis.mentions_per_doc = as_int(k, v);
    else if (k == "synth_seed") c.synthesis.seed = ParseUnsigned(k, v);
    else if (k == "synth_min_tokens") c.synthesis.min_tokens = as_int(k, v);
    else if (k == "synth_max_tokens") c.synthesis.max_tokens = as_int(k, v);
    else if (k == "synth_keep_prob") c.synthesis.relation_keep_prob = ParseDouble(k, v);
    else if (k == "holdout_fraction") c.holdout_fraction = ParseDouble(k, v);
    else throw ConfigError("unknown config key '" + k + "'");
  }
  c.encoder.seed = c.seed;
  return c;
}

// ---------------------------------------------------------------------------
// Checkpoints.

std::string SerializeCheckpoint(const Checkpoint &ck) {
  ordered_json j;
  j["format"] = "ecsp-checkpoint";
  j["version"] = kCheckpointVersion;
  ordered_json config = ordered_json::object();
  for (const auto &[k, v] : ck.config.ToKeyValues()) config[k] = v;
  j["config"] = std::move(config);
  j["event_classes"] = ck.spaces.event_classes();
  j["relations"] = ck.spaces.relations();
  j["vocab"] = ck.vocab.words();
  ordered_json tensors = ordered_json::array();
  for (const NamedTensor &t : ck.params.Tensors()) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["rows"] = t.rows;
    jt["cols"] = t.cols;
    jt["data"] = std::vector<double>(t.data, t.data + t.rows * t.cols);
    tensors.push_back(std::move(jt));
  }
  j["tensors"] = std::move(tensors);
  return j.dump() + "\n";
}

Checkpoint ParseCheckpoint(const std::string &text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ecsp-checkpoint") {
      throw CheckpointError("not an ecsp checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " +
                            std::to_string(version));
    }
    KeyValues kv;
    for (auto it = j.at("config").begin(); it != j.at("config").end(); ++it) {
      kv[it.key()] = it.value().get<std::string>();
    }
    Checkpoint ck;
    ck.config = TrainConfig::FromKeyValues(kv);
    ck.spaces = LabelSpaces(j.at("event_classes").get<std::vector<std::string>>(),
                            j.at("relations").get<std::vector<std::string>>());
    auto words = j.at("vocab").get<std::vector<std::string>>();
    if (words.size() < 2 || words[Vocabulary::kPad] != Vocabulary::kPadToken ||
        words[Vocabulary::kOov] != Vocabulary::kOovToken) {
      throw CheckpointError("checkpoint vocabulary lacks reserved entries");
    }
    ck.vocab = Vocabulary(std::vector<std::string>(words.begin() + 2, words.end()));
    if (ck.vocab.size() != static_cast<int>(words.size())) {
      throw CheckpointError("checkpoint vocabulary has duplicates");
    }
    ck.params = ModelParams::Init(ck.spaces, ck.vocab.size(), ck.config.encoder,
                                  ck.config.radius);
    std::vector<NamedTensor> expected = ck.params.Tensors();
    const auto &tensors = j.at("tensors");
    if (tensors.size() != expected.size()) {
      throw CheckpointError("checkpoint has " + std::to_string(tensors.size()) +
                            " tensors, model expects " +
                            std::to_string(expected.size()));
    }
    for (size_t k = 0; k < expected.size(); ++k) {
      const auto &jt = tensors[k];
      NamedTensor &t = expected[k];
      const auto name = jt.at("name").get<std::string>();
      const auto rows = jt.at("rows").get<Eigen::Index>();
      const auto cols = jt.at("cols").get<Eigen::Index>();
      if (name != t.name || rows != t.rows || cols != t.cols) {
        throw CheckpointError("incompatible tensor '" + name + "' (" +
                              std::to_string(rows) + "x" + std::to_string(cols) +
                              "), expected '" + t.name + "' (" +
                              std::to_string(t.rows) + "x" +
                              std::to_string(t.cols) + ")");
      }
      const auto &data = jt.at("data");
      if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw CheckpointError("tensor '" + name + "' has wrong element count");
      }
      for (Eigen::Index i = 0; i < rows * cols; ++i) {
        if (!data[i].is_number()) {
          throw CheckpointError("tensor '" + name + "' has a non-numeric entry");
        }
        t.data[i] = data[i].get<double>();
      }
    }
    return ck;
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  } catch (const ValidationError &e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  } catch (const ConfigError &e) {
    throw CheckpointError(std::string("corrupt checkpoint config: ") + e.what());
  }
}

void SaveCheckpoint(const std::string &path, const Checkpoint &checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << SerializeCheckpoint(checkpoint);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCheckpoint(buffer.str());
}

std::string CheckpointHash(const Checkpoint &checkpoint) {
  const std::string bytes = SerializeCheckpoint(checkpoint);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// ---------------------------------------------------------------------------
// Training log.

std::string TrainingLog::ToCsv() const {
  std::string out =
      "step,L_tok,L_sen,L_doc,penalty,epoch,H_tok,H_sen,H_doc,total\n";
  for (const StepLog &s : steps) {
    const LossBreakdown &l = s.loss;
    out += std::to_string(s.step) + "," + FormatDouble(l.token) + "," +
           FormatDouble(l.sentence) + "," + FormatDouble(l.document) + "," +
           FormatDouble(l.penalty) + "," + std::to_string(s.epoch) + "," +
           FormatDouble(l.token_hinge) + "," + FormatDouble(l.sentence_hinge) +
           "," + FormatDouble(l.document_hinge) + "," + FormatDouble(l.total) +
           "\n";
  }
  return out;
}

void TrainingLog::WriteCsv(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write training log '" + path + "'");
  out << ToCsv();
}

LossSeries ParseLossCsv(const std::string &csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty training log");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      header.push_back(cell);
    }
  }
  auto column = [&](const std::string &name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError("training log lacks column '" + name + "'");
    }
    return static_cast<size_t>(it - header.begin());
  };
  const size_t c_step = column("step"), c_tok = column("L_tok"),
               c_sen = column("L_sen"), c_doc = column("L_doc"),
               c_pen = column("penalty");
  LossSeries s;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw ParseError("training log line " + std::to_string(number) +
                       ": expected " + std::to_string(header.size()) +
                       " cells");
    }
    try {
      s.step.push_back(ParseDouble("step", cells[c_step]));
      s.token.push_back(ParseDouble("L_tok", cells[c_tok]));
      s.sentence.push_back(ParseDouble("L_sen", cells[c_sen]));
      s.document.push_back(ParseDouble("L_doc", cells[c_doc]));
      s.penalty.push_back(ParseDouble("penalty", cells[c_pen]));
    } catch (const ConfigError &e) {
      throw ParseError("training log line " + std::to_string(number) + ": " +
                       e.what());
    }
  }
  if (s.step.empty()) throw ParseError("training log has no rows");
  return s;
}

LossSeries ReadLossCsv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open training log '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseLossCsv(buffer.str());
}

// ---------------------------------------------------------------------------
// Training.

namespace {

class Adam {
 public:
  Adam(const ModelParams &params, const TrainConfig &config)
      : config_(config) {
    for (const NamedTensor &t : params.Tensors()) {
      m_.push_back(Vector::Zero(t.rows * t.cols));
      v_.push_back(Vector::Zero(t.rows * t.cols));
    }
  }

  // Applies one update to the tensors selected by `active`.
  void Step(std::vector<NamedTensor> &values,
            const std::vector<NamedTensor> &grads,
            const std::vector<bool> &active) {
    ++t_;
    const double b1 = config_.adam_beta1, b2 = config_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (size_t k = 0; k < values.size(); ++k) {
      if (!active[k]) continue;
      const auto g = grads[k].flat();
      m_[k] = b1 * m_[k] + (1.0 - b1) * g;
      v_[k] = b2 * v_[k] + (1.0 - b2) * g.cwiseAbs2();
      auto value = values[k].flat();
      value.array() -= config_.lr * (m_[k].array() / c1) /
                       ((v_[k].array() / c2).sqrt() + config_.adam_eps);
    }
  }

 private:
  const TrainConfig &config_;
  std::vector<Vector> m_, v_;
  int64_t t_ = 0;
};

void Accumulate(LossBreakdown *acc, const LossBreakdown &l) {
  acc->token += l.token;
  acc->sentence += l.sentence;
  acc->document += l.document;
  acc->penalty += l.penalty;
  acc->total += l.total;
  acc->token_hinge += l.token_hinge;
  acc->sentence_hinge += l.sentence_hinge;
  acc->document_hinge += l.document_hinge;
  acc->token_ce += l.token_ce;
  acc->sentence_ce += l.sentence_ce;
  acc->document_ce += l.document_ce;
  acc->mentions += l.mentions;
  acc->pairs += l.pairs;
}

void Scale(LossBreakdown *acc, double s) {
  for (double *v : {&acc->token, &acc->sentence, &acc->document, &acc->penalty,
                    &acc->total, &acc->token_hinge, &acc->sentence_hinge,
                    &acc->document_hinge, &acc->token_ce, &acc->sentence_ce,
                    &acc->document_ce}) {
    *v *= s;
  }
}

void CheckSpaces(const std::vector<Document> &docs, const LabelSpaces &spaces) {
  for (const Document &doc : docs) {
    for (const EventMention &m : doc.mentions) {
      if (m.event_class < 0 || m.event_class >= spaces.num_classes()) {
        throw ValidationError("document '" + doc.doc_id +
                              "' has an event class outside the label space");
      }
      if (m.trigger_index < 1 ||
          m.trigger_index > static_cast<int>(m.tokens.size())) {
        throw ValidationError("document '" + doc.doc_id +
                              "' has a trigger index outside its mention");
      }
    }
    for (const RelationAnnotation &r : doc.relations) {
      if (r.label < 0 || r.label >= spaces.num_relations()) {
        throw ValidationError("document '" + doc.doc_id +
                              "' has a relation outside the label space");
      }
    }
  }
}

}  // namespace

TrainResult Train(const std::vector<Document> &train_docs,
                  const LabelSpaces &spaces, const TrainConfig &config,
                  const std::vector<Document> *valid_docs,
                  const std::string &dump_dir) {
  config.Validate();
  Checkpoint ck;
  ck.config = config;
  ck.config.encoder.seed = config.seed;
  ck.spaces = spaces;
  ck.vocab = Vocabulary::Build(train_docs);
  ck.params = ModelParams::Init(spaces, ck.vocab.size(), ck.config.encoder,
                                config.radius);
  return TrainFrom(std::move(ck), train_docs, valid_docs, dump_dir);
}

TrainResult TrainFrom(Checkpoint initial,
                      const std::vector<Document> &train_docs,
                      const std::vector<Document> *valid_docs,
                      const std::string &dump_dir) {
  const TrainConfig &config = initial.config;
  config.Validate();
  if (train_docs.empty()) throw ConfigError("training corpus is empty");
  CheckSpaces(train_docs, initial.spaces);

  TrainResult result;
  result.checkpoint = std::move(initial);
  Checkpoint &ck = result.checkpoint;
  ModelParams &params = ck.params;

  ObjectiveOptions objective;
  objective.weights = config.weights;
  objective.cost = config.cost;
  objective.mention_cap = config.mention_cap;
  objective.radii_trainable = config.per_class_radius;

  Adam adam(params, config);
  Rng rng(config.seed ^ 0xa5a5a5a5ull);
  std::vector<size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  int64_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(order);
    EpochLog epoch_log;
    epoch_log.epoch = epoch;
    int64_t epoch_steps = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      std::vector<const Document *> batch;
      for (size_t k = start; k < end; ++k) batch.push_back(&train_docs[order[k]]);

      ModelParams grads = params.ZerosLike();
      LossBreakdown loss =
          JointLoss(batch, ck.vocab, ck.spaces, params, objective, &grads);
      ++step;
      if (!std::isfinite(loss.total)) {
        std::string ids;
        std::vector<Document> dump;
        for (const Document *d : batch) {
          ids += " " + d->doc_id;
          dump.push_back(*d);
        }
        std::string where;
        if (!dump_dir.empty()) {
          std::filesystem::create_directories(dump_dir);
          const std::string path =
              (std::filesystem::path(dump_dir) / "nan_batch.jsonl").string();
          WriteCorpus(path, dump, ck.spaces);
          where = "; batch written to " + path;
        }
        throw TrainingError(
            "non-finite loss at step " + std::to_string(step) + " (L_tok=" +
            FormatDouble(loss.token) + " L_sen=" + FormatDouble(loss.sentence) +
            " L_doc=" + FormatDouble(loss.document) + " penalty=" +
            FormatDouble(loss.penalty) + ") in documents:" + ids + where);
      }

      std::vector<NamedTensor> values = params.Tensors();
      std::vector<NamedTensor> g = grads.Tensors();
      std::vector<bool> active(values.size());
      for (size_t k = 0; k < values.size(); ++k) {
        const ParamGroup group = values[k].group;
        bool on = group != ParamGroup::kRadius || config.per_class_radius;
        if (config.alternating) {
          const bool energy_phase = step % 2 == 1;
          on = on && ((group == ParamGroup::kEnergy) == energy_phase);
        }
        active[k] = on;
      }
      if (config.clip_norm > 0.0) {
        double sq = 0.0;
        for (size_t k = 0; k < g.size(); ++k) {
          if (active[k]) sq += g[k].flat().squaredNorm();
        }
        const double norm = std::sqrt(sq);
        if (norm > config.clip_norm) {
          const double s = config.clip_norm / norm;
          for (size_t k = 0; k < g.size(); ++k) {
            if (active[k]) g[k].flat() *= s;
          }
        }
      }
      adam.Step(values, g, active);
      if (config.per_class_radius) {
        params.spheres.radii = params.spheres.radii.cwiseMax(1e-3);
      }

      result.log.steps.push_back({step, epoch, loss});
      Accumulate(&epoch_log.loss, loss);
      ++epoch_steps;
    }
    if (epoch_steps > 0) {
      Scale(&epoch_log.loss, 1.0 / static_cast<double>(epoch_steps));
    }
    if (valid_docs != nullptr && !valid_docs->empty() && config.eval_every > 0 &&
        epoch % config.eval_every == 0) {
      epoch_log.trigger_f1 = Evaluate(ck, *valid_docs, Task::kTrigger).f1;
      epoch_log.event_f1 = Evaluate(ck, *valid_docs, Task::kEvent).f1;
      epoch_log.ere_f1 = Evaluate(ck, *valid_docs, Task::kEre).f1;
    }
    result.log.epochs.push_back(epoch_log);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation.

Task ParseTask(const std::string &name) {
  if (name == "trigger") return Task::kTrigger;
  if (name == "event") return Task::kEvent;
  if (name == "ere") return Task::kEre;
  throw ConfigError("unknown task '" + name + "' (trigger|event|ere)");
}

std::string TaskName(Task task) {
  switch (task) {
    case Task::kTrigger:
      return "trigger";
    case Task::kEvent:
      return "event";
    case Task::kEre:
      return "ere";
  }
  return "?";
}

std::set<int> ExcludedLabels(Task task, const LabelSpaces &spaces) {
  switch (task) {
    case Task::kTrigger:
      return {spaces.non_trigger_label(), spaces.padding_label()};
    case Task::kEvent:
      return {spaces.none_class()};
    case Task::kEre:
      return {spaces.na_relation()};
  }
  return {};
}

TaskLabels CollectTaskLabels(const Checkpoint &ck,
                             const std::vector<Document> &docs, Task task,
                             const InferenceOptions &options) {
  CheckSpaces(docs, ck.spaces);
  TaskLabels out;
  for (const Document &doc : docs) {
    const DocumentPrediction p =
        Predict(doc, ck.vocab, ck.spaces, ck.params, options);
    for (size_t k = 0; k < p.mentions.size(); ++k) {
      const EventMention &m = doc.mentions[k];
      const MentionPrediction &mp = p.mentions[k];
      if (task == Task::kTrigger) {
        const Matrix gold = GoldTokenLabels(m, ck.spaces);
        for (Eigen::Index r = 0; r < gold.rows(); ++r) {
          Eigen::Index g;
          gold.row(r).maxCoeff(&g);
          out.gold.push_back(static_cast<int>(g));
          out.pred.push_back(mp.token_labels[r]);
        }
      } else if (task == Task::kEvent) {
        out.gold.push_back(m.event_class);
        out.pred.push_back(mp.event_class);
      }
    }
    if (task == Task::kEre) {
      for (const PairPrediction &pp : p.pairs) {
        out.gold.push_back(pp.gold);
        out.pred.push_back(pp.relation);
      }
    }
  }
  return out;
}

MetricsReport Evaluate(const Checkpoint &ck, const std::vector<Document> &docs,
                       Task task, std::optional<InferenceOptions> options) {
  InferenceOptions opts;
  if (options) {
    opts = *options;
  } else {
    opts.mention_cap = ck.config.mention_cap;
  }
  const TaskLabels labels = CollectTaskLabels(ck, docs, task, opts);
  return MicroPrf(labels.pred, labels.gold, ExcludedLabels(task, ck.spaces),
                  TaskName(task));
}

MetricsReport MajorityRelationBaseline(
    const std::vector<Document> &reference_docs,
    const std::vector<Document> &docs, const LabelSpaces &spaces,
    int mention_cap) {
  const int na = spaces.na_relation();
  std::vector<int64_t> counts(spaces.num_relations(), 0);
  for (const Document &doc : reference_docs) {
    for (const MentionPair &p : EnumeratePairs(doc, mention_cap, na)) {
      ++counts[p.relation];
    }
  }
  int majority = na;
  for (int r = 0; r < spaces.num_relations(); ++r) {
    if (r == na) continue;
    if (majority == na || counts[r] > counts[majority]) majority = r;
  }
  std::vector<int> pred, gold;
  for (const Document &doc : docs) {
    for (const MentionPair &p : EnumeratePairs(doc, mention_cap, na)) {
      gold.push_back(p.relation);
      pred.push_back(majority);
    }
  }
  return MicroPrf(pred, gold, {na}, "ere/majority");
}

LoadedCorpus LoadSplit(const TrainConfig &config, const std::string &split,
                       const std::optional<LabelSpaces> &spaces) {
  if (split != "train" && split != "valid" && split != "test") {
    throw ConfigError("unknown split '" + split + "' (train|valid|test)");
  }
  if (config.synthetic) {
    SyntheticCorpus syn = SynthesizeCorpus(config.synthesis);
    if (spaces && !(*spaces == syn.spaces)) {
      throw ValidationError("synthetic label spaces differ from the model's");
    }
    auto [train, held] = SplitHoldout(syn.documents, config.holdout_fraction);
    LoadedCorpus out;
    out.documents = split == "train" ? std::move(train) : std::move(held);
    out.spaces = syn.spaces;
    out.stats = ComputeStats(out.documents, out.spaces);
    return out;
  }
  const std::string &path = split == "train"   ? config.train_path
                            : split == "valid" ? config.valid_path
                                               : config.test_path;
  if (path.empty()) {
    throw ConfigError("no " + split + "_path configured");
  }
  return LoadCorpus(path, spaces, config.max_length);
}

}  // namespace ecsp
