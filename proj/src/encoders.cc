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

#include "ecsp/encoders.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ecsp/rng.h"

namespace ecsp {

std::string BackboneName(Backbone b) {
  return b == Backbone::kToyContext ? "toy-context" : "pluggable-pretrained";
}

Backbone ParseBackbone(const std::string &name) {
  if (name == "toy-context") return Backbone::kToyContext;
  if (name == "pluggable-pretrained") return Backbone::kPluggablePretrained;
  throw ConfigError("unknown backbone '" + name + "'");
}

void EncoderConfig::Validate() const {
  if (embed_dim < 2) throw ConfigError("embed_dim must be >= 2");
  if (mix_layers < 0) throw ConfigError("mix_layers must be >= 0");
  if (backbone != Backbone::kToyContext) {
    throw ConfigError(
        "backbone 'pluggable-pretrained' needs an external encoder; only "
        "'toy-context' is built in");
  }
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string> &words) {
  words_ = {kPadToken, kOovToken};
  index_[kPadToken] = kPad;
  index_[kOovToken] = kOov;
  for (const std::string &w : words) {
    if (index_.emplace(w, static_cast<int>(words_.size())).second) {
      words_.push_back(w);
    }
  }
}

Vocabulary Vocabulary::Build(const std::vector<Document> &documents) {
  std::set<std::string> unique;
  for (const Document &doc : documents) {
    for (const EventMention &m : doc.mentions) {
      unique.insert(m.tokens.begin(), m.tokens.end());
    }
  }
  unique.erase(kPadToken);
  unique.erase(kOovToken);
  return Vocabulary(std::vector<std::string>(unique.begin(), unique.end()));
}

int Vocabulary::Index(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kOov : it->second;
}

std::vector<int> Vocabulary::Encode(
    const std::vector<std::string> &tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string &t : tokens) ids.push_back(Index(t));
  return ids;
}

namespace {

Matrix RandomMatrix(Rng &rng, int rows, int cols, double scale) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.Normal();
  }
  return m;
}

}  // namespace

EncoderParams EncoderParams::Init(int vocab_size, const EncoderConfig &config) {
  config.Validate();
  const int d = config.embed_dim;
  Rng rng(config.seed);
  EncoderParams p;
  p.embedding = RandomMatrix(rng, vocab_size, d, 1.0 / std::sqrt(d));
  const double mix_scale = 0.5 / std::sqrt(d);
  for (int l = 0; l < config.mix_layers; ++l) {
    MixLayer layer;
    layer.left = RandomMatrix(rng, d, d, mix_scale);
    layer.center = RandomMatrix(rng, d, d, mix_scale);
    layer.right = RandomMatrix(rng, d, d, mix_scale);
    layer.bias = Vector::Zero(d);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

EncoderParams EncoderParams::ZerosLike() const {
  EncoderParams z;
  z.embedding = Matrix::Zero(embedding.rows(), embedding.cols());
  for (const MixLayer &l : layers) {
    const int d = static_cast<int>(l.center.rows());
    z.layers.push_back({Matrix::Zero(d, d), Matrix::Zero(d, d),
                        Matrix::Zero(d, d), Vector::Zero(d)});
  }
  return z;
}

TokenEncoding EncodeTokens(const std::vector<int> &ids,
                           const EncoderParams &params, int pad_to) {
  TokenEncoding enc;
  enc.ids = ids;
  if (pad_to > static_cast<int>(enc.ids.size())) {
    enc.ids.resize(pad_to, Vocabulary::kPad);
  }
  const int n = static_cast<int>(enc.ids.size());
  const int d = params.dim();
  Matrix h(n, d);
  for (int k = 0; k < n; ++k) {
    ECSP_CHECK(enc.ids[k] >= 0 && enc.ids[k] < params.embedding.rows(),
               "token id outside the embedding table");
    h.row(k) = params.embedding.row(enc.ids[k]);
  }
  Vector pad = params.embedding.row(Vocabulary::kPad).transpose();
  enc.boundary.push_back(pad);
  for (const MixLayer &layer : params.layers) {
    const Vector pad_pre =
        (layer.left + layer.center + layer.right) * pad + layer.bias;
    Matrix pre(n, d);
    for (int k = 0; k < n; ++k) {
      // Padding positions follow the padding chain whatever their neighbours.
      if (enc.ids[k] == Vocabulary::kPad) {
        pre.row(k) = pad_pre.transpose();
        continue;
      }
      const Vector prev = k > 0 ? Vector(h.row(k - 1).transpose()) : pad;
      const Vector next = k + 1 < n ? Vector(h.row(k + 1).transpose()) : pad;
      pre.row(k) = (layer.left * prev + layer.center * h.row(k).transpose() +
                    layer.right * next + layer.bias)
                       .transpose();
    }
    Matrix act = pre.array().tanh().matrix();
    enc.inputs.push_back(h);
    enc.activations.push_back(act);
    h = h + act;

    Vector pad_act = pad_pre.array().tanh().matrix();
    enc.boundary_act.push_back(pad_act);
    pad = pad + pad_act;
    enc.boundary.push_back(pad);
  }
  enc.features = std::move(h);
  return enc;
}

Matrix EncodeTokens(const EventMention &mention, const Vocabulary &vocab,
                    const EncoderParams &params, int pad_to) {
  return EncodeTokens(vocab.Encode(mention.tokens), params, pad_to).features;
}

void EncodeTokensBackward(const TokenEncoding &enc, const Matrix &d_features,
                          const EncoderParams &params, EncoderParams *grads) {
  const int n = static_cast<int>(enc.ids.size());
  const int d = params.dim();
  ECSP_CHECK(d_features.rows() == n && d_features.cols() == d,
             "feature gradient shape mismatch");
  Matrix dh = d_features;
  Vector dpad = Vector::Zero(d);  // gradient w.r.t. the boundary after layer l
  // Padding rows equal the boundary, so their gradient joins the chain's.
  auto fold = [&](Matrix &rows, Vector &chain) {
    for (int k = 0; k < n; ++k) {
      if (enc.ids[k] != Vocabulary::kPad) continue;
      chain += rows.row(k).transpose();
      rows.row(k).setZero();
    }
  };
  fold(dh, dpad);
  for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
    const MixLayer &layer = params.layers[l];
    MixLayer &g = grads->layers[l];
    const Matrix &h = enc.inputs[l];
    const Vector &pad = enc.boundary[l];
    const Matrix da =
        (dh.array() * (1.0 - enc.activations[l].array().square())).matrix();

    Matrix dh_in = dh;  // residual path
    Vector dpad_in = dpad;
    for (int k = 0; k < n; ++k) {
      if (enc.ids[k] == Vocabulary::kPad) continue;
      const Vector dak = da.row(k).transpose();
      const Vector prev = k > 0 ? Vector(h.row(k - 1).transpose()) : pad;
      const Vector next = k + 1 < n ? Vector(h.row(k + 1).transpose()) : pad;
      g.left += dak * prev.transpose();
      g.center += dak * h.row(k);
      g.right += dak * next.transpose();
      g.bias += dak;
      dh_in.row(k) += (layer.center.transpose() * dak).transpose();
      const Vector to_prev = layer.left.transpose() * dak;
      const Vector to_next = layer.right.transpose() * dak;
      if (k > 0) {
        dh_in.row(k - 1) += to_prev.transpose();
      } else {
        dpad_in += to_prev;
      }
      if (k + 1 < n) {
        dh_in.row(k + 1) += to_next.transpose();
      } else {
        dpad_in += to_next;
      }
    }
    // Padding chain: pad_{l+1} = pad_l + tanh((L + C + R) pad_l + b).
    const Vector dpa =
        (dpad.array() * (1.0 - enc.boundary_act[l].array().square())).matrix();
    g.left += dpa * pad.transpose();
    g.center += dpa * pad.transpose();
    g.right += dpa * pad.transpose();
    g.bias += dpa;
    dpad_in += (layer.left + layer.center + layer.right).transpose() * dpa;

    fold(dh_in, dpad_in);
    dh = std::move(dh_in);
    dpad = std::move(dpad_in);
  }
  for (int k = 0; k < n; ++k) grads->embedding.row(enc.ids[k]) += dh.row(k);
  grads->embedding.row(Vocabulary::kPad) += dpad.transpose();
}

Vector EncodeMention(const Matrix &features, int trigger_index) {
  ECSP_CHECK(trigger_index >= 1 && trigger_index <= features.rows(),
             "trigger index " + std::to_string(trigger_index) +
                 " outside [1, " + std::to_string(features.rows()) + "]");
  return features.row(trigger_index - 1).transpose();
}

Vector EncodePair(const Vector &fi, const Vector &fj) {
  ECSP_CHECK(fi.size() == fj.size(), "pair embeddings differ in length");
  const Eigen::Index d = fi.size();
  Vector out(3 * d);
  out.segment(0, d) = fi;
  out.segment(d, d) = fj;
  out.segment(2 * d, d) = fi.cwiseProduct(fj);
  return out;
}

void EncodePairBackward(const Vector &fi, const Vector &fj,
                        const Vector &d_pair, Vector *d_fi, Vector *d_fj) {
  const Eigen::Index d = fi.size();
  ECSP_CHECK(d_pair.size() == 3 * d, "pair gradient length mismatch");
  *d_fi = d_pair.segment(0, d) + d_pair.segment(2 * d, d).cwiseProduct(fj);
  *d_fj = d_pair.segment(d, d) + d_pair.segment(2 * d, d).cwiseProduct(fi);
}

LinearHead LinearHead::Init(int outputs, int inputs, uint64_t seed,
                            double scale) {
  Rng rng(seed);
  return {RandomMatrix(rng, outputs, inputs, scale), Vector::Zero(outputs)};
}

LinearHead LinearHead::ZerosLike() const {
  return {Matrix::Zero(weight.rows(), weight.cols()),
          Vector::Zero(bias.size())};
}

Matrix ClassifyTokens(const Matrix &features, const LinearHead &head) {
  ECSP_CHECK(features.cols() == head.weight.cols(),
             "token classifier input dimension mismatch");
  Matrix logits = features * head.weight.transpose();
  logits.rowwise() += head.bias.transpose();
  return SoftmaxRows(logits);
}

Vector ClassifyRelations(const Vector &pair, const LinearHead &head) {
  ECSP_CHECK(pair.size() == head.weight.cols(),
             "relation classifier input dimension mismatch");
  return Softmax(head.weight * pair + head.bias);
}

Matrix ClassifierBackward(const Matrix &inputs, const Matrix &probs,
                          const Matrix &d_probs, const LinearHead &head,
                          LinearHead *grads) {
  Matrix d_logits(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    d_logits.row(r) = SoftmaxBackward(probs.row(r).transpose(),
                                      d_probs.row(r).transpose())
                          .transpose();
  }
  grads->weight += d_logits.transpose() * inputs;
  grads->bias += d_logits.colwise().sum().transpose();
  return d_logits * head.weight;
}

}  // namespace ecsp
