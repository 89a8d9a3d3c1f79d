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

#include "ecsp/model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecsp/rng.h"

namespace ecsp {

namespace {

// splitmix64 finalizer; derives independent sub-seeds from one seed.
uint64_t SubSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

template <typename M>
NamedTensor View(const std::string &name, ParamGroup group, M &m) {
  return {name, group, const_cast<double *>(m.data()), m.rows(), m.cols()};
}

}  // namespace

ModelParams ModelParams::Init(const LabelSpaces &spaces, int vocab_size,
                              const EncoderConfig &config, double radius) {
  config.Validate();
  const int d = config.embed_dim;
  ModelParams p;
  EncoderConfig enc = config;
  enc.seed = SubSeed(config.seed, 0);
  p.encoder = EncoderParams::Init(vocab_size, enc);
  p.token_head = LinearHead::Init(spaces.token_label_count(), d,
                                  SubSeed(config.seed, 1), 0.1);
  p.relation_head = LinearHead::Init(spaces.num_relations(), 3 * d,
                                     SubSeed(config.seed, 2), 0.1);
  p.spheres = InitCentroids(spaces.num_classes(), d, SubSeed(config.seed, 3),
                            radius);
  p.energy = EnergyParams::Init(spaces.num_classes(), spaces.num_relations(),
                                d, SubSeed(config.seed, 4));
  return p;
}

ModelParams ModelParams::ZerosLike() const {
  return {encoder.ZerosLike(), token_head.ZerosLike(),
          relation_head.ZerosLike(), spheres.ZerosLike(), energy.ZerosLike()};
}

std::vector<NamedTensor> ModelParams::Tensors() const {
  std::vector<NamedTensor> t;
  t.push_back(View("encoder.embedding", ParamGroup::kEncoder,
                   encoder.embedding));
  for (size_t l = 0; l < encoder.layers.size(); ++l) {
    const MixLayer &layer = encoder.layers[l];
    const std::string p = "encoder.mix" + std::to_string(l) + ".";
    t.push_back(View(p + "left", ParamGroup::kEncoder, layer.left));
    t.push_back(View(p + "center", ParamGroup::kEncoder, layer.center));
    t.push_back(View(p + "right", ParamGroup::kEncoder, layer.right));
    t.push_back(View(p + "bias", ParamGroup::kEncoder, layer.bias));
  }
  t.push_back(View("token_head.weight", ParamGroup::kHead, token_head.weight));
  t.push_back(View("token_head.bias", ParamGroup::kHead, token_head.bias));
  t.push_back(View("relation_head.weight", ParamGroup::kHead,
                   relation_head.weight));
  t.push_back(View("relation_head.bias", ParamGroup::kHead,
                   relation_head.bias));
  t.push_back(View("spheres.centroids", ParamGroup::kSphere,
                   spheres.centroids));
  t.push_back(View("spheres.radii", ParamGroup::kRadius, spheres.radii));
  t.push_back(View("energy.token.local", ParamGroup::kEnergy,
                   energy.token.local));
  t.push_back(View("energy.token.transition", ParamGroup::kEnergy,
                   energy.token.transition));
  t.push_back(View("energy.sentence.local", ParamGroup::kEnergy,
                   energy.sentence.local));
  t.push_back(View("energy.sentence.label_weights", ParamGroup::kEnergy,
                   energy.sentence.label_weights));
  t.push_back(View("energy.sentence.interaction", ParamGroup::kEnergy,
                   energy.sentence.interaction));
  t.push_back(View("energy.document.local", ParamGroup::kEnergy,
                   energy.document.local));
  t.push_back(View("energy.document.label_weights", ParamGroup::kEnergy,
                   energy.document.label_weights));
  t.push_back(View("energy.document.interaction", ParamGroup::kEnergy,
                   energy.document.interaction));
  return t;
}

std::vector<NamedTensor> ModelParams::Tensors() {
  return static_cast<const ModelParams *>(this)->Tensors();
}

double SquaredNorm(const ModelParams &params, bool radii_trainable) {
  double total = 0.0;
  for (const NamedTensor &t : params.Tensors()) {
    if (t.group == ParamGroup::kRadius && !radii_trainable) continue;
    total += t.flat().squaredNorm();
  }
  return total;
}

Matrix GoldTokenLabels(const EventMention &mention,
                       const LabelSpaces &spaces) {
  const int n = static_cast<int>(mention.tokens.size());
  Matrix gold = Matrix::Zero(n, spaces.token_label_count());
  for (int k = 0; k < n; ++k) {
    gold(k, k + 1 == mention.trigger_index ? mention.event_class
                                           : spaces.non_trigger_label()) = 1.0;
  }
  return gold;
}

namespace {

// Encoded mention plus its accumulated feature gradient.
struct MentionState {
  TokenEncoding encoding;
  Vector embedding;
  Matrix d_features;
};

int CappedMentions(const Document &doc, int cap) {
  return std::min(static_cast<int>(doc.mentions.size()), cap);
}

void AddScaled(TokenEnergyParams *acc, const TokenEnergyParams &g, double s) {
  acc->local += s * g.local;
  acc->transition += s * g.transition;
}

void AddScaled(LabelEnergyParams *acc, const LabelEnergyParams &g, double s) {
  acc->local += s * g.local;
  acc->label_weights += s * g.label_weights;
  acc->interaction += s * g.interaction;
}

}  // namespace

LossBreakdown JointLoss(const std::vector<const Document *> &batch,
                        const Vocabulary &vocab, const LabelSpaces &spaces,
                        const ModelParams &params,
                        const ObjectiveOptions &options, ModelParams *grads) {
  const LossWeights &w = options.weights;
  const int cap = options.mention_cap;
  LossBreakdown out;
  for (const Document *doc : batch) {
    const int m = CappedMentions(*doc, cap);
    out.mentions += m;
    out.pairs += static_cast<int64_t>(m) * (m - 1) / 2;
  }
  const double inv_m = out.mentions ? 1.0 / static_cast<double>(out.mentions) : 0.0;
  const double inv_n = out.pairs ? 1.0 / static_cast<double>(out.pairs) : 0.0;
  const double s_tok = w.lambda_token * inv_m;
  const double s_sen = w.lambda_sentence * inv_m;
  const double s_doc = w.lambda_document * inv_n;
  const int num_classes = spaces.num_classes();
  const int num_relations = spaces.num_relations();

  for (const Document *doc : batch) {
    const int m = CappedMentions(*doc, cap);
    std::vector<MentionState> states(m);
    for (int k = 0; k < m; ++k) {
      const EventMention &mention = doc->mentions[k];
      MentionState &st = states[k];
      st.encoding = EncodeTokens(vocab.Encode(mention.tokens), params.encoder);
      const Matrix &features = st.encoding.features;
      st.d_features = Matrix::Zero(features.rows(), features.cols());

      // Token level.
      const Matrix pred = ClassifyTokens(features, params.token_head);
      const Matrix gold = GoldTokenLabels(mention, spaces);
      TokenLevelLoss tl = TokenLevelLossWithGradient(
          features, pred, gold, params.energy.token, w.mu_token, options.cost);
      out.token += tl.value * inv_m;
      out.token_hinge += tl.hinge * inv_m;
      out.token_ce += tl.ce * inv_m;

      // Sentence level.
      st.embedding = EncodeMention(features, mention.trigger_index);
      const Vector s = Measure(st.embedding, params.spheres);
      const Vector sgold = OneHot(mention.event_class, num_classes);
      LabelLevelLoss sl =
          LabelLevelLossWithGradient(st.embedding, s, sgold,
                                     params.energy.sentence, w.mu_sentence,
                                     options.cost);
      out.sentence += sl.value * inv_m;
      out.sentence_hinge += sl.hinge * inv_m;
      out.sentence_ce += sl.ce * inv_m;

      if (grads == nullptr) continue;
      if (s_tok != 0.0) {
        st.d_features += s_tok * tl.d_features;
        st.d_features += ClassifierBackward(features, pred, s_tok * tl.d_pred,
                                            params.token_head,
                                            &grads->token_head);
        AddScaled(&grads->energy.token, tl.d_params, s_tok);
      }
      if (s_sen != 0.0) {
        MeasureGradient mg =
            MeasureBackward(st.embedding, params.spheres, s_sen * sl.d_pred);
        st.d_features.row(mention.trigger_index - 1) +=
            (s_sen * sl.d_feature + mg.d_embedding).transpose();
        grads->spheres.centroids += mg.d_centroids;
        grads->spheres.radii += mg.d_radii;
        AddScaled(&grads->energy.sentence, sl.d_params, s_sen);
      }
    }

    // Document level.
    for (const MentionPair &pair :
         EnumeratePairs(*doc, std::max(cap, 2), spaces.na_relation())) {
      if (pair.j >= m) continue;
      const Vector &fi = states[pair.i].embedding;
      const Vector &fj = states[pair.j].embedding;
      const Vector f3 = EncodePair(fi, fj);
      const Vector z = ClassifyRelations(f3, params.relation_head);
      const Vector zgold = OneHot(pair.relation, num_relations);
      LabelLevelLoss dl = LabelLevelLossWithGradient(
          f3, z, zgold, params.energy.document, w.mu_document, options.cost);
      out.document += dl.value * inv_n;
      out.document_hinge += dl.hinge * inv_n;
      out.document_ce += dl.ce * inv_n;
      if (grads == nullptr || s_doc == 0.0) continue;
      Vector d_f3 = s_doc * dl.d_feature;
      d_f3 += ClassifierBackward(f3.transpose(), z.transpose(),
                                 s_doc * dl.d_pred.transpose(),
                                 params.relation_head, &grads->relation_head)
                  .transpose();
      AddScaled(&grads->energy.document, dl.d_params, s_doc);
      Vector d_fi, d_fj;
      EncodePairBackward(fi, fj, d_f3, &d_fi, &d_fj);
      const EventMention &mi = doc->mentions[pair.i];
      const EventMention &mj = doc->mentions[pair.j];
      states[pair.i].d_features.row(mi.trigger_index - 1) += d_fi.transpose();
      states[pair.j].d_features.row(mj.trigger_index - 1) += d_fj.transpose();
    }

    if (grads != nullptr) {
      for (const MentionState &st : states) {
        EncodeTokensBackward(st.encoding, st.d_features, params.encoder,
                             &grads->encoder);
      }
    }
  }

  out.penalty = w.l2_coeff * SquaredNorm(params, options.radii_trainable);
  out.total = w.lambda_token * out.token + w.lambda_sentence * out.sentence +
              w.lambda_document * out.document + out.penalty;
  if (grads != nullptr && w.l2_coeff != 0.0) {
    std::vector<NamedTensor> g = grads->Tensors();
    std::vector<NamedTensor> v = params.Tensors();
    for (size_t k = 0; k < v.size(); ++k) {
      if (v[k].group == ParamGroup::kRadius && !options.radii_trainable) {
        continue;
      }
      g[k].flat() += 2.0 * w.l2_coeff * v[k].flat();
    }
  }
  return out;
}

InferenceMode ParseInferenceMode(const std::string &name) {
  if (name == "classifier") return InferenceMode::kClassifier;
  if (name == "energy") return InferenceMode::kEnergy;
  throw ConfigError("unknown inference mode '" + name + "'");
}

namespace {

int ArgMax(const Eigen::Ref<const Vector> &v) {
  Eigen::Index k;
  v.maxCoeff(&k);
  return static_cast<int>(k);
}

}  // namespace

DocumentPrediction Predict(const Document &doc, const Vocabulary &vocab,
                           const LabelSpaces &spaces,
                           const ModelParams &params,
                           const InferenceOptions &options) {
  DocumentPrediction out;
  const int m = CappedMentions(doc, options.mention_cap);
  const bool energy = options.mode == InferenceMode::kEnergy;
  for (int k = 0; k < m; ++k) {
    const EventMention &mention = doc.mentions[k];
    MentionPrediction mp;
    const Matrix features = EncodeTokens(mention, vocab, params.encoder);
    mp.token_probs =
        energy ? MinimizeTokenEnergy(features, params.energy.token,
                                     options.energy_steps,
                                     options.energy_step_size)
                     .labels
               : ClassifyTokens(features, params.token_head);
    for (Eigen::Index r = 0; r < mp.token_probs.rows(); ++r) {
      mp.token_labels.push_back(ArgMax(mp.token_probs.row(r).transpose()));
    }
    mp.embedding = EncodeMention(features, mention.trigger_index);
    mp.class_probs =
        energy ? Vector(MinimizeLabelEnergy(mp.embedding,
                                            params.energy.sentence,
                                            options.energy_steps,
                                            options.energy_step_size)
                            .labels.row(0)
                            .transpose())
               : Measure(mp.embedding, params.spheres);
    mp.event_class = ArgMax(mp.class_probs);
    out.mentions.push_back(std::move(mp));
  }
  if (m >= 2) {
    for (const MentionPair &pair :
         EnumeratePairs(doc, options.mention_cap, spaces.na_relation())) {
      PairPrediction pp;
      pp.i = pair.i;
      pp.j = pair.j;
      pp.gold = pair.relation;
      const Vector f3 = EncodePair(out.mentions[pair.i].embedding,
                                   out.mentions[pair.j].embedding);
      pp.probs = energy ? Vector(MinimizeLabelEnergy(f3, params.energy.document,
                                                     options.energy_steps,
                                                     options.energy_step_size)
                                     .labels.row(0)
                                     .transpose())
                        : ClassifyRelations(f3, params.relation_head);
      pp.relation = ArgMax(pp.probs);
      out.pairs.push_back(std::move(pp));
    }
  }
  return out;
}

EnergySeparation MeasureEnergySeparation(const std::vector<Document> &docs,
                                         const Vocabulary &vocab,
                                         const LabelSpaces &spaces,
                                         const ModelParams &params,
                                         int mention_cap, uint64_t seed) {
  Rng rng(seed);
  auto wrong = [&](int gold, int size) {
    if (size < 2) return gold;
    int k = static_cast<int>(rng.Index(static_cast<size_t>(size - 1)));
    return k >= gold ? k + 1 : k;
  };
  EnergySeparation out;
  int64_t sequences = 0, mentions = 0, pairs = 0;
  const int n_tok = spaces.token_label_count();
  for (const Document &doc : docs) {
    const int m = CappedMentions(doc, mention_cap);
    std::vector<Vector> embeddings;
    for (int k = 0; k < m; ++k) {
      const EventMention &mention = doc.mentions[k];
      const Matrix features = EncodeTokens(mention, vocab, params.encoder);
      const Matrix gold = GoldTokenLabels(mention, spaces);
      Matrix bad = Matrix::Zero(gold.rows(), gold.cols());
      for (Eigen::Index r = 0; r < gold.rows(); ++r) {
        bad(r, wrong(ArgMax(gold.row(r).transpose()), n_tok)) = 1.0;
      }
      out.token_gold += TokenEnergy(features, gold, params.energy.token);
      out.token_wrong += TokenEnergy(features, bad, params.energy.token);
      ++sequences;

      const Vector f2 = EncodeMention(features, mention.trigger_index);
      const int c = mention.event_class;
      out.sentence_gold += SentenceEnergy(
          f2, OneHot(c, spaces.num_classes()), params.energy.sentence);
      out.sentence_wrong += SentenceEnergy(
          f2, OneHot(wrong(c, spaces.num_classes()), spaces.num_classes()),
          params.energy.sentence);
      ++mentions;
      embeddings.push_back(f2);
    }
    if (m < 2) continue;
    for (const MentionPair &pair :
         EnumeratePairs(doc, mention_cap, spaces.na_relation())) {
      const Vector f3 = EncodePair(embeddings[pair.i], embeddings[pair.j]);
      const int r = spaces.num_relations();
      out.document_gold += DocumentEnergy(f3, OneHot(pair.relation, r),
                                          params.energy.document);
      out.document_wrong += DocumentEnergy(
          f3, OneHot(wrong(pair.relation, r), r), params.energy.document);
      ++pairs;
    }
  }
  auto mean = [](double &v, int64_t n) {
    v = n ? v / static_cast<double>(n) : 0.0;
  };
  mean(out.token_gold, sequences);
  mean(out.token_wrong, sequences);
  mean(out.sentence_gold, mentions);
  mean(out.sentence_wrong, mentions);
  mean(out.document_gold, pairs);
  mean(out.document_wrong, pairs);
  return out;
}

SphereConcentration MeasureSphereConcentration(
    const std::vector<Document> &docs, const Vocabulary &vocab,
    const ModelParams &params, int mention_cap, int only_class) {
  SphereConcentration out;
  for (const Document &doc : docs) {
    const int m = CappedMentions(doc, mention_cap);
    for (int k = 0; k < m; ++k) {
      const EventMention &mention = doc.mentions[k];
      if (only_class >= 0 && mention.event_class != only_class) continue;
      const Matrix features = EncodeTokens(mention, vocab, params.encoder);
      const Vector f2 = EncodeMention(features, mention.trigger_index);
      const Vector h = HingeDistances(f2, params.spheres);
      double nearest = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < h.size(); ++c) {
        if (c != mention.event_class) nearest = std::min(nearest, h(c));
      }
      const double own = h(mention.event_class);
      ++out.mentions;
      if (own < nearest) ++out.closer_to_gold;
      out.mean_gold_hinge += own;
      out.mean_nearest_wrong_hinge += std::isfinite(nearest) ? nearest : 0.0;
    }
  }
  if (out.mentions > 0) {
    out.mean_gold_hinge /= static_cast<double>(out.mentions);
    out.mean_nearest_wrong_hinge /= static_cast<double>(out.mentions);
  }
  return out;
}

}  // namespace ecsp
