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

// The joint model: shared token encoder, token head (trigger labels),
// hypersphere measurement (event classes), pair head (relations), and the
// three energy functions. Provides the joint training objective with its
// full gradient, and inference.

#ifndef ECSP_MODEL_H_
#define ECSP_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ecsp/common.h"
#include "ecsp/corpus.h"
#include "ecsp/encoders.h"
#include "ecsp/energy.h"
#include "ecsp/hypersphere.h"
#include "ecsp/losses.h"

namespace ecsp {

enum class ParamGroup { kEncoder, kHead, kSphere, kRadius, kEnergy };

// Flat mutable view of one parameter tensor.
struct NamedTensor {
  std::string name;
  ParamGroup group;
  double *data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Map<Vector> flat() const { return {data, rows * cols}; }
};

struct ModelParams {
  EncoderParams encoder;
  LinearHead token_head;     // (|E|+2) x d
  LinearHead relation_head;  // |R| x 3d
  HypersphereSet spheres;
  EnergyParams energy;

  static ModelParams Init(const LabelSpaces &spaces, int vocab_size,
                          const EncoderConfig &config,
                          double radius = kDefaultRadius);
  ModelParams ZerosLike() const;

  // Every tensor in a fixed order with stable names.
  std::vector<NamedTensor> Tensors();
  std::vector<NamedTensor> Tensors() const;

  int dim() const { return encoder.dim(); }
};

// Sum of squares over the regularized tensors (radii only when trainable).
double SquaredNorm(const ModelParams &params, bool radii_trainable);

struct ObjectiveOptions {
  LossWeights weights;
  CostKind cost = CostKind::kSquaredL2;
  int mention_cap = kDefaultMentionCap;
  bool radii_trainable = false;
};

// Per-term values of the joint objective on one batch. Level terms are
// means over the batch's instances (token sequences, mentions, pairs).
struct LossBreakdown {
  double token = 0.0;     // mean(hinge + mu1 * CE) over sequences
  double sentence = 0.0;  // mean(hinge + mu2 * CE) over mentions
  double document = 0.0;  // mean(hinge + mu3 * CE) over pairs
  double penalty = 0.0;   // l2_coeff * ||params||^2
  double total = 0.0;
  double token_hinge = 0.0;
  double sentence_hinge = 0.0;
  double document_hinge = 0.0;
  double token_ce = 0.0;
  double sentence_ce = 0.0;
  double document_ce = 0.0;
  int64_t mentions = 0;
  int64_t pairs = 0;
};

// Joint objective lambda1 L_tok + lambda2 L_sen + lambda3 L_doc + penalty.
// When `grads` is non-null the full gradient is accumulated into it.
LossBreakdown JointLoss(const std::vector<const Document *> &batch,
                        const Vocabulary &vocab, const LabelSpaces &spaces,
                        const ModelParams &params,
                        const ObjectiveOptions &options,
                        ModelParams *grads = nullptr);

// Gold token-label one-hots for a mention (n x (|E|+2)).
Matrix GoldTokenLabels(const EventMention &mention, const LabelSpaces &spaces);

enum class InferenceMode {
  kClassifier,  // argmax of the classifier heads / hypersphere measurement
  kEnergy,      // argmax of energy-minimizing relaxed labels
};

InferenceMode ParseInferenceMode(const std::string &name);

struct MentionPrediction {
  std::vector<int> token_labels;
  Matrix token_probs;
  int event_class = 0;
  Vector class_probs;
  Vector embedding;  // f2
};

struct PairPrediction {
  int i = 0;
  int j = 0;
  int gold = 0;
  int relation = 0;
  Vector probs;
};

struct DocumentPrediction {
  std::vector<MentionPrediction> mentions;  // first min(n, cap) mentions
  std::vector<PairPrediction> pairs;
};

struct InferenceOptions {
  InferenceMode mode = InferenceMode::kClassifier;
  int mention_cap = kDefaultMentionCap;
  int energy_steps = 50;
  double energy_step_size = 0.5;
};

DocumentPrediction Predict(const Document &doc, const Vocabulary &vocab,
                           const LabelSpaces &spaces,
                           const ModelParams &params,
                           const InferenceOptions &options = {});

// Mean energies of gold labels and of uniformly drawn wrong one-hot labels
// (every token / mention / pair relabelled) at each level.
struct EnergySeparation {
  double token_gold = 0.0, token_wrong = 0.0;
  double sentence_gold = 0.0, sentence_wrong = 0.0;
  double document_gold = 0.0, document_wrong = 0.0;
};

EnergySeparation MeasureEnergySeparation(const std::vector<Document> &docs,
                                         const Vocabulary &vocab,
                                         const LabelSpaces &spaces,
                                         const ModelParams &params,
                                         int mention_cap, uint64_t seed);

// How tightly mention embeddings sit around their gold centroids.
struct SphereConcentration {
  int64_t mentions = 0;
  // Mentions whose hinge distance to the gold centroid is strictly below
  // the distance to every other centroid.
  int64_t closer_to_gold = 0;
  double mean_gold_hinge = 0.0;
  double mean_nearest_wrong_hinge = 0.0;

  double fraction() const {
    return mentions == 0 ? 0.0
                         : static_cast<double>(closer_to_gold) /
                               static_cast<double>(mentions);
  }
};

// `only_class` < 0 includes every mention.
SphereConcentration MeasureSphereConcentration(
    const std::vector<Document> &docs, const Vocabulary &vocab,
    const ModelParams &params, int mention_cap, int only_class = -1);

}  // namespace ecsp

#endif  // ECSP_MODEL_H_
