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

// Feature encoders for tokens, mentions and mention pairs, plus the linear
// heads that turn features into label distributions.

#ifndef ECSP_ENCODERS_H_
#define ECSP_ENCODERS_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecsp/common.h"
#include "ecsp/corpus.h"

namespace ecsp {

enum class Backbone {
  kToyContext,
  // Slot for an externally supplied contextual encoder. No such encoder is
  // linked into this library; selecting it without one is a ConfigError.
  kPluggablePretrained,
};

std::string BackboneName(Backbone b);
Backbone ParseBackbone(const std::string &name);

struct EncoderConfig {
  int embed_dim = 16;
  int mix_layers = 1;
  Backbone backbone = Backbone::kToyContext;
  uint64_t seed = 1;

  void Validate() const;
};

// Token -> index map. Index 0 is padding, index 1 is out-of-vocabulary.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr char kPadToken[] = "<pad>";
  static constexpr char kOovToken[] = "<unk>";

  Vocabulary();
  // `words` excludes the two reserved entries; duplicates are ignored.
  explicit Vocabulary(const std::vector<std::string> &words);

  // Sorted unique tokens of all mentions.
  static Vocabulary Build(const std::vector<Document> &documents);

  int Index(const std::string &token) const;
  std::vector<int> Encode(const std::vector<std::string> &tokens) const;
  int size() const { return static_cast<int>(words_.size()); }
  // All entries including the reserved ones, in index order.
  const std::vector<std::string> &words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

// One residual windowed mixing layer:
//   out_k = h_k + tanh(L h_{k-1} + C h_k + R h_{k+1} + b)
// Positions outside the sequence read the layer's padding image, so padding
// a sequence leaves its real rows unchanged.
struct MixLayer {
  Matrix left, center, right;
  Vector bias;
};

struct EncoderParams {
  Matrix embedding;  // vocab x d
  std::vector<MixLayer> layers;

  static EncoderParams Init(int vocab_size, const EncoderConfig &config);
  EncoderParams ZerosLike() const;
  int dim() const { return static_cast<int>(embedding.cols()); }
};

// Forward activations kept for the backward pass.
struct TokenEncoding {
  std::vector<int> ids;
  std::vector<Matrix> inputs;       // input of each layer, n x d
  std::vector<Matrix> activations;  // tanh output of each layer
  std::vector<Vector> boundary;     // padding image entering each layer, +1
  std::vector<Vector> boundary_act; // tanh output of the padding chain
  Matrix features;                  // f1, n x d
};

// Runs the toy-context backbone over `ids`, appending padding up to
// `pad_to` rows when it exceeds the sequence length.
TokenEncoding EncodeTokens(const std::vector<int> &ids,
                           const EncoderParams &params, int pad_to = 0);

// f1 for a mention.
Matrix EncodeTokens(const EventMention &mention, const Vocabulary &vocab,
                    const EncoderParams &params, int pad_to = 0);

// Accumulates dLoss/dParams into `grads` given dLoss/dFeatures.
void EncodeTokensBackward(const TokenEncoding &encoding,
                          const Matrix &d_features,
                          const EncoderParams &params, EncoderParams *grads);

// f2: row `trigger_index` (1-based) of the token features.
Vector EncodeMention(const Matrix &features, int trigger_index);

// f3 = [fi, fj, fi * fj].
Vector EncodePair(const Vector &fi, const Vector &fj);
void EncodePairBackward(const Vector &fi, const Vector &fj,
                        const Vector &d_pair, Vector *d_fi, Vector *d_fj);

// Affine head producing logits = W x + b.
struct LinearHead {
  Matrix weight;  // outputs x inputs
  Vector bias;

  static LinearHead Init(int outputs, int inputs, uint64_t seed, double scale);
  LinearHead ZerosLike() const;
};

// Row-wise label distributions y~ for token features (n x |E|+2).
Matrix ClassifyTokens(const Matrix &features, const LinearHead &head);

// Relation distribution z~ for a pair feature.
Vector ClassifyRelations(const Vector &pair, const LinearHead &head);

// Backward through softmax(W x + b) for a batch of rows. `d_probs` is
// dLoss/dProbs; returns dLoss/dInputs and accumulates head gradients.
Matrix ClassifierBackward(const Matrix &inputs, const Matrix &probs,
                          const Matrix &d_probs, const LinearHead &head,
                          LinearHead *grads);

}  // namespace ecsp

#endif  // ECSP_ENCODERS_H_
