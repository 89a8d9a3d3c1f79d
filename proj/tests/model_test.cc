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

#include <gtest/gtest.h>

#include "ecsp/trainer.h"
#include "stub.h"
#include "test_util.h"

namespace ecsp {
namespace {

using testing::MakePerfectStub;
using testing::RelativeError;

struct Fixture {
  std::vector<Document> docs;
  LabelSpaces spaces;
  Vocabulary vocab;
  ModelParams params;
};

Fixture SmallModel(int mix_layers) {
  Fixture f;
  const LoadedCorpus c = ParseCorpus(testing::kStubCorpus);
  f.docs = c.documents;
  f.spaces = c.spaces;
  f.vocab = Vocabulary::Build(f.docs);
  EncoderConfig enc;
  enc.embed_dim = 3;
  enc.mix_layers = mix_layers;
  enc.seed = 5;
  f.params = ModelParams::Init(f.spaces, f.vocab.size(), enc, 0.8);
  // Per-class radii so their gradient is exercised.
  for (int i = 0; i < f.params.spheres.radii.size(); ++i) {
    f.params.spheres.radii(i) = 0.3 + 0.2 * i;
  }
  return f;
}

TEST(JointLossTest, GradientMatchesFiniteDifferences) {
  for (int layers : {0, 1, 2}) {
    Fixture f = SmallModel(layers);
    std::vector<const Document *> batch;
    for (const Document &d : f.docs) batch.push_back(&d);
    ObjectiveOptions o;
    o.weights.lambda_token = 0.7;
    o.weights.lambda_sentence = 1.3;
    o.weights.lambda_document = 0.9;
    o.weights.mu_token = 0.5;
    o.weights.mu_sentence = 1.5;
    o.weights.mu_document = 0.8;
    o.weights.l2_coeff = 1e-2;
    o.radii_trainable = true;

    ModelParams grads = f.params.ZerosLike();
    const LossBreakdown loss =
        JointLoss(batch, f.vocab, f.spaces, f.params, o, &grads);
    EXPECT_NEAR(loss.total,
                0.7 * loss.token + 1.3 * loss.sentence + 0.9 * loss.document +
                    loss.penalty,
                1e-12);
    EXPECT_EQ(loss.mentions, 9);
    EXPECT_EQ(loss.pairs, 3 + 1 + 6);

    std::vector<NamedTensor> values = f.params.Tensors();
    const std::vector<NamedTensor> analytic = grads.Tensors();
    ASSERT_EQ(values.size(), analytic.size());
    for (size_t k = 0; k < values.size(); ++k) {
      NamedTensor &t = values[k];
      Vector numeric(t.rows * t.cols);
      for (Eigen::Index i = 0; i < numeric.size(); ++i) {
        const double keep = t.data[i];
        t.data[i] = keep + 1e-5;
        const double up = JointLoss(batch, f.vocab, f.spaces, f.params, o).total;
        t.data[i] = keep - 1e-5;
        const double down = JointLoss(batch, f.vocab, f.spaces, f.params, o).total;
        t.data[i] = keep;
        numeric(i) = (up - down) / 2e-5;
      }
      EXPECT_LT(RelativeError(analytic[k].flat(), numeric), 1e-5)
          << t.name << " with " << layers << " mixing layers";
    }
  }
}

TEST(JointLossTest, FixedRadiiAreNotPenalized) {
  Fixture f = SmallModel(1);
  std::vector<const Document *> batch = {&f.docs[0]};
  ObjectiveOptions o;
  o.weights.l2_coeff = 0.1;
  const LossBreakdown l = JointLoss(batch, f.vocab, f.spaces, f.params, o);
  EXPECT_NEAR(l.penalty, 0.1 * SquaredNorm(f.params, false), 1e-12);
  EXPECT_NEAR(SquaredNorm(f.params, true) - SquaredNorm(f.params, false),
              f.params.spheres.radii.squaredNorm(), 1e-12);
}

TEST(JointLossTest, MentionCapLimitsPairs) {
  Fixture f = SmallModel(1);
  std::vector<const Document *> batch = {&f.docs[2]};
  ObjectiveOptions o;
  o.mention_cap = 2;
  const LossBreakdown l = JointLoss(batch, f.vocab, f.spaces, f.params, o);
  EXPECT_EQ(l.mentions, 2);
  EXPECT_EQ(l.pairs, 1);
}

TEST(GoldTokenLabelsTest, TriggerRowCarriesClass) {
  const LabelSpaces s({"None", "Attack"}, {"NA"});
  const EventMention m{"", {"a", "b", "c"}, 2, 1};
  const Matrix g = GoldTokenLabels(m, s);
  ASSERT_EQ(g.rows(), 3);
  ASSERT_EQ(g.cols(), 4);
  EXPECT_EQ(g(1, 1), 1.0);
  EXPECT_EQ(g(0, s.non_trigger_label()), 1.0);
  EXPECT_EQ(g(2, s.non_trigger_label()), 1.0);
  EXPECT_EQ(g.sum(), 3.0);
}

TEST(PredictTest, PerfectStubRecoversGold) {
  const auto stub = MakePerfectStub();
  const Checkpoint &ck = stub.checkpoint;
  for (const Document &doc : stub.documents) {
    const DocumentPrediction p = Predict(doc, ck.vocab, ck.spaces, ck.params);
    ASSERT_EQ(p.mentions.size(), doc.mentions.size());
    const size_t m = doc.mentions.size();
    ASSERT_EQ(p.pairs.size(), m * (m - 1) / 2);
    for (size_t k = 0; k < m; ++k) {
      EXPECT_EQ(p.mentions[k].event_class, doc.mentions[k].event_class);
      const Matrix gold = GoldTokenLabels(doc.mentions[k], ck.spaces);
      for (size_t t = 0; t < p.mentions[k].token_labels.size(); ++t) {
        EXPECT_EQ(gold(static_cast<Eigen::Index>(t), p.mentions[k].token_labels[t]),
                  1.0);
      }
    }
    for (const PairPrediction &pp : p.pairs) EXPECT_EQ(pp.relation, pp.gold);
  }
}

TEST(PredictTest, EnergyModeGivesDistributions) {
  const auto stub = MakePerfectStub();
  const Checkpoint &ck = stub.checkpoint;
  InferenceOptions o;
  o.mode = InferenceMode::kEnergy;
  o.energy_steps = 10;
  const DocumentPrediction p =
      Predict(stub.documents[0], ck.vocab, ck.spaces, ck.params, o);
  for (const MentionPrediction &m : p.mentions) {
    EXPECT_NEAR(m.class_probs.sum(), 1.0, 1e-9);
    EXPECT_GE(m.class_probs.minCoeff(), 0.0);
  }
  EXPECT_EQ(ParseInferenceMode("energy"), InferenceMode::kEnergy);
  EXPECT_THROW(ParseInferenceMode("oracle"), ConfigError);
}

TEST(DiagnosticsTest, StubIsConcentratedAndDeterministic) {
  const auto stub = MakePerfectStub();
  const Checkpoint &ck = stub.checkpoint;
  const SphereConcentration c =
      MeasureSphereConcentration(stub.documents, ck.vocab, ck.params, 40);
  EXPECT_EQ(c.mentions, 9);
  EXPECT_EQ(c.closer_to_gold, 9);
  EXPECT_DOUBLE_EQ(c.mean_gold_hinge, 0.0);
  const SphereConcentration attack = MeasureSphereConcentration(
      stub.documents, ck.vocab, ck.params, 40, *ck.spaces.ClassIndex("Attack"));
  EXPECT_EQ(attack.mentions, 3);

  const EnergySeparation a = MeasureEnergySeparation(
      stub.documents, ck.vocab, ck.spaces, ck.params, 40, 3);
  const EnergySeparation b = MeasureEnergySeparation(
      stub.documents, ck.vocab, ck.spaces, ck.params, 40, 3);
  EXPECT_EQ(a.token_gold, b.token_gold);
  EXPECT_EQ(a.document_wrong, b.document_wrong);
}

TEST(ModelParamsTest, TensorNamesAreStable) {
  Fixture f = SmallModel(1);
  std::vector<std::string> names;
  for (const NamedTensor &t : f.params.Tensors()) names.push_back(t.name);
  EXPECT_EQ(names.front(), "encoder.embedding");
  EXPECT_EQ(names[1], "encoder.mix0.left");
  EXPECT_EQ(names.back(), "energy.document.interaction");
  EXPECT_EQ(names.size(), 1u + 4u + 4u + 2u + 2u + 6u);
}

}  // namespace
}  // namespace ecsp
