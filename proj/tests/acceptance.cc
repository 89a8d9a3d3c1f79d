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

// Acceptance run: one pass/fail line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "ecsp/hypersphere.h"
#include "ecsp/losses.h"
#include "ecsp/metrics.h"
#include "ecsp/trainer.h"
#include "test_util.h"

namespace ecsp {
namespace {

using testing::NumericGradient;
using testing::RandomLabelParams;
using testing::RandomMatrix;
using testing::RandomOneHotRows;
using testing::RandomSimplexRows;
using testing::RandomTokenParams;
using testing::RandomVector;
using testing::RelativeError;

int failures = 0;

void Report(int id, bool ok, const std::string &detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Tracks the worst relative error seen for one quantity.
struct GradStats {
  std::string name;
  int instances = 0;
  double worst = 0.0;

  void Add(const Matrix &analytic, const Matrix &numeric) {
    worst = std::max(worst, RelativeError(analytic, numeric));
  }
};

TokenEnergyParams WithToken(TokenEnergyParams p, int which, const Matrix &m) {
  (which == 0 ? p.local : p.transition) = m;
  return p;
}

LabelEnergyParams WithLabel(LabelEnergyParams p, int which, const Matrix &m) {
  if (which == 0) p.local = m;
  if (which == 1) p.label_weights = m.col(0);
  if (which == 2) p.interaction = m;
  return p;
}

Matrix LabelParam(const LabelEnergyParams &p, int which) {
  if (which == 0) return p.local;
  if (which == 1) return Matrix(p.label_weights);
  return p.interaction;
}

void GradientCriterion() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20260101);
  constexpr int kInstances = 150;
  GradStats token_energy{"token energy"}, sentence_energy{"sentence energy"},
      document_energy{"document energy"}, hinge{"hinge distance"},
      cost{"structured cost"}, token_loss{"token hinge loss"},
      sentence_loss{"sentence hinge loss"}, document_loss{"document hinge loss"};

  for (int it = 0; it < kInstances; ++it) {
    const int d = rng.Between(2, 8);
    const int n = rng.Between(1, 6);
    const int classes = rng.Between(2, 4);
    const int relations = rng.Between(2, 3);
    const int k_tok = classes + 2;

    // Token energy.
    {
      const Matrix f = RandomMatrix(rng, n, d);
      const Matrix y = RandomSimplexRows(rng, n, k_tok);
      const TokenEnergyParams p = RandomTokenParams(rng, k_tok, d);
      const TokenEnergyGradient g = TokenEnergyWithGradient(f, y, p);
      token_energy.Add(g.d_features, NumericGradient(f, [&](const Matrix &x) {
                         return TokenEnergy(x, y, p);
                       }));
      token_energy.Add(g.d_labels, NumericGradient(y, [&](const Matrix &x) {
                         return TokenEnergy(f, x, p);
                       }));
      token_energy.Add(g.d_params.local,
                       NumericGradient(p.local, [&](const Matrix &x) {
                         return TokenEnergy(f, y, WithToken(p, 0, x));
                       }));
      token_energy.Add(g.d_params.transition,
                       NumericGradient(p.transition, [&](const Matrix &x) {
                         return TokenEnergy(f, y, WithToken(p, 1, x));
                       }));
      ++token_energy.instances;
    }

    // Sentence (dim d, |E| labels) and document (dim 3d, |R| labels).
    for (int level = 0; level < 2; ++level) {
      const int dim = level == 0 ? d : 3 * d;
      const int k = level == 0 ? classes : relations;
      GradStats &stats = level == 0 ? sentence_energy : document_energy;
      const Vector f = RandomVector(rng, dim);
      const Vector y = RandomSimplexRows(rng, 1, k).row(0).transpose();
      const LabelEnergyParams p = RandomLabelParams(rng, k, dim);
      const LabelEnergyGradient g = LabelEnergyWithGradient(f, y, p);
      stats.Add(g.d_feature, NumericGradient(f, [&](const Vector &x) {
                  return LabelEnergy(x, y, p);
                }));
      stats.Add(g.d_labels, NumericGradient(y, [&](const Vector &x) {
                  return LabelEnergy(f, x, p);
                }));
      const Matrix dp[3] = {g.d_params.local, Matrix(g.d_params.label_weights),
                            g.d_params.interaction};
      for (int which = 0; which < 3; ++which) {
        stats.Add(dp[which],
                  NumericGradient(LabelParam(p, which), [&](const Matrix &x) {
                    return LabelEnergy(f, y, WithLabel(p, which, x));
                  }));
      }
      ++stats.instances;
    }

    // Hinge distance, with radii spread so both sides of the kink occur.
    {
      HypersphereSet s = InitCentroids(classes, d, rng.Index(1u << 30), 1.0);
      s.radii = Vector::Constant(classes, 0.2 + rng.Uniform());
      const Vector e = RandomVector(rng, d);
      const int c = rng.Between(0, classes - 1);
      if (std::abs((s.centroids.row(c).transpose() - e).norm() - s.radii(c)) >
          1e-4) {
        hinge.Add(HingeDistanceGradient(e, c, s),
                  NumericGradient(e, [&](const Vector &x) {
                    return HingeDistance(x, c, s);
                  }));
        ++hinge.instances;
      }
    }

    // Structured cost.
    {
      const Matrix pred = RandomSimplexRows(rng, n, k_tok);
      const Matrix gold = RandomOneHotRows(rng, n, k_tok);
      cost.Add(StructuredCostGradient(pred, gold),
               NumericGradient(pred, [&](const Matrix &x) {
                 return StructuredCost(x, gold);
               }));
      ++cost.instances;
    }

    // Token-level hinge loss (hinge + mu * CE).
    {
      const Matrix f = RandomMatrix(rng, n, d);
      const Matrix pred = RandomSimplexRows(rng, n, k_tok);
      const Matrix gold = RandomOneHotRows(rng, n, k_tok);
      const TokenEnergyParams p = RandomTokenParams(rng, k_tok, d);
      const double mu = rng.Uniform();
      auto value = [&](const Matrix &ff, const Matrix &pp,
                       const TokenEnergyParams &pr) {
        return TokenLevelLossWithGradient(ff, pp, gold, pr, mu).value;
      };
      const TokenLevelLoss l = TokenLevelLossWithGradient(f, pred, gold, p, mu);
      const double margin =
          StructuredCost(pred, gold) - TokenEnergy(f, pred, p) +
          TokenEnergy(f, gold, p);
      if (std::abs(margin) > 1e-4) {
        token_loss.Add(l.d_features, NumericGradient(f, [&](const Matrix &x) {
                         return value(x, pred, p);
                       }));
        token_loss.Add(l.d_pred, NumericGradient(pred, [&](const Matrix &x) {
                         return value(f, x, p);
                       }));
        token_loss.Add(l.d_params.local,
                       NumericGradient(p.local, [&](const Matrix &x) {
                         return value(f, pred, WithToken(p, 0, x));
                       }));
        token_loss.Add(l.d_params.transition,
                       NumericGradient(p.transition, [&](const Matrix &x) {
                         return value(f, pred, WithToken(p, 1, x));
                       }));
        ++token_loss.instances;
      }
    }

    for (int level = 0; level < 2; ++level) {
      const int dim = level == 0 ? d : 3 * d;
      const int k = level == 0 ? classes : relations;
      GradStats &stats = level == 0 ? sentence_loss : document_loss;
      const Vector f = RandomVector(rng, dim);
      const Vector pred = RandomSimplexRows(rng, 1, k).row(0).transpose();
      const Vector gold = RandomOneHotRows(rng, 1, k).row(0).transpose();
      const LabelEnergyParams p = RandomLabelParams(rng, k, dim);
      const double mu = rng.Uniform();
      auto value = [&](const Vector &ff, const Vector &pp,
                       const LabelEnergyParams &pr) {
        return LabelLevelLossWithGradient(ff, pp, gold, pr, mu).value;
      };
      const double margin = StructuredCost(Matrix(pred), Matrix(gold)) -
                            LabelEnergy(f, pred, p) + LabelEnergy(f, gold, p);
      if (std::abs(margin) <= 1e-4) continue;
      const LabelLevelLoss l = LabelLevelLossWithGradient(f, pred, gold, p, mu);
      stats.Add(l.d_feature, NumericGradient(f, [&](const Vector &x) {
                  return value(x, pred, p);
                }));
      stats.Add(l.d_pred, NumericGradient(pred, [&](const Vector &x) {
                  return value(f, x, p);
                }));
      const Matrix dp[3] = {l.d_params.local, Matrix(l.d_params.label_weights),
                            l.d_params.interaction};
      for (int which = 0; which < 3; ++which) {
        stats.Add(dp[which],
                  NumericGradient(LabelParam(p, which), [&](const Matrix &x) {
                    return value(f, pred, WithLabel(p, which, x));
                  }));
      }
      ++stats.instances;
    }
  }

  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  bool ok = seconds < 60.0;
  std::string detail;
  for (const GradStats *s :
       {&token_energy, &sentence_energy, &document_energy, &hinge, &cost,
        &token_loss, &sentence_loss, &document_loss}) {
    ok = ok && s->instances >= 100 && s->worst <= testing::kGradTolerance;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s%s n=%d max_rel=%.2e",
                  detail.empty() ? "" : "; ", s->name.c_str(), s->instances,
                  s->worst);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "; %.1fs", seconds);
  Report(1, ok, "analytic vs central differences: " + detail + buf);
}

void ZeroAtTruthCriterion() {
  Rng rng(77);
  const EnergyParams params = EnergyParams::Init(4, 3, 6, 5, 1.0);
  bool ok = true;
  int checked = 0;
  for (int it = 0; it < 200; ++it) {
    const int n = rng.Between(1, 6);
    const Matrix f = RandomMatrix(rng, n, 6);
    const Matrix gold_tok = RandomOneHotRows(rng, n, 6);
    const TokenLevelLoss t =
        TokenLevelLossWithGradient(f, gold_tok, gold_tok, params.token, 1.0);
    ok = ok && t.hinge == 0.0 && t.ce == 0.0 && t.value == 0.0;

    const Vector m = RandomVector(rng, 6);
    const Vector gold_sen = OneHot(rng.Between(0, 3), 4);
    const LabelLevelLoss s =
        LabelLevelLossWithGradient(m, gold_sen, gold_sen, params.sentence, 1.0);
    ok = ok && s.hinge == 0.0 && s.ce == 0.0 && s.value == 0.0;

    const Vector pair = RandomVector(rng, 18);
    const Vector gold_doc = OneHot(rng.Between(0, 2), 3);
    const LabelLevelLoss dl =
        LabelLevelLossWithGradient(pair, gold_doc, gold_doc, params.document, 1.0);
    ok = ok && dl.hinge == 0.0 && dl.ce == 0.0 && dl.value == 0.0;
    checked += 3;
  }
  Report(2, ok,
         "gold one-hots give hinge == 0 and CE == 0 exactly on " +
             std::to_string(checked) + " instances");
}

void MeasurementCriterion() {
  Rng rng(99);
  const HypersphereSet spheres = InitCentroids(5, 8, 3, 1.0);
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const Vector e = RandomVector(rng, 8, 1.0 + 3.0 * rng.Uniform());
    worst = std::max(worst, std::abs(Measure(e, spheres).sum() - 1.0));
  }
  // Centroids at distance 1 and 3 from the origin embedding, radius 1.
  HypersphereSet two;
  two.centroids = Matrix::Zero(2, 2);
  two.centroids(0, 0) = 1.0;
  two.centroids(1, 1) = 3.0;
  two.radii = Vector::Constant(2, 1.0);
  const Vector s = Measure(Vector::Zero(2), two);
  const double e0 = 1.0, e2 = std::exp(-2.0);
  const double want0 = e0 / (e0 + e2), want1 = e2 / (e0 + e2);
  const bool ok = worst <= 1e-6 && std::abs(s(0) - 0.8808) <= 1e-3 &&
                  std::abs(s(1) - 0.1192) <= 1e-3 &&
                  std::abs(s(0) - want0) <= 1e-12 &&
                  std::abs(s(1) - want1) <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |sum-1| over 10^4 embeddings = %.2e; two-class example "
                "= (%.4f, %.4f)",
                worst, s(0), s(1));
  Report(3, ok, buf);
}

void MetricsCriterion() {
  Rng rng(4242);
  bool ok = true;
  for (int it = 0; it < 1000; ++it) {
    const int labels = rng.Between(2, 6);
    const int n = rng.Between(0, 40);
    std::vector<int> pred(n), gold(n);
    for (int k = 0; k < n; ++k) {
      gold[k] = rng.Between(0, labels - 1);
      pred[k] = rng.Uniform() < 0.5 ? gold[k] : rng.Between(0, labels - 1);
    }
    std::set<int> excluded;
    for (int l = 0; l < labels; ++l) {
      if (rng.Uniform() < 0.3) excluded.insert(l);
    }
    // Brute-force counter.
    long tp = 0, fp = 0, fn = 0;
    for (int k = 0; k < n; ++k) {
      const bool g_in = excluded.find(gold[k]) == excluded.end();
      const bool p_in = excluded.find(pred[k]) == excluded.end();
      if (pred[k] == gold[k] && g_in) ++tp;
      if (pred[k] != gold[k] && p_in) ++fp;
      if (pred[k] != gold[k] && g_in) ++fn;
    }
    const double p = tp + fp > 0 ? 100.0 * tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? 100.0 * tp / (tp + fn) : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    const MetricsReport m = MicroPrf(pred, gold, excluded, "fixture");
    ok = ok && m.true_positives == tp && m.false_positives == fp &&
         m.false_negatives == fn && std::abs(m.precision - p) < 1e-9 &&
         std::abs(m.recall - r) < 1e-9 && std::abs(m.f1 - f) < 1e-9;
  }
  const double f1 = F1FromPrecisionRecall(78.82, 79.37);
  ok = ok && std::abs(f1 - 79.09) <= 0.01;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "micro P/R/F1 match brute force on 1000 fixtures; "
                "F1(78.82, 79.37) = %.4f",
                f1);
  Report(4, ok, buf);
}

TrainConfig AcceptanceConfig() {
  TrainConfig c;
  c.synthetic = true;
  c.synthesis = SynthesisOptions{};  // 200 docs, 5 classes, 4 relations, seed 7
  c.ApplyRegime("balanced");
  c.epochs = 30;
  c.lr = 1e-2;
  c.seed = 1;
  c.encoder.seed = c.seed;
  return c;
}

// Mean of one hinge column over the steps of an epoch.
double EpochHinge(const TrainingLog &log, int epoch, int level) {
  double sum = 0.0;
  int count = 0;
  for (const StepLog &s : log.steps) {
    if (s.epoch != epoch) continue;
    sum += level == 0   ? s.loss.token_hinge
           : level == 1 ? s.loss.sentence_hinge
                        : s.loss.document_hinge;
    ++count;
  }
  return count ? sum / count : 0.0;
}

struct RunOutcome {
  std::string reports;
  std::string hash;
};

void TrainingCriteria() {
  const TrainConfig config = AcceptanceConfig();
  const LoadedCorpus train = LoadSplit(config, "train");
  const LoadedCorpus held = LoadSplit(config, "test", train.spaces);

  auto run = [&](TrainResult *out) {
    const auto start = std::chrono::steady_clock::now();
    *out = Train(train.documents, train.spaces, config);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  TrainResult first;
  const double seconds = run(&first);
  const Checkpoint &ck = first.checkpoint;

  const MetricsReport trig_train = Evaluate(ck, train.documents, Task::kTrigger);
  const MetricsReport trig_held = Evaluate(ck, held.documents, Task::kTrigger);
  const MetricsReport event_train = Evaluate(ck, train.documents, Task::kEvent);
  const MetricsReport event_held = Evaluate(ck, held.documents, Task::kEvent);
  const MetricsReport ere_held = Evaluate(ck, held.documents, Task::kEre);
  const MetricsReport baseline = MajorityRelationBaseline(
      train.documents, held.documents, train.spaces, config.mention_cap);
  {
    const bool ok = trig_train.f1 >= 95.0 && trig_held.f1 >= 80.0 &&
                    std::abs(event_held.f1 - trig_held.f1) <= 3.0 &&
                    std::abs(event_train.f1 - trig_train.f1) <= 3.0 &&
                    ere_held.f1 >= baseline.f1 + 20.0 && seconds <= 600.0;
    char buf[400];
    std::snprintf(buf, sizeof(buf),
                  "trigger F1 train %.2f held-out %.2f; event F1 train %.2f "
                  "held-out %.2f; ERE F1 held-out %.2f vs majority baseline "
                  "%.2f; %.1fs",
                  trig_train.f1, trig_held.f1, event_train.f1, event_held.f1,
                  ere_held.f1, baseline.f1, seconds);
    Report(5, ok, buf);
  }

  {
    const int last = config.epochs;
    bool ok = true;
    std::string detail;
    const char *names[] = {"token", "sentence", "document"};
    for (int level = 0; level < 3; ++level) {
      const double h0 = EpochHinge(first.log, 1, level);
      const double h1 = EpochHinge(first.log, last, level);
      ok = ok && h1 < 0.5 * h0;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s hinge %.4g -> %.4g; ", names[level],
                    h0, h1);
      detail += buf;
    }
    const EnergySeparation sep = MeasureEnergySeparation(
        train.documents, ck.vocab, ck.spaces, ck.params, config.mention_cap, 11);
    ok = ok && sep.token_gold < sep.token_wrong &&
         sep.sentence_gold < sep.sentence_wrong &&
         sep.document_gold < sep.document_wrong;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "E(gold) vs E(wrong): token %.3f < %.3f, sentence %.3f < "
                  "%.3f, document %.3f < %.3f",
                  sep.token_gold, sep.token_wrong, sep.sentence_gold,
                  sep.sentence_wrong, sep.document_gold, sep.document_wrong);
    Report(6, ok, detail + buf);
  }

  {
    const SphereConcentration c = MeasureSphereConcentration(
        train.documents, ck.vocab, ck.params, config.mention_cap);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%lld/%lld training mentions closer to their gold centroid "
                  "(%.1f%%); mean hinge gold %.4f, nearest wrong %.4f",
                  static_cast<long long>(c.closer_to_gold),
                  static_cast<long long>(c.mentions), 100.0 * c.fraction(),
                  c.mean_gold_hinge, c.mean_nearest_wrong_hinge);
    Report(7, c.fraction() >= 0.9, buf);
  }

  {
    auto summarize = [&](const TrainResult &r) {
      RunOutcome o;
      for (Task t : {Task::kTrigger, Task::kEvent, Task::kEre}) {
        o.reports += Evaluate(r.checkpoint, train.documents, t).ToJson();
        o.reports += Evaluate(r.checkpoint, held.documents, t).ToJson();
      }
      o.hash = CheckpointHash(r.checkpoint);
      return o;
    };
    TrainResult second;
    run(&second);
    const RunOutcome a = summarize(first), b = summarize(second);
    Report(8, a.reports == b.reports && a.hash == b.hash,
           "same seed twice: reports " +
               std::string(a.reports == b.reports ? "identical" : "differ") +
               ", checkpoint sha256 " + a.hash.substr(0, 16) + " vs " +
               b.hash.substr(0, 16));
  }
}

}  // namespace
}  // namespace ecsp

int main() {
  try {
    ecsp::GradientCriterion();
    ecsp::ZeroAtTruthCriterion();
    ecsp::MeasurementCriterion();
    ecsp::MetricsCriterion();
    ecsp::TrainingCriteria();
  } catch (const std::exception &e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  return ecsp::failures == 0 ? 0 : 1;
}
