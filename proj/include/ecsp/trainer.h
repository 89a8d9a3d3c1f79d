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

// Joint training loop, evaluation and checkpoints.

#ifndef ECSP_TRAINER_H_
#define ECSP_TRAINER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecsp/config.h"
#include "ecsp/corpus.h"
#include "ecsp/encoders.h"
#include "ecsp/losses.h"
#include "ecsp/metrics.h"
#include "ecsp/model.h"

namespace ecsp {

// Named (lambda_token, lambda_sentence, lambda_document) presets.
struct RegimePreset {
  std::string name;
  double lambda_token;
  double lambda_sentence;
  double lambda_document;
};

const std::vector<RegimePreset> &RegimePresets();
// Throws ConfigError for an unknown name.
const RegimePreset &FindRegime(const std::string &name);

struct TrainConfig {
  double lr = 5e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 30;
  int batch_size = 8;  // documents per step
  uint64_t seed = 1;
  std::string regime = "balanced";
  LossWeights weights;
  CostKind cost = CostKind::kSquaredL2;
  double clip_norm = 5.0;  // <= 0 disables clipping
  // Alternate steps between energy parameters and everything else.
  bool alternating = false;
  int eval_every = 0;  // epochs between validation passes; 0 disables
  int mention_cap = kDefaultMentionCap;
  int max_length = kMaxSequenceLength;
  EncoderConfig encoder;
  double radius = kDefaultRadius;
  bool per_class_radius = false;  // train one radius per class

  // Data. Paths are used when `synthetic` is false.
  std::string train_path, valid_path, test_path;
  bool synthetic = false;
  SynthesisOptions synthesis;
  double holdout_fraction = 0.2;

  // Sets the lambdas from a preset and records its name.
  void ApplyRegime(const std::string &name);
  // Throws ConfigError on invalid values.
  void Validate() const;

  KeyValues ToKeyValues() const;
  // Unknown keys are a ConfigError. A "regime" key applies its preset
  // first; explicit lambda_* keys then override it.
  static TrainConfig FromKeyValues(const KeyValues &kv);
};

struct Checkpoint {
  TrainConfig config;
  LabelSpaces spaces;
  Vocabulary vocab;
  ModelParams params;
};

inline constexpr int kCheckpointVersion = 1;

std::string SerializeCheckpoint(const Checkpoint &checkpoint);
// Throws CheckpointError for corrupt, wrong-version or inconsistent input.
Checkpoint ParseCheckpoint(const std::string &text);
void SaveCheckpoint(const std::string &path, const Checkpoint &checkpoint);
Checkpoint LoadCheckpoint(const std::string &path);
// Hex SHA-256 of the serialized checkpoint.
std::string CheckpointHash(const Checkpoint &checkpoint);

struct StepLog {
  int64_t step = 0;
  int epoch = 0;
  LossBreakdown loss;
};

struct EpochLog {
  int epoch = 0;
  // Means over the epoch's steps.
  LossBreakdown loss;
  std::optional<double> trigger_f1, event_f1, ere_f1;
};

struct TrainingLog {
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;

  // Columns: step,L_tok,L_sen,L_doc,penalty,epoch,H_tok,H_sen,H_doc,total
  std::string ToCsv() const;
  void WriteCsv(const std::string &path) const;
};

// Per-level loss series read back from a training-log CSV.
struct LossSeries {
  std::vector<double> step, token, sentence, document, penalty;
};

// Throws ParseError on malformed CSV and when there are no rows.
LossSeries ParseLossCsv(const std::string &csv);
LossSeries ReadLossCsv(const std::string &path);

struct TrainResult {
  Checkpoint checkpoint;
  TrainingLog log;
};

// Minimizes the joint objective with Adam. Deterministic for a given seed.
// A non-finite loss aborts with TrainingError; when `dump_dir` is set the
// offending batch is written there as nan_batch.jsonl first.
TrainResult Train(const std::vector<Document> &train_docs,
                  const LabelSpaces &spaces, const TrainConfig &config,
                  const std::vector<Document> *valid_docs = nullptr,
                  const std::string &dump_dir = "");

// Continues from explicit initial parameters (e.g. a loaded checkpoint).
TrainResult TrainFrom(Checkpoint initial,
                      const std::vector<Document> &train_docs,
                      const std::vector<Document> *valid_docs = nullptr,
                      const std::string &dump_dir = "");

enum class Task { kTrigger, kEvent, kEre };

Task ParseTask(const std::string &name);
std::string TaskName(Task task);

// Labels excluded from micro counts for a task.
std::set<int> ExcludedLabels(Task task, const LabelSpaces &spaces);

// Aligned prediction / gold label sequences of a task.
struct TaskLabels {
  std::vector<int> pred;
  std::vector<int> gold;
};

TaskLabels CollectTaskLabels(const Checkpoint &checkpoint,
                             const std::vector<Document> &docs, Task task,
                             const InferenceOptions &options);

// Runs a task head over `docs` and scores it. Throws ValidationError when
// a document label falls outside the checkpoint's label spaces.
MetricsReport Evaluate(const Checkpoint &checkpoint,
                       const std::vector<Document> &docs, Task task,
                       std::optional<InferenceOptions> options = std::nullopt);

// ERE F1 of always predicting the most frequent non-NA relation of
// `reference_docs`, scored on `docs`.
MetricsReport MajorityRelationBaseline(
    const std::vector<Document> &reference_docs,
    const std::vector<Document> &docs, const LabelSpaces &spaces,
    int mention_cap);

// Resolves the corpus for a split from the config: explicit paths, or the
// deterministic synthetic corpus ("train" is the first 1-holdout fraction,
// "valid" and "test" both name the held-out remainder).
LoadedCorpus LoadSplit(const TrainConfig &config, const std::string &split,
                       const std::optional<LabelSpaces> &spaces = std::nullopt);

}  // namespace ecsp

#endif  // ECSP_TRAINER_H_
