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

#include "cli.h"

#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecsp/config.h"
#include "ecsp/plot.h"
#include "ecsp/trainer.h"
#include "json.hpp"

namespace ecsp {

namespace {

struct TrainArgs {
  std::string config;
  std::string regime;
  std::optional<uint64_t> seed;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<int> mention_cap;
  bool synthetic = false;
  std::string out = "run";
};

struct EvalArgs {
  std::string checkpoint;
  std::string task = "trigger";
  std::string split = "test";
  std::string data;
  std::string mode = "classifier";
  std::string ere_regime;
  std::optional<int> mention_cap;
  bool json = false;
};

struct PredictArgs {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string task = "event";
  std::string out;
  std::string mode = "classifier";
  std::optional<int> mention_cap;
};

struct PlotEnergyArgs {
  std::string log;
  std::string out;
};

struct PlotSphereArgs {
  std::string checkpoint;
  std::string class_name;
  std::string data;
  std::string split = "train";
  std::string out;
};

LoadedCorpus Resolve(const Checkpoint &ck, const std::string &data,
                     const std::string &split) {
  if (!data.empty()) return LoadCorpus(data, ck.spaces, ck.config.max_length);
  return LoadSplit(ck.config, split, ck.spaces);
}

int RunTrain(const TrainArgs &a, std::ostream &out) {
  TrainConfig config;
  if (!a.config.empty()) {
    config = TrainConfig::FromKeyValues(ReadKeyValueFile(a.config));
  }
  if (!a.regime.empty()) config.ApplyRegime(a.regime);
  if (a.seed) config.seed = *a.seed;
  if (a.epochs) config.epochs = *a.epochs;
  if (a.lr) config.lr = *a.lr;
  if (a.mention_cap) config.mention_cap = *a.mention_cap;
  if (a.synthetic) config.synthetic = true;
  config.encoder.seed = config.seed;
  config.Validate();

  LoadedCorpus train = LoadSplit(config, "train");
  std::optional<LoadedCorpus> valid;
  if (config.synthetic || !config.valid_path.empty()) {
    valid = LoadSplit(config, "valid", train.spaces);
  }
  out << "train: " << train.stats.document_count << " documents, "
      << train.stats.mention_count << " mentions\n";

  std::filesystem::create_directories(a.out);
  TrainResult result =
      Train(train.documents, train.spaces, config,
            valid ? &valid->documents : nullptr, a.out);
  for (const EpochLog &e : result.log.epochs) {
    out << "epoch " << e.epoch << " total " << FormatDouble(e.loss.total)
        << " L_tok " << FormatDouble(e.loss.token) << " L_sen "
        << FormatDouble(e.loss.sentence) << " L_doc "
        << FormatDouble(e.loss.document);
    if (e.trigger_f1) out << " trigger_f1 " << FormatDouble(*e.trigger_f1);
    if (e.event_f1) out << " event_f1 " << FormatDouble(*e.event_f1);
    if (e.ere_f1) out << " ere_f1 " << FormatDouble(*e.ere_f1);
    out << "\n";
  }
  const std::string ck_path =
      (std::filesystem::path(a.out) / "checkpoint.json").string();
  const std::string log_path =
      (std::filesystem::path(a.out) / "train_log.csv").string();
  SaveCheckpoint(ck_path, result.checkpoint);
  result.log.WriteCsv(log_path);
  out << "checkpoint " << ck_path << " sha256 "
      << CheckpointHash(result.checkpoint) << "\n";
  out << "log " << log_path << "\n";
  return 0;
}

InferenceOptions Inference(const Checkpoint &ck, const std::string &mode,
                           const std::optional<int> &cap) {
  InferenceOptions o;
  o.mode = ParseInferenceMode(mode);
  o.mention_cap = cap ? *cap : ck.config.mention_cap;
  if (o.mention_cap < 2) throw ConfigError("mention cap must be >= 2");
  return o;
}

int RunEval(const EvalArgs &a, std::ostream &out) {
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const Task task = ParseTask(a.task);
  const LoadedCorpus corpus = Resolve(ck, a.data, a.split);
  const InferenceOptions options = Inference(ck, a.mode, a.mention_cap);
  std::vector<MetricsReport> reports;
  reports.push_back(Evaluate(ck, corpus.documents, task, options));
  if (task == Task::kEre && !a.ere_regime.empty()) {
    const TaskLabels labels =
        CollectTaskLabels(ck, corpus.documents, task, options);
    for (const MetricsReport &r :
         EreRegimeEval(labels.pred, labels.gold, ck.spaces,
                       ParseEreRegime(a.ere_regime))) {
      reports.push_back(r);
    }
  }
  if (a.json) {
    for (const MetricsReport &r : reports) out << r.ToJson() << "\n";
  } else {
    out << FormatReports(reports);
  }
  return 0;
}

int RunPredict(const PredictArgs &a, std::ostream &out) {
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const LoadedCorpus corpus = Resolve(ck, a.data, a.split);
  const InferenceOptions options = Inference(ck, a.mode, a.mention_cap);
  if (a.task != "trigger" && a.task != "event" && a.task != "ere" &&
      a.task != "all") {
    throw ConfigError("unknown task '" + a.task + "' (trigger|event|ere|all)");
  }
  const bool mentions = a.task != "ere";
  const bool pairs = a.task == "ere" || a.task == "all";
  const LabelSpaces &spaces = ck.spaces;
  auto token_name = [&](int label) -> std::string {
    if (label == spaces.non_trigger_label()) return "O";
    if (label == spaces.padding_label()) return "PAD";
    return spaces.event_classes()[label];
  };

  std::ofstream file;
  std::ostream *sink = &out;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out, std::ios::binary);
    if (!file) throw Error("cannot write '" + a.out + "'");
    sink = &file;
  }
  int64_t lines = 0;
  for (const Document &doc : corpus.documents) {
    const DocumentPrediction p =
        Predict(doc, ck.vocab, spaces, ck.params, options);
    if (mentions) {
      for (size_t k = 0; k < p.mentions.size(); ++k) {
        const EventMention &m = doc.mentions[k];
        const MentionPrediction &mp = p.mentions[k];
        const int t = m.trigger_index - 1;
        nlohmann::ordered_json j;
        j["doc_id"] = doc.doc_id;
        j["mention"] = k;
        j["mention_id"] =
            m.mention_id.empty() ? DefaultMentionId(doc.doc_id, static_cast<int>(k))
                                 : m.mention_id;
        j["event_class"] = spaces.event_classes()[mp.event_class];
        j["score"] = mp.class_probs(mp.event_class);
        j["trigger_label"] = token_name(mp.token_labels[t]);
        j["trigger_score"] = mp.token_probs(t, mp.token_labels[t]);
        std::vector<std::string> labels;
        for (int label : mp.token_labels) labels.push_back(token_name(label));
        j["token_labels"] = labels;
        *sink << j.dump() << "\n";
        ++lines;
      }
    }
    if (pairs) {
      for (const PairPrediction &pp : p.pairs) {
        nlohmann::ordered_json j;
        j["doc_id"] = doc.doc_id;
        j["i"] = pp.i;
        j["j"] = pp.j;
        j["relation"] = spaces.relations()[pp.relation];
        j["score"] = pp.probs(pp.relation);
        *sink << j.dump() << "\n";
        ++lines;
      }
    }
  }
  if (sink != &out) out << "wrote " << lines << " predictions to " << a.out << "\n";
  return 0;
}

int RunPlotEnergy(const PlotEnergyArgs &a, std::ostream &out) {
  const PlotFormat format = FormatForPath(a.out);
  const LossSeries series = ReadLossCsv(a.log);
  if (format == PlotFormat::kSvg) {
    WriteBytes(a.out, RenderLossCurvesSvg(series));
  } else {
    WriteBytes(a.out, RenderLossCurvesPng(series));
  }
  out << "wrote " << a.out << " (" << series.step.size() << " steps)\n";
  return 0;
}

int RunPlotSphere(const PlotSphereArgs &a, std::ostream &out) {
  const PlotFormat format = FormatForPath(a.out);
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const std::optional<int> cls = ck.spaces.ClassIndex(a.class_name);
  if (!cls) throw ValidationError("unknown event class '" + a.class_name + "'");
  const LoadedCorpus corpus = Resolve(ck, a.data, a.split);
  InferenceOptions options;
  options.mention_cap = ck.config.mention_cap;
  std::vector<Vector> embeddings;
  for (const Document &doc : corpus.documents) {
    const DocumentPrediction p =
        Predict(doc, ck.vocab, ck.spaces, ck.params, options);
    for (size_t k = 0; k < p.mentions.size(); ++k) {
      if (doc.mentions[k].event_class == *cls) {
        embeddings.push_back(p.mentions[k].embedding);
      }
    }
  }
  const HypersphereSet &s = ck.params.spheres;
  const SphereView view = ProjectSphere(
      embeddings, s.centroids.row(*cls).transpose(), s.radii(*cls), a.class_name);
  if (format == PlotFormat::kSvg) {
    WriteBytes(a.out, RenderSphereSvg(view));
  } else {
    WriteBytes(a.out, RenderSpherePng(view));
  }
  const SphereConcentration c = MeasureSphereConcentration(
      corpus.documents, ck.vocab, ck.params, ck.config.mention_cap, *cls);
  out << "wrote " << a.out << " (" << embeddings.size() << " mentions; "
      << "mean hinge to centroid " << FormatDouble(c.mean_gold_hinge)
      << ", to nearest other " << FormatDouble(c.mean_nearest_wrong_hinge)
      << ")\n";
  return 0;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Joint event-centric structured prediction"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App *train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", train.config, "Key-value config file")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--regime", train.regime, "Loss-weight preset");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--epochs", train.epochs, "Number of epochs");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--mention-cap", train.mention_cap,
                        "Mentions kept per document");
  train_cmd->add_flag("--synthetic", train.synthetic,
                      "Use the built-in synthetic corpus");
  train_cmd->add_option("--out", train.out, "Output directory")->capture_default_str();

  EvalArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "Score a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--task", eval.task, "trigger|event|ere")->capture_default_str();
  eval_cmd->add_option("--split", eval.split, "train|valid|test")->capture_default_str();
  eval_cmd->add_option("--data", eval.data, "Corpus file overriding --split");
  eval_cmd->add_option("--mode", eval.mode, "classifier|energy")->capture_default_str();
  eval_cmd->add_option("--ere-regime", eval.ere_regime,
                       "Also report +joint or all-joint ERE breakdowns");
  eval_cmd->add_option("--mention-cap", eval.mention_cap);
  eval_cmd->add_flag("--json", eval.json, "One JSON report per line");

  PredictArgs predict;
  CLI::App *predict_cmd = app.add_subcommand("predict", "Write predictions");
  predict_cmd->add_option("--checkpoint", predict.checkpoint)->required();
  predict_cmd->add_option("--data", predict.data, "Corpus file");
  predict_cmd->add_option("--split", predict.split, "Used without --data")->capture_default_str();
  predict_cmd->add_option("--task", predict.task,
                          "trigger|event (per mention), ere (per pair), all")->capture_default_str();
  predict_cmd->add_option("--out", predict.out, "JSONL output (default stdout)");
  predict_cmd->add_option("--mode", predict.mode, "classifier|energy")->capture_default_str();
  predict_cmd->add_option("--mention-cap", predict.mention_cap);

  PlotEnergyArgs plot_energy;
  CLI::App *plot_energy_cmd =
      app.add_subcommand("plot-energy", "Plot per-level loss curves");
  plot_energy_cmd->add_option("--log", plot_energy.log, "Training log CSV")
      ->required();
  plot_energy_cmd->add_option("--out", plot_energy.out, ".svg or .png")
      ->required();

  PlotSphereArgs plot_sphere;
  CLI::App *plot_sphere_cmd =
      app.add_subcommand("plot-sphere", "Project one class's hypersphere");
  plot_sphere_cmd->add_option("--checkpoint", plot_sphere.checkpoint)
      ->required();
  plot_sphere_cmd->add_option("--class", plot_sphere.class_name)->required();
  plot_sphere_cmd->add_option("--data", plot_sphere.data, "Corpus file");
  plot_sphere_cmd->add_option("--split", plot_sphere.split,
                              "Used without --data")->capture_default_str();
  plot_sphere_cmd->add_option("--out", plot_sphere.out, ".svg or .png")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train_cmd) return RunTrain(train, out);
    if (*eval_cmd) return RunEval(eval, out);
    if (*predict_cmd) return RunPredict(predict, out);
    if (*plot_energy_cmd) return RunPlotEnergy(plot_energy, out);
    if (*plot_sphere_cmd) return RunPlotSphere(plot_sphere, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ecsp
