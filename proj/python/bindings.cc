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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecsp/common.h"
#include "ecsp/config.h"
#include "ecsp/corpus.h"
#include "ecsp/hypersphere.h"
#include "ecsp/metrics.h"
#include "ecsp/model.h"
#include "ecsp/trainer.h"

namespace py = pybind11;

namespace ecsp {
namespace {

py::dict ReportDict(const MetricsReport &r) {
  py::dict d;
  d["task"] = r.task;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["tp"] = r.true_positives;
  d["fp"] = r.false_positives;
  d["fn"] = r.false_negatives;
  d["support"] = r.support;
  d["zero_division"] = r.zero_division;
  return d;
}

TrainConfig ConfigFrom(const KeyValues &kv) {
  return TrainConfig::FromKeyValues(kv);
}

InferenceOptions Options(const Checkpoint &ck, const std::string &mode,
                         std::optional<int> mention_cap) {
  InferenceOptions opt;
  opt.mode = ParseInferenceMode(mode);
  opt.mention_cap = mention_cap.value_or(ck.config.mention_cap);
  return opt;
}

std::vector<Document> Docs(const Checkpoint &ck, const std::string &data,
                           const std::string &split) {
  if (!data.empty()) {
    return LoadCorpus(data, ck.spaces, ck.config.max_length).documents;
  }
  return LoadSplit(ck.config, split, ck.spaces).documents;
}

}  // namespace
}  // namespace ecsp

PYBIND11_MODULE(_ecsp, m) {
  using namespace ecsp;
  m.doc() = "Energy-based event modelling on hyperspheres.";

  py::register_exception<Error>(m, "Error");
  static py::exception<ConfigError> config_error(m, "ConfigError",
                                                 m.attr("Error"));
  static py::exception<ValidationError> validation_error(m, "ValidationError",
                                                         m.attr("Error"));
  static py::exception<ParseError> parse_error(m, "ParseError",
                                               m.attr("Error"));
  static py::exception<CheckpointError> checkpoint_error(m, "CheckpointError",
                                                         m.attr("Error"));
  static py::exception<TrainingError> training_error(m, "TrainingError",
                                                     m.attr("Error"));
  static py::exception<ContractError> contract_error(m, "ContractError",
                                                     m.attr("Error"));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError &e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const ValidationError &e) {
      PyErr_SetString(validation_error.ptr(), e.what());
    } catch (const ParseError &e) {
      PyErr_SetString(parse_error.ptr(), e.what());
    } catch (const CheckpointError &e) {
      PyErr_SetString(checkpoint_error.ptr(), e.what());
    } catch (const TrainingError &e) {
      PyErr_SetString(training_error.ptr(), e.what());
    } catch (const ContractError &e) {
      PyErr_SetString(contract_error.ptr(), e.what());
    }
  });

  m.def(
      "micro_prf",
      [](const std::vector<int> &pred, const std::vector<int> &gold,
         const std::set<int> &excluded) {
        return ReportDict(MicroPrf(pred, gold, excluded));
      },
      py::arg("pred"), py::arg("gold"), py::arg("excluded") = std::set<int>{});
  m.def("f1", &F1FromPrecisionRecall, py::arg("precision"), py::arg("recall"));

  m.def(
      "measure",
      [](const Vector &embedding, const Matrix &centroids, double radius) {
        HypersphereSet s{centroids, Vector::Constant(centroids.rows(), radius)};
        return Measure(embedding, s);
      },
      py::arg("embedding"), py::arg("centroids"), py::arg("radius"));

  m.def(
      "synthesize",
      [](const std::string &path, int n_docs, uint64_t seed) {
        SynthesisOptions opt;
        opt.n_docs = n_docs;
        opt.seed = seed;
        const SyntheticCorpus c = SynthesizeCorpus(opt);
        WriteCorpus(path, c.documents, c.spaces);
        return ComputeStats(c.documents, c.spaces).mention_count;
      },
      py::arg("path"), py::arg("n_docs") = 200, py::arg("seed") = 7,
      "Writes a synthetic JSONL corpus and returns its mention count.");

  m.def(
      "corpus_stats",
      [](const std::string &path) {
        const LoadedCorpus c = LoadCorpus(path);
        py::dict d;
        d["documents"] = c.stats.document_count;
        d["mentions"] = c.stats.mention_count;
        d["event_classes"] = c.spaces.event_classes();
        d["relations"] = c.spaces.relations();
        return d;
      },
      py::arg("path"));

  m.def(
      "train",
      [](const KeyValues &config, const std::string &out_dir) {
        const TrainConfig cfg = ConfigFrom(config);
        TrainResult result;
        {
          py::gil_scoped_release release;
          const LoadedCorpus train = LoadSplit(cfg, "train");
          const LoadedCorpus valid = LoadSplit(cfg, "valid", train.spaces);
          result = Train(train.documents, train.spaces, cfg, &valid.documents,
                         out_dir);
        }
        SaveCheckpoint(out_dir + "/checkpoint.json", result.checkpoint);
        result.log.WriteCsv(out_dir + "/train_log.csv");
        return CheckpointHash(result.checkpoint);
      },
      py::arg("config"), py::arg("out_dir"),
      "Trains from string key-values, writes checkpoint.json and "
      "train_log.csv, and returns the checkpoint SHA-256.");

  m.def(
      "evaluate",
      [](const std::string &checkpoint, const std::string &task,
         const std::string &data, const std::string &split,
         const std::string &mode, std::optional<int> mention_cap) {
        const Checkpoint ck = LoadCheckpoint(checkpoint);
        return ReportDict(Evaluate(ck, Docs(ck, data, split), ParseTask(task),
                                   Options(ck, mode, mention_cap)));
      },
      py::arg("checkpoint"), py::arg("task") = "trigger", py::arg("data") = "",
      py::arg("split") = "test", py::arg("mode") = "classifier",
      py::arg("mention_cap") = py::none());

  m.def(
      "predict",
      [](const std::string &checkpoint, const std::string &data,
         const std::string &split, const std::string &mode,
         std::optional<int> mention_cap) {
        const Checkpoint ck = LoadCheckpoint(checkpoint);
        const InferenceOptions opt = Options(ck, mode, mention_cap);
        py::list docs;
        for (const Document &doc : Docs(ck, data, split)) {
          const DocumentPrediction p =
              Predict(doc, ck.vocab, ck.spaces, ck.params, opt);
          py::list mentions, pairs;
          for (const MentionPrediction &mp : p.mentions) {
            mentions.append(ck.spaces.event_classes()[mp.event_class]);
          }
          for (const PairPrediction &pp : p.pairs) {
            pairs.append(py::make_tuple(pp.i, pp.j,
                                        ck.spaces.relations()[pp.relation]));
          }
          py::dict d;
          d["doc_id"] = doc.doc_id;
          d["events"] = mentions;
          d["relations"] = pairs;
          docs.append(d);
        }
        return docs;
      },
      py::arg("checkpoint"), py::arg("data") = "", py::arg("split") = "test",
      py::arg("mode") = "classifier", py::arg("mention_cap") = py::none());

  m.def(
      "checkpoint_hash",
      [](const std::string &path) { return CheckpointHash(LoadCheckpoint(path)); },
      py::arg("path"));

  m.def(
      "loss_series",
      [](const std::string &path) {
        const LossSeries s = ReadLossCsv(path);
        py::dict d;
        d["step"] = s.step;
        d["token"] = s.token;
        d["sentence"] = s.sentence;
        d["document"] = s.document;
        d["penalty"] = s.penalty;
        return d;
      },
      py::arg("path"));

  m.def("regimes", [] {
    py::dict d;
    for (const RegimePreset &r : RegimePresets()) {
      d[py::str(r.name)] =
          py::make_tuple(r.lambda_token, r.lambda_sentence, r.lambda_document);
    }
    return d;
  });
}
