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

// Documents, event mentions, label inventories and the JSONL corpus format.
//
// A corpus file holds one document per line:
//
//   {"doc_id": "d1",
//    "mentions": [{"tokens": ["troops", "attacked"], "trigger_index": 2,
//                  "event_class": "Attack"}],
//    "relations": [{"i": 0, "j": 1, "label": "CAUSE"}]}
//
// trigger_index is 1-based. Relation endpoints i, j are 0-based positions in
// the mention list; pairs are unordered and stored with i < j. Pairs that are
// not listed carry the NA relation.

#ifndef ECSP_CORPUS_H_
#define ECSP_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ecsp {

inline constexpr int kMaxSequenceLength = 128;
inline constexpr int kDefaultMentionCap = 40;
inline constexpr char kNoneClass[] = "None";
inline constexpr char kNoRelation[] = "NA";

// Ordered event-class and relation inventories.
//
// Token labels are 0-based: [0, |E|) are event classes, |E| marks a
// non-trigger token and |E|+1 a padding token.
class LabelSpaces {
 public:
  LabelSpaces() = default;

  // Validates that "None" and "NA" each occur exactly once and that names
  // are unique. Throws ValidationError otherwise.
  LabelSpaces(std::vector<std::string> event_classes,
              std::vector<std::string> relations);

  const std::vector<std::string> &event_classes() const {
    return event_classes_;
  }
  const std::vector<std::string> &relations() const { return relations_; }

  int num_classes() const { return static_cast<int>(event_classes_.size()); }
  int num_relations() const { return static_cast<int>(relations_.size()); }
  int token_label_count() const { return num_classes() + 2; }
  int non_trigger_label() const { return num_classes(); }
  int padding_label() const { return num_classes() + 1; }
  int none_class() const { return none_class_; }
  int na_relation() const { return na_relation_; }

  std::optional<int> ClassIndex(const std::string &name) const;
  std::optional<int> RelationIndex(const std::string &name) const;

  bool operator==(const LabelSpaces &other) const = default;

 private:
  std::vector<std::string> event_classes_;
  std::vector<std::string> relations_;
  int none_class_ = -1;
  int na_relation_ = -1;
};

struct EventMention {
  std::string mention_id;
  std::vector<std::string> tokens;
  int trigger_index = 1;  // 1-based
  int event_class = 0;

  bool operator==(const EventMention &other) const = default;
};

struct RelationAnnotation {
  int i = 0;
  int j = 0;
  int label = 0;

  bool operator==(const RelationAnnotation &other) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<EventMention> mentions;
  // File order is preserved; every entry has i < j and pairs are unique.
  std::vector<RelationAnnotation> relations;

  // Relation of the unordered pair {a, b}, or `na` when unannotated.
  int RelationOf(int a, int b, int na) const;

  bool operator==(const Document &other) const = default;
};

struct CorpusStats {
  int64_t document_count = 0;
  int64_t mention_count = 0;
  // Annotated pairs per relation, aligned with LabelSpaces::relations().
  std::vector<int64_t> relation_counts;

  int64_t Count(const LabelSpaces &spaces, const std::string &relation) const;
};

struct LoadedCorpus {
  std::vector<Document> documents;
  LabelSpaces spaces;
  CorpusStats stats;
};

// Reads a JSONL corpus. With `spaces` supplied, unknown labels are rejected;
// otherwise the inventories are built from the data ("None"/"NA" first, then
// first-appearance order). Token lists are truncated to `max_length`.
// Throws ParseError (with the line number) or ValidationError.
LoadedCorpus LoadCorpus(const std::string &path,
                        const std::optional<LabelSpaces> &spaces = std::nullopt,
                        int max_length = kMaxSequenceLength);

// Same as LoadCorpus but reads from an in-memory JSONL string.
LoadedCorpus ParseCorpus(const std::string &jsonl,
                         const std::optional<LabelSpaces> &spaces = std::nullopt,
                         int max_length = kMaxSequenceLength);

std::string SerializeCorpus(const std::vector<Document> &documents,
                            const LabelSpaces &spaces);
void WriteCorpus(const std::string &path,
                 const std::vector<Document> &documents,
                 const LabelSpaces &spaces);

CorpusStats ComputeStats(const std::vector<Document> &documents,
                         const LabelSpaces &spaces);

// Mention id assigned when the file does not provide one.
std::string DefaultMentionId(const std::string &doc_id, int index);

struct MentionPair {
  int i = 0;
  int j = 0;
  int relation = 0;

  bool operator==(const MentionPair &other) const = default;
};

// All unordered pairs i < j among the first min(#mentions, cap) mentions,
// in row-major order. Unannotated pairs are labelled `na`.
std::vector<MentionPair> EnumeratePairs(const Document &doc, int cap, int na);

struct SynthesisOptions {
  int n_docs = 200;
  int n_classes = 5;    // includes None
  int n_relations = 4;  // includes NA
  int vocab_size = 100;
  int mentions_per_doc = 6;
  uint64_t seed = 7;
  int min_tokens = 6;
  int max_tokens = 12;
  // Probability that a pair keeps its rule relation instead of NA.
  double relation_keep_prob = 0.85;
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  LabelSpaces spaces;
};

// Event-class prior used by the generator (index 0 is None).
std::vector<double> SyntheticClassPrior(int n_classes);

// Deterministic learnable corpus: each class owns a disjoint set of
// signature trigger tokens, remaining vocabulary is filler, and relations
// follow a fixed additive score rule over the ordered class pair with
// Bernoulli(relation_keep_prob) annotation noise. Throws ConfigError on
// invalid counts.
SyntheticCorpus SynthesizeCorpus(const SynthesisOptions &options);

// Relation the generator's rule assigns to an ordered class pair before
// annotation noise.
int SyntheticRelationRule(const SynthesisOptions &options, int first_class,
                          int second_class);

// Splits documents in order: the first (1 - holdout) fraction for training.
std::pair<std::vector<Document>, std::vector<Document>> SplitHoldout(
    const std::vector<Document> &documents, double holdout_fraction);

}  // namespace ecsp

#endif  // ECSP_CORPUS_H_
