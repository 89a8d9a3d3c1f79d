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

#include "ecsp/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "ecsp/common.h"
#include "ecsp/rng.h"
#include "json.hpp"

namespace ecsp {

using json = nlohmann::json;

LabelSpaces::LabelSpaces(std::vector<std::string> event_classes,
                         std::vector<std::string> relations)
    : event_classes_(std::move(event_classes)),
      relations_(std::move(relations)) {
  auto check = [](const std::vector<std::string> &names,
                  const std::string &special, const char *what) {
    std::set<std::string> seen;
    int position = -1;
    for (size_t k = 0; k < names.size(); ++k) {
      if (!seen.insert(names[k]).second) {
        throw ValidationError(std::string("duplicate ") + what + " '" +
                              names[k] + "'");
      }
      if (names[k] == special) position = static_cast<int>(k);
    }
    if (position < 0) {
      throw ValidationError(std::string(what) + " inventory lacks '" +
                            special + "'");
    }
    return position;
  };
  none_class_ = check(event_classes_, kNoneClass, "event class");
  na_relation_ = check(relations_, kNoRelation, "relation");
}

std::optional<int> LabelSpaces::ClassIndex(const std::string &name) const {
  auto it = std::find(event_classes_.begin(), event_classes_.end(), name);
  if (it == event_classes_.end()) return std::nullopt;
  return static_cast<int>(it - event_classes_.begin());
}

std::optional<int> LabelSpaces::RelationIndex(const std::string &name) const {
  auto it = std::find(relations_.begin(), relations_.end(), name);
  if (it == relations_.end()) return std::nullopt;
  return static_cast<int>(it - relations_.begin());
}

int Document::RelationOf(int a, int b, int na) const {
  if (a > b) std::swap(a, b);
  for (const RelationAnnotation &r : relations) {
    if (r.i == a && r.j == b) return r.label;
  }
  return na;
}

int64_t CorpusStats::Count(const LabelSpaces &spaces,
                           const std::string &relation) const {
  auto index = spaces.RelationIndex(relation);
  if (!index || *index >= static_cast<int>(relation_counts.size())) return 0;
  return relation_counts[*index];
}

std::string DefaultMentionId(const std::string &doc_id, int index) {
  return doc_id + "#" + std::to_string(index);
}

CorpusStats ComputeStats(const std::vector<Document> &documents,
                         const LabelSpaces &spaces) {
  CorpusStats stats;
  stats.relation_counts.assign(spaces.num_relations(), 0);
  stats.document_count = static_cast<int64_t>(documents.size());
  for (const Document &doc : documents) {
    stats.mention_count += static_cast<int64_t>(doc.mentions.size());
    for (const RelationAnnotation &r : doc.relations) {
      ++stats.relation_counts[r.label];
    }
  }
  return stats;
}

namespace {

// Raw document with string labels, before label resolution.
struct RawMention {
  std::string id;
  std::vector<std::string> tokens;
  int trigger_index;
  std::string event_class;
};

struct RawRelation {
  int i, j;
  std::string label;
};

struct RawDocument {
  int line;
  std::string doc_id;
  std::vector<RawMention> mentions;
  std::vector<RawRelation> relations;
};

std::string At(int line) { return "line " + std::to_string(line) + ": "; }

RawDocument ParseLine(const std::string &text, int line, int max_length) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(At(line) + "malformed JSON: " + e.what());
  }
  RawDocument doc;
  doc.line = line;
  try {
    if (!j.is_object()) throw ParseError(At(line) + "expected an object");
    doc.doc_id = j.at("doc_id").get<std::string>();
    for (const json &m : j.at("mentions")) {
      RawMention mention;
      mention.tokens = m.at("tokens").get<std::vector<std::string>>();
      mention.trigger_index = m.at("trigger_index").get<int>();
      mention.event_class = m.at("event_class").get<std::string>();
      if (m.contains("mention_id")) {
        mention.id = m.at("mention_id").get<std::string>();
      }
      if (static_cast<int>(mention.tokens.size()) > max_length) {
        mention.tokens.resize(max_length);
      }
      doc.mentions.push_back(std::move(mention));
    }
    if (j.contains("relations")) {
      for (const json &r : j.at("relations")) {
        doc.relations.push_back({r.at("i").get<int>(), r.at("j").get<int>(),
                                 r.at("label").get<std::string>()});
      }
    }
  } catch (const json::exception &e) {
    throw ParseError(At(line) + e.what());
  }
  return doc;
}

}  // namespace

LoadedCorpus ParseCorpus(const std::string &jsonl,
                         const std::optional<LabelSpaces> &spaces,
                         int max_length) {
  if (max_length < 1) throw ConfigError("max_length must be positive");
  std::vector<RawDocument> raw;
  std::istringstream in(jsonl);
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    raw.push_back(ParseLine(text, line, max_length));
  }

  LoadedCorpus out;
  if (spaces) {
    out.spaces = *spaces;
  } else {
    std::vector<std::string> classes = {kNoneClass};
    std::vector<std::string> relations = {kNoRelation};
    auto add = [](std::vector<std::string> &names, const std::string &n) {
      if (std::find(names.begin(), names.end(), n) == names.end()) {
        names.push_back(n);
      }
    };
    for (const RawDocument &doc : raw) {
      for (const RawMention &m : doc.mentions) add(classes, m.event_class);
      for (const RawRelation &r : doc.relations) add(relations, r.label);
    }
    out.spaces = LabelSpaces(std::move(classes), std::move(relations));
  }

  for (const RawDocument &rd : raw) {
    Document doc;
    doc.doc_id = rd.doc_id;
    const int n = static_cast<int>(rd.mentions.size());
    for (int k = 0; k < n; ++k) {
      const RawMention &rm = rd.mentions[k];
      auto cls = out.spaces.ClassIndex(rm.event_class);
      if (!cls) {
        throw ValidationError(At(rd.line) + "unknown event class '" +
                              rm.event_class + "'");
      }
      const int len = static_cast<int>(rm.tokens.size());
      if (rm.trigger_index < 1 || rm.trigger_index > len) {
        throw ValidationError(At(rd.line) + "mention " + std::to_string(k) +
                              " trigger_index " +
                              std::to_string(rm.trigger_index) +
                              " outside [1, " + std::to_string(len) + "]");
      }
      EventMention mention;
      mention.mention_id =
          rm.id.empty() ? DefaultMentionId(rd.doc_id, k) : rm.id;
      mention.tokens = rm.tokens;
      mention.trigger_index = rm.trigger_index;
      mention.event_class = *cls;
      doc.mentions.push_back(std::move(mention));
    }
    std::set<std::pair<int, int>> seen;
    for (const RawRelation &rr : rd.relations) {
      auto label = out.spaces.RelationIndex(rr.label);
      if (!label) {
        throw ValidationError(At(rd.line) + "unknown relation '" + rr.label +
                              "'");
      }
      const int a = std::min(rr.i, rr.j), b = std::max(rr.i, rr.j);
      if (a < 0 || b >= n) {
        throw ValidationError(At(rd.line) + "relation endpoint out of range");
      }
      if (a == b) throw ValidationError(At(rd.line) + "self-pair relation");
      if (!seen.insert({a, b}).second) {
        throw ValidationError(At(rd.line) + "pair (" + std::to_string(a) +
                              ", " + std::to_string(b) +
                              ") annotated twice");
      }
      doc.relations.push_back({a, b, *label});
    }
    out.documents.push_back(std::move(doc));
  }
  out.stats = ComputeStats(out.documents, out.spaces);
  return out;
}

LoadedCorpus LoadCorpus(const std::string &path,
                        const std::optional<LabelSpaces> &spaces,
                        int max_length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCorpus(buffer.str(), spaces, max_length);
}

std::string SerializeCorpus(const std::vector<Document> &documents,
                            const LabelSpaces &spaces) {
  std::string out;
  for (const Document &doc : documents) {
    json j;
    j["doc_id"] = doc.doc_id;
    j["mentions"] = json::array();
    for (size_t k = 0; k < doc.mentions.size(); ++k) {
      const EventMention &m = doc.mentions[k];
      json jm;
      jm["tokens"] = m.tokens;
      jm["trigger_index"] = m.trigger_index;
      jm["event_class"] = spaces.event_classes().at(m.event_class);
      if (m.mention_id != DefaultMentionId(doc.doc_id, static_cast<int>(k))) {
        jm["mention_id"] = m.mention_id;
      }
      j["mentions"].push_back(std::move(jm));
    }
    j["relations"] = json::array();
    for (const RelationAnnotation &r : doc.relations) {
      j["relations"].push_back(
          {{"i", r.i}, {"j", r.j}, {"label", spaces.relations().at(r.label)}});
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

void WriteCorpus(const std::string &path,
                 const std::vector<Document> &documents,
                 const LabelSpaces &spaces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write corpus file '" + path + "'");
  out << SerializeCorpus(documents, spaces);
}

std::vector<MentionPair> EnumeratePairs(const Document &doc, int cap, int na) {
  ECSP_CHECK(cap >= 2, "mention cap must be at least 2");
  const int m = std::min(static_cast<int>(doc.mentions.size()), cap);
  std::vector<MentionPair> pairs;
  if (m < 2) return pairs;
  pairs.reserve(static_cast<size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) pairs.push_back({i, j, na});
  }
  for (const RelationAnnotation &r : doc.relations) {
    if (r.j >= m) continue;
    // Row-major position of (i, j) among pairs of m items.
    const size_t pos = static_cast<size_t>(r.i) * (2 * m - r.i - 1) / 2 +
                       (r.j - r.i - 1);
    pairs[pos].relation = r.label;
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Synthetic corpus.

namespace {

const char *const kClassNames[] = {
    "Attack",      "Killing",       "Arrest",      "Motion",
    "Legal_rulings", "Catastrophe", "Communication", "Competition",
    "Conquering",  "Hostile_encounter"};

const char *const kRelationNames[] = {
    "BEFORE",       "CAUSE",     "SUBEVENT",  "OVERLAP",
    "PRECONDITION", "CONTAINS",  "SIMULTANEOUS", "BEGINS-ON",
    "ENDS-ON"};

// Fixed relation score tables, independent of the corpus seed so the rule
// is a property of the label inventory sizes alone.
struct RelationRule {
  // score[r][c] for the first and second mention of an ordered pair.
  std::vector<std::vector<double>> first, second;
};

RelationRule MakeRule(int n_classes, int n_relations) {
  Rng rng(0x5eed0000ull + 131ull * n_classes + n_relations);
  RelationRule rule;
  rule.first.assign(n_relations, std::vector<double>(n_classes));
  rule.second.assign(n_relations, std::vector<double>(n_classes));
  for (int r = 0; r < n_relations; ++r) {
    for (int c = 0; c < n_classes; ++c) {
      rule.first[r][c] = rng.Uniform();
      rule.second[r][c] = rng.Uniform();
    }
  }
  return rule;
}

void ValidateOptions(const SynthesisOptions &o) {
  if (o.n_docs < 1 || o.n_classes < 1 || o.n_relations < 1 ||
      o.vocab_size < 1 || o.mentions_per_doc < 1) {
    throw ConfigError("synthetic corpus counts must all be >= 1");
  }
  if (o.vocab_size < o.n_classes) {
    throw ConfigError("vocab_size (" + std::to_string(o.vocab_size) +
                      ") must be >= n_classes (" +
                      std::to_string(o.n_classes) + ")");
  }
  if (o.min_tokens < 1 || o.max_tokens < o.min_tokens ||
      o.max_tokens > kMaxSequenceLength) {
    throw ConfigError("invalid synthetic mention length range");
  }
  if (o.relation_keep_prob < 0.0 || o.relation_keep_prob > 1.0) {
    throw ConfigError("relation_keep_prob must lie in [0, 1]");
  }
}

}  // namespace

std::vector<double> SyntheticClassPrior(int n_classes) {
  std::vector<double> w(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    w[c] = c == 0 ? 1.5 : 1.0 + 0.5 * (c % 2);
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double &x : w) x /= total;
  return w;
}

int SyntheticRelationRule(const SynthesisOptions &options, int first_class,
                          int second_class) {
  // Class 0 is None; relation 0 is NA.
  if (first_class == 0 || second_class == 0 || options.n_relations == 1) {
    return 0;
  }
  const RelationRule rule = MakeRule(options.n_classes, options.n_relations);
  int best = 0;
  double best_score = -1e300;
  for (int r = 0; r < options.n_relations; ++r) {
    double s = rule.first[r][first_class] + rule.second[r][second_class];
    if (r == 0) s -= 0.35;  // keep most class pairs related
    if (s > best_score) {
      best_score = s;
      best = r;
    }
  }
  return best;
}

SyntheticCorpus SynthesizeCorpus(const SynthesisOptions &o) {
  ValidateOptions(o);

  std::vector<std::string> classes = {kNoneClass};
  for (int c = 1; c < o.n_classes; ++c) {
    classes.push_back(c - 1 < 10 ? kClassNames[c - 1]
                                 : "Event" + std::to_string(c));
  }
  std::vector<std::string> relations = {kNoRelation};
  for (int r = 1; r < o.n_relations; ++r) {
    relations.push_back(r - 1 < 9 ? kRelationNames[r - 1]
                                  : "REL" + std::to_string(r));
  }
  SyntheticCorpus out;
  out.spaces = LabelSpaces(classes, relations);

  // Vocabulary layout: the first n_classes * per_class words are signature
  // triggers (class c owns a contiguous block), the rest is filler.
  const int per_class = std::max(1, o.vocab_size / (2 * o.n_classes));
  const int n_signature = per_class * o.n_classes;
  const int n_filler = o.vocab_size - n_signature;
  auto word = [](int k) { return "w" + std::to_string(k); };

  std::vector<std::vector<int>> rule(o.n_classes, std::vector<int>(o.n_classes));
  for (int a = 0; a < o.n_classes; ++a) {
    for (int b = 0; b < o.n_classes; ++b) {
      rule[a][b] = SyntheticRelationRule(o, a, b);
    }
  }

  const std::vector<double> prior = SyntheticClassPrior(o.n_classes);
  Rng rng(o.seed);
  for (int d = 0; d < o.n_docs; ++d) {
    Document doc;
    doc.doc_id = "syn" + std::to_string(d);
    for (int k = 0; k < o.mentions_per_doc; ++k) {
      EventMention m;
      m.mention_id = DefaultMentionId(doc.doc_id, k);
      m.event_class = static_cast<int>(rng.Categorical(prior));
      const int len = n_filler > 0 ? rng.Between(o.min_tokens, o.max_tokens) : 1;
      m.trigger_index = rng.Between(1, len);
      for (int t = 1; t <= len; ++t) {
        if (t == m.trigger_index) {
          m.tokens.push_back(word(m.event_class * per_class +
                                  rng.Between(0, per_class - 1)));
        } else {
          m.tokens.push_back(word(n_signature + rng.Between(0, n_filler - 1)));
        }
      }
      doc.mentions.push_back(std::move(m));
    }
    for (int i = 0; i < o.mentions_per_doc; ++i) {
      for (int j = i + 1; j < o.mentions_per_doc; ++j) {
        const int r = rule[doc.mentions[i].event_class]
                          [doc.mentions[j].event_class];
        const bool keep = rng.Uniform() < o.relation_keep_prob;
        if (r != 0 && keep) doc.relations.push_back({i, j, r});
      }
    }
    out.documents.push_back(std::move(doc));
  }
  return out;
}

std::pair<std::vector<Document>, std::vector<Document>> SplitHoldout(
    const std::vector<Document> &documents, double holdout_fraction) {
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw ConfigError("holdout fraction must lie in [0, 1)");
  }
  const size_t n_train = documents.size() -
                         static_cast<size_t>(holdout_fraction *
                                             static_cast<double>(documents.size()) +
                                             0.5);
  std::vector<Document> train(documents.begin(), documents.begin() + n_train);
  std::vector<Document> held(documents.begin() + n_train, documents.end());
  return {std::move(train), std::move(held)};
}

}  // namespace ecsp
