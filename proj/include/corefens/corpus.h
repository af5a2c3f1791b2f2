// Copyright 2026 The Corefens Authors.
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

// Document and cluster data model, CoNLL-2012 reading/writing and the
// synthetic corpus generator.

#ifndef COREFENS_CORPUS_H_
#define COREFENS_CORPUS_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corefens {

// Token span, end-inclusive.
struct MentionSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }

  auto operator<=>(const MentionSpan &) const = default;
};

struct Token {
  std::string text;
  int index = 0;

  bool operator==(const Token &) const = default;
};

// Spans kept sorted in (start, end) order.
struct Cluster {
  std::vector<MentionSpan> spans;

  size_t size() const { return spans.size(); }
  bool operator==(const Cluster &) const = default;
};

using Clustering = std::vector<Cluster>;

struct Document {
  std::string id;
  std::vector<Token> tokens;
  Clustering gold_clusters;
  std::string language;

  int size() const { return static_cast<int>(tokens.size()); }

  // Builds a validated document with canonical cluster order. Throws
  // DataError on out-of-bounds spans, empty clusters, or a span that
  // appears twice.
  static Document Make(std::string id, const std::vector<std::string> &words,
                       Clustering clusters, std::string language = "");

  bool operator==(const Document &) const = default;
};

enum class Split { kTrain, kDev, kTest };

std::string_view SplitName(Split split);

struct Corpus {
  std::vector<Document> documents;
  Split split = Split::kTrain;

  const Document *Find(std::string_view id) const;
  size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

// Sorts spans inside clusters and clusters by their first span. Throws
// DataError if the clustering is not a partition of distinct spans.
void CanonicalizeClusters(Clustering &clusters);

// Validates span bounds against a document length.
void ValidateClusters(const Clustering &clusters, int num_tokens,
                      std::string_view doc_id);

// Drops clusters with fewer than two spans.
Clustering WithoutSingletons(const Clustering &clusters);

// Span -> cluster index lookup.
std::map<MentionSpan, int> ClusterIndex(const Clustering &clusters);

// ---------------------------------------------------------------------------
// CoNLL-2012

// Parses `#begin document (<id>); part <n>` ... `#end document` blocks.
// Token lines are whitespace-separated columns; the last column holds the
// coreference brackets. With four or more columns the word is column 4
// (CoNLL-2012 layout), with three columns it is column 2, with two it is
// column 1. Every other column is ignored. Blank lines and other `#` lines
// are skipped. Throws ParseError.
Corpus ParseConll(std::string_view text, Split split = Split::kTrain,
                  std::string_view language = "");

// Emits `doc<TAB>part<TAB>index<TAB>word<TAB>coref` lines. Cluster ids are
// the canonical cluster indices.
std::string EmitConll(const Corpus &corpus);
std::string EmitConllDocument(const Document &doc,
                              const Clustering &clusters);

Corpus ReadConllFile(const std::string &path, Split split = Split::kTrain,
                     std::string_view language = "");
void WriteTextFile(const std::string &path, std::string_view contents);
std::string ReadTextFile(const std::string &path);

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticConfig {
  int num_docs = 20;
  int doc_len = 60;
  int num_entities = 3;
  int mentions_per_entity = 3;
  int vocab_size = 50;
  // Fraction of each document's entities that are mentioned once.
  double singleton_fraction = 0.25;
  // Size of the shared entity-name inventory.
  int name_pool = 6;
  // Prefix on filler words; different prefixes act as different languages.
  std::string filler_prefix = "w";
  std::string id_prefix = "synth";
  std::string language = "xx";
};

// Name tokens for entry `k` of the shared name inventory (one or two
// tokens, fixed independently of the seed).
std::vector<std::string> SyntheticName(int k);

// Deterministic in (config, seed). Throws ConfigError when the mentions
// cannot be packed into doc_len tokens.
Corpus GenerateSynthetic(const SyntheticConfig &config, uint64_t seed,
                         Split split = Split::kTrain);

struct SyntheticSplits {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Train, dev and test corpora of the given sizes; split k (train 0, dev 1,
// test 2) is generated from Rng::Derive(seed, k). config.num_docs is
// ignored.
SyntheticSplits GenerateSyntheticSplits(SyntheticConfig config, int train_docs,
                                        int dev_docs, int test_docs,
                                        uint64_t seed);

}  // namespace corefens

#endif  // COREFENS_CORPUS_H_
