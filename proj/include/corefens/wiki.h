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

// Builds a distantly supervised coreference corpus from Wikipedia articles:
// anchors that link to the same article form one cluster.

#ifndef COREFENS_WIKI_H_
#define COREFENS_WIKI_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corefens/corpus.h"

namespace corefens {

struct WikiCorpusSpec {
  int dev_docs = 250;
  int test_docs = 250;
  // Documents need at least this many clusters of size >= 2.
  int min_nonsingleton_clusters = 1;
  uint64_t seed = 1;
  // Link prefixes (before the first ':') that are not articles. Compared
  // after target normalization, so "categoría" matches "Categoría".
  std::vector<std::string> excluded_namespaces = DefaultNamespaces();
  // Optional redirect map, applied to normalized targets.
  std::map<std::string, std::string> redirects;
  // Fraction of unreadable records above which the build aborts.
  double max_skip_rate = 0.1;
  std::string language;

  void Validate() const;

  // File, category, template and project namespaces in several languages.
  static std::vector<std::string> DefaultNamespaces();
};

// Byte range [begin, end) in the plain text.
struct RawAnchor {
  std::string target;
  size_t begin = 0;
  size_t end = 0;
};

struct ParsedWikitext {
  std::string text;
  std::vector<RawAnchor> anchors;
  std::vector<std::string> warnings;
};

// Replaces `[[T]]` and `[[T|s]]` by their surface text and records the
// anchors. Templates, comments, bold/italic quotes, and links into excluded
// namespaces or other wikis are removed together with their text. Nested
// links resolve innermost first. An unterminated `[[` drops the anchor and
// keeps the rest as text.
ParsedWikitext ParseWikitextLinks(std::string_view body,
                                  const WikiCorpusSpec &spec);

// Strips the fragment, maps underscores to spaces, collapses whitespace and
// uppercases the first character. Returns nullopt for excluded namespaces.
// A fragment-only target normalizes to the empty string.
std::optional<std::string> NormalizeTarget(std::string_view raw,
                                           const WikiCorpusSpec &spec);

struct TextToken {
  std::string text;
  size_t begin = 0;
  size_t end = 0;
};

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// characters off each piece as tokens of their own.
std::vector<TextToken> Tokenize(std::string_view text);

struct WikiArticle {
  std::string title;
  std::string body;
};

struct BuiltDocument {
  Document document;
  // Anchors with an article target found in the body.
  int anchors = 0;
  std::vector<std::string> warnings;
};

// Tokenizes the article, maps anchors onto covering tokens (with a warning
// when they do not fall on token boundaries) and groups mentions by
// normalized target. Fragment-only links point at the article itself.
BuiltDocument BuildDocument(const WikiArticle &article,
                            const WikiCorpusSpec &spec);

struct WikiSplits {
  Corpus train;
  Corpus dev;
  Corpus test;
  size_t filtered = 0;
};

// Drops documents with too few non-singleton clusters, orders the rest by
// id, shuffles them with the spec seed and cuts dev, test and train in that
// order. Each split is sorted by id. Throws DataError when fewer than
// dev_docs + test_docs documents survive.
WikiSplits FilterAndSplit(std::vector<Document> docs,
                          const WikiCorpusSpec &spec);

struct WikiStats {
  size_t records = 0;
  size_t skipped = 0;
  size_t built = 0;
  size_t kept = 0;
  size_t filtered = 0;
  size_t anchors = 0;
  size_t mentions = 0;
  size_t clusters = 0;
  size_t nonsingleton_clusters = 0;
  size_t train = 0;
  size_t dev = 0;
  size_t test = 0;
  size_t warnings = 0;

  // `key<TAB>value` lines in declaration order.
  std::string ToTsv() const;
};

// Reads either a record file (`title<TAB>text` per line, with `\n`, `\t`
// and `\\` escapes) or a directory of wikitext files named by title, and
// writes train.conll, dev.conll, test.conll and stats.tsv into output_dir.
// Records are processed in bounded batches. Throws DataError on a missing
// input, on no documents, or when the skip rate exceeds the spec limit.
WikiStats StreamBuild(const std::string &input_path,
                      const WikiCorpusSpec &spec,
                      const std::string &output_dir);

// Reads `from<TAB>to` lines.
std::map<std::string, std::string> ReadRedirects(const std::string &path);

}  // namespace corefens

#endif  // COREFENS_WIKI_H_
