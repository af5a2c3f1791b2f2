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

#include "corefens/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/rng.h"

namespace corefens {

Document Document::Make(std::string id, const std::vector<std::string> &words,
                        Clustering clusters, std::string language) {
  Document doc;
  doc.id = std::move(id);
  doc.language = std::move(language);
  doc.tokens.reserve(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    if (words[i].empty()) {
      throw DataError(fmt::format("document {}: empty token at {}", doc.id, i));
    }
    doc.tokens.push_back(Token{words[i], static_cast<int>(i)});
  }
  ValidateClusters(clusters, doc.size(), doc.id);
  CanonicalizeClusters(clusters);
  doc.gold_clusters = std::move(clusters);
  return doc;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

const Document *Corpus::Find(std::string_view id) const {
  for (const Document &doc : documents) {
    if (doc.id == id) return &doc;
  }
  return nullptr;
}

void ValidateClusters(const Clustering &clusters, int num_tokens,
                      std::string_view doc_id) {
  for (const Cluster &cluster : clusters) {
    if (cluster.spans.empty()) {
      throw DataError(fmt::format("document {}: empty cluster", doc_id));
    }
    for (const MentionSpan &span : cluster.spans) {
      if (span.start < 0 || span.end < span.start || span.end >= num_tokens) {
        throw DataError(fmt::format("document {}: span ({}, {}) out of bounds",
                                    doc_id, span.start, span.end));
      }
    }
  }
}

void CanonicalizeClusters(Clustering &clusters) {
  std::set<MentionSpan> seen;
  for (Cluster &cluster : clusters) {
    std::sort(cluster.spans.begin(), cluster.spans.end());
    for (const MentionSpan &span : cluster.spans) {
      if (!seen.insert(span).second) {
        throw DataError(fmt::format("span ({}, {}) appears more than once",
                                    span.start, span.end));
      }
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster &a, const Cluster &b) {
              return a.spans.front() < b.spans.front();
            });
}

Clustering WithoutSingletons(const Clustering &clusters) {
  Clustering out;
  for (const Cluster &cluster : clusters) {
    if (cluster.size() >= 2) out.push_back(cluster);
  }
  return out;
}

std::map<MentionSpan, int> ClusterIndex(const Clustering &clusters) {
  std::map<MentionSpan, int> index;
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (const MentionSpan &span : clusters[c].spans) {
      index.emplace(span, static_cast<int>(c));
    }
  }
  return index;
}

// ---------------------------------------------------------------------------
// CoNLL-2012

namespace {

std::vector<std::string_view> SplitColumns(std::string_view line) {
  std::vector<std::string_view> cols;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    cols.push_back(line.substr(i, j - i));
    i = j;
  }
  return cols;
}

bool ParseClusterId(std::string_view s, int *id) {
  if (s.empty() || s.size() > 9) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  *id = v;
  return true;
}

struct OpenDocument {
  std::string id;
  int begin_line = 0;
  std::vector<std::string> words;
  // cluster id -> spans, and per-id stack of open starts
  std::map<int, std::vector<MentionSpan>> spans;
  std::map<int, std::vector<std::pair<int, int>>> open;  // (start, line)
};

void ApplyCorefColumn(OpenDocument &doc, std::string_view column,
                      int token, int line_no) {
  if (column == "-") return;
  size_t pos = 0;
  while (pos <= column.size()) {
    size_t bar = column.find('|', pos);
    if (bar == std::string_view::npos) bar = column.size();
    std::string_view entry = column.substr(pos, bar - pos);
    pos = bar + 1;
    if (entry.empty()) {
      throw ParseError(
          fmt::format("document {}: malformed coreference column '{}'", doc.id,
                      column),
          line_no);
    }
    const bool opens = entry.front() == '(';
    const bool closes = entry.back() == ')';
    std::string_view digits = entry;
    if (opens) digits.remove_prefix(1);
    if (closes && !digits.empty()) digits.remove_suffix(1);
    int id = 0;
    if ((!opens && !closes) || !ParseClusterId(digits, &id)) {
      throw ParseError(
          fmt::format("document {}: malformed coreference entry '{}'", doc.id,
                      entry),
          line_no);
    }
    if (opens && closes) {
      doc.spans[id].push_back(MentionSpan{token, token});
    } else if (opens) {
      doc.open[id].push_back({token, line_no});
    } else {
      auto &stack = doc.open[id];
      if (stack.empty()) {
        throw ParseError(
            fmt::format("document {}: unbalanced close bracket for cluster {}",
                        doc.id, id),
            line_no);
      }
      doc.spans[id].push_back(MentionSpan{stack.back().first, token});
      stack.pop_back();
    }
    if (bar == column.size()) break;
  }
}

Document FinishDocument(OpenDocument &open, std::string_view language,
                        int line_no) {
  for (const auto &[id, stack] : open.open) {
    if (!stack.empty()) {
      throw ParseError(
          fmt::format("document {}: unbalanced open bracket for cluster {} "
                      "opened on line {}",
                      open.id, id, stack.back().second),
          line_no);
    }
  }
  Clustering clusters;
  for (auto &[id, spans] : open.spans) clusters.push_back(Cluster{spans});
  try {
    return Document::Make(open.id, open.words, std::move(clusters),
                          std::string(language));
  } catch (const ParseError &) {
    throw;
  } catch (const DataError &e) {
    throw ParseError(e.what(), line_no);
  }
}

std::string EncodeCorefColumn(const std::vector<std::string> &entries) {
  if (entries.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += '|';
    out += entries[i];
  }
  return out;
}

}  // namespace

Corpus ParseConll(std::string_view text, Split split,
                  std::string_view language) {
  static constexpr std::string_view kBegin = "#begin document";
  static constexpr std::string_view kEnd = "#end document";

  Corpus corpus;
  corpus.split = split;
  std::set<std::string> ids;
  std::optional<OpenDocument> current;

  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.starts_with(kBegin)) {
      if (current) {
        throw ParseError(fmt::format("document {}: missing #end document",
                                     current->id),
                         line_no);
      }
      // `#begin document (<id>); part <n>`; ids may contain parentheses.
      std::string_view rest = line.substr(kBegin.size());
      size_t open = rest.find('(');
      size_t close = rest.rfind(");");
      if (open == std::string_view::npos || close == std::string_view::npos ||
          close < open) {
        throw ParseError("malformed #begin document line", line_no);
      }
      std::string id(rest.substr(open + 1, close - open - 1));
      std::string_view part = rest.substr(close + 2);
      while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
      if (part.starts_with("part")) part.remove_prefix(4);
      while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
      int part_no = 0;
      if (!part.empty() && !ParseClusterId(part, &part_no)) {
        throw ParseError("malformed part number", line_no);
      }
      if (part_no != 0) id += fmt::format("/part_{:03d}", part_no);
      if (id.empty()) throw ParseError("empty document id", line_no);
      current.emplace();
      current->id = std::move(id);
      current->begin_line = line_no;
      continue;
    }
    if (line.starts_with(kEnd)) {
      if (!current) throw ParseError("#end document without #begin", line_no);
      if (!ids.insert(current->id).second) {
        throw ParseError(fmt::format("duplicate document id {}", current->id),
                         line_no);
      }
      corpus.documents.push_back(FinishDocument(*current, language, line_no));
      current.reset();
      continue;
    }
    auto cols = SplitColumns(line);
    if (cols.empty() || line.front() == '#') continue;
    if (!current) throw ParseError("token line outside a document", line_no);
    if (cols.size() < 2) {
      throw ParseError(
          fmt::format("document {}: token line needs at least 2 columns",
                      current->id),
          line_no);
    }
    std::string_view word = cols.size() >= 4   ? cols[3]
                            : cols.size() == 3 ? cols[1]
                                               : cols[0];
    const int token = static_cast<int>(current->words.size());
    current->words.emplace_back(word);
    ApplyCorefColumn(*current, cols.back(), token, line_no);
  }
  if (current) {
    throw ParseError(
        fmt::format("document {}: missing #end document", current->id),
        line_no);
  }
  return corpus;
}

std::string EmitConllDocument(const Document &doc,
                              const Clustering &clusters) {
  const int n = doc.size();
  // Per token: closes, then single-token spans, then opens. Closing first
  // keeps adjacent spans of one cluster unambiguous under stack matching.
  std::vector<std::vector<std::string>> closes(n), singles(n), opens(n);
  for (size_t c = 0; c < clusters.size(); ++c) {
    // Opens at a token: longer spans first, so they sit deeper in the stack.
    std::vector<MentionSpan> spans = clusters[c].spans;
    std::sort(spans.begin(), spans.end(),
              [](const MentionSpan &a, const MentionSpan &b) {
                if (a.start != b.start) return a.start < b.start;
                return a.end > b.end;
              });
    for (const MentionSpan &span : spans) {
      if (span.start == span.end) {
        singles[span.start].push_back(fmt::format("({})", c));
      } else {
        opens[span.start].push_back(fmt::format("({}", c));
        closes[span.end].push_back(fmt::format("{})", c));
      }
    }
  }
  std::string doc_column = doc.id;
  std::replace(doc_column.begin(), doc_column.end(), ' ', '_');
  std::replace(doc_column.begin(), doc_column.end(), '\t', '_');

  std::string out = fmt::format("#begin document ({}); part 000\n", doc.id);
  for (int t = 0; t < n; ++t) {
    std::vector<std::string> entries = closes[t];
    entries.insert(entries.end(), singles[t].begin(), singles[t].end());
    entries.insert(entries.end(), opens[t].begin(), opens[t].end());
    out += fmt::format("{}\t0\t{}\t{}\t{}\n", doc_column, t,
                       doc.tokens[t].text, EncodeCorefColumn(entries));
  }
  out += "#end document\n";
  return out;
}

std::string EmitConll(const Corpus &corpus) {
  std::string out;
  for (const Document &doc : corpus.documents) {
    out += EmitConllDocument(doc, doc.gold_clusters);
  }
  return out;
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed: " + path);
}

Corpus ReadConllFile(const std::string &path, Split split,
                     std::string_view language) {
  return ParseConll(ReadTextFile(path), split, language);
}

// ---------------------------------------------------------------------------
// Synthetic corpora

std::vector<std::string> SyntheticName(int k) {
  if (k % 3 == 2) {
    return {fmt::format("Nom{}", k), fmt::format("Fam{}", k)};
  }
  return {fmt::format("Nom{}", k)};
}

Corpus GenerateSynthetic(const SyntheticConfig &config, uint64_t seed,
                         Split split) {
  if (config.num_docs <= 0 || config.doc_len <= 0 || config.num_entities <= 0 ||
      config.mentions_per_entity <= 0 || config.vocab_size <= 0 ||
      config.name_pool <= 0) {
    throw ConfigError("synthetic config counts must be positive");
  }
  if (config.singleton_fraction < 0.0 || config.singleton_fraction > 1.0) {
    throw ConfigError("singleton_fraction must be in [0, 1]");
  }
  if (config.num_entities > config.name_pool) {
    throw ConfigError(fmt::format("num_entities {} exceeds name_pool {}",
                                  config.num_entities, config.name_pool));
  }
  const int singletons = static_cast<int>(
      config.singleton_fraction * config.num_entities + 1e-9);
  const int mentions =
      singletons + (config.num_entities - singletons) * config.mentions_per_entity;
  // Worst case: every name has two tokens and mentions are separated by at
  // least one filler word.
  if (2 * mentions + (mentions - 1) > config.doc_len) {
    throw ConfigError(fmt::format(
        "{} mentions (up to 2 tokens each, filler-separated) do not fit in "
        "doc_len {}",
        mentions, config.doc_len));
  }

  Rng rng(seed);
  Corpus corpus;
  corpus.split = split;
  for (int d = 0; d < config.num_docs; ++d) {
    std::vector<int> pool(config.name_pool);
    for (int k = 0; k < config.name_pool; ++k) pool[k] = k;
    rng.Shuffle(pool);

    // Mention instances as entity indices; the first `singletons` entities
    // are mentioned once.
    std::vector<int> order;
    for (int e = 0; e < config.num_entities; ++e) {
      const int count = e < singletons ? 1 : config.mentions_per_entity;
      for (int m = 0; m < count; ++m) order.push_back(e);
    }
    rng.Shuffle(order);

    int name_tokens = 0;
    for (int e : order) {
      name_tokens += static_cast<int>(SyntheticName(pool[e]).size());
    }
    const int slots = static_cast<int>(order.size()) + 1;
    std::vector<int> gaps(slots, 0);
    for (int g = 1; g + 1 < slots; ++g) gaps[g] = 1;
    int extra = config.doc_len - name_tokens - (slots - 2);
    for (; extra > 0; --extra) gaps[rng.Below(slots)] += 1;

    std::vector<std::string> words;
    Clustering clusters(config.num_entities);
    auto add_filler = [&](int count) {
      for (int i = 0; i < count; ++i) {
        words.push_back(fmt::format("{}{}", config.filler_prefix,
                                    rng.Below(config.vocab_size)));
      }
    };
    for (size_t m = 0; m < order.size(); ++m) {
      add_filler(gaps[m]);
      const auto name = SyntheticName(pool[order[m]]);
      const int start = static_cast<int>(words.size());
      words.insert(words.end(), name.begin(), name.end());
      clusters[order[m]].spans.push_back(
          MentionSpan{start, static_cast<int>(words.size()) - 1});
    }
    add_filler(gaps.back());

    corpus.documents.push_back(Document::Make(
        fmt::format("{}_{}_{:04d}", config.id_prefix, SplitName(split), d),
        words, std::move(clusters), config.language));
  }
  return corpus;
}

SyntheticSplits GenerateSyntheticSplits(SyntheticConfig config, int train_docs,
                                        int dev_docs, int test_docs,
                                        uint64_t seed) {
  SyntheticSplits out;
  config.num_docs = train_docs;
  out.train = GenerateSynthetic(config, Rng::Derive(seed, 0), Split::kTrain);
  config.num_docs = dev_docs;
  out.dev = GenerateSynthetic(config, Rng::Derive(seed, 1), Split::kDev);
  config.num_docs = test_docs;
  out.test = GenerateSynthetic(config, Rng::Derive(seed, 2), Split::kTest);
  return out;
}

}  // namespace corefens
