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

#include "corefens/ensemble.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/union_find.h"

namespace corefens {

DecodedClusters DecodeClusters(const AntecedentTable &table,
                               bool emit_singletons) {
  DecodedClusters out;
  out.kept = table.kept;
  const size_t n = table.kept.size();
  out.antecedent.assign(n, -1);
  UnionFind sets(n);
  std::vector<char> linked(n, 0);
  for (size_t p = 0; p < n; ++p) {
    const std::vector<double> &scores = table.rows[p].scores;
    double best = 0.0;  // dummy
    int choice = -1;
    for (size_t k = 1; k < scores.size(); ++k) {
      if (scores[k] > best) {
        best = scores[k];
        choice = static_cast<int>(k) - 1;
      }
    }
    out.antecedent[p] = choice;
    if (choice >= 0) {
      sets.Unite(p, static_cast<size_t>(choice));
      linked[p] = linked[choice] = 1;
    }
  }
  std::map<size_t, Cluster> components;
  for (size_t p = 0; p < n; ++p) {
    if (!linked[p]) {
      if (emit_singletons && table.kept.scores[p] > 0.0) {
        out.clusters.push_back(Cluster{{table.kept.spans[p]}});
      }
      continue;
    }
    components[sets.Find(p)].spans.push_back(table.kept.spans[p]);
  }
  for (auto &[root, cluster] : components) out.clusters.push_back(cluster);
  CanonicalizeClusters(out.clusters);
  return out;
}

AntecedentTable BuildAntecedentTable(const SpanScorer &scorer,
                                     const PruneStrategy &prune,
                                     int num_tokens) {
  AntecedentTable table;
  table.kept = Prune(scorer.candidates(), scorer.mention_scores(), prune,
                     num_tokens);
  const std::vector<double> pairs = scorer.PairScores(table.kept.candidates);
  table.rows.reserve(table.kept.size());
  for (size_t p = 0; p < table.kept.size(); ++p) {
    const int pos = static_cast<int>(p);
    table.rows.push_back(MakeAntecedentRow(
        p == 0 ? std::span<const double>()
               : std::span<const double>(pairs).subspan(PairOffset(pos), p)));
  }
  return table;
}

DecodedClusters PredictDocument(const Document &doc, const ModelParams &params,
                                const InferenceOptions &options,
                                const PrecomputedEmbeddings *precomputed,
                                Exec exec) {
  SpanScorer scorer(doc, params, precomputed, exec);
  return DecodeClusters(BuildAntecedentTable(scorer, options.prune, doc.size()),
                        options.emit_singletons);
}

std::map<std::string, Clustering> PredictCorpus(
    const Corpus &corpus, const ModelParams &params,
    const InferenceOptions &options, const PrecomputedEmbeddings *precomputed) {
  std::vector<Clustering> results(corpus.size());
  std::vector<std::string> errors(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (long d = 0; d < static_cast<long>(corpus.size()); ++d) {
    try {
      results[d] = PredictDocument(corpus.documents[d], params, options,
                                   precomputed, Exec::kSerial)
                       .clusters;
    } catch (const std::exception &e) {
      errors[d] = e.what();
    }
  }
  std::map<std::string, Clustering> out;
  for (size_t d = 0; d < corpus.size(); ++d) {
    if (!errors[d].empty()) throw DataError(errors[d]);
    out.emplace(corpus.documents[d].id, std::move(results[d]));
  }
  return out;
}

// ---------------------------------------------------------------------------

double EnsembleMentionScore(std::span<const double> scores) {
  if (scores.empty()) throw DataError("cannot combine zero scores");
  std::vector<double> sorted(scores.begin(), scores.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw DataError("non-finite score in ensemble");
  }
  std::sort(sorted.begin(), sorted.end());
  // Offsets from the minimum: exact when all inputs agree, and the sorted
  // order makes the sum independent of model order.
  const double lo = sorted.front();
  double offset = 0.0;
  for (double v : sorted) offset += v - lo;
  const double mean = lo + offset / static_cast<double>(sorted.size());
  return std::clamp(mean, lo, sorted.back());
}

AntecedentRow EnsembleAntecedentDistribution(
    const std::vector<std::vector<double>> &per_model) {
  if (per_model.empty()) throw DataError("cannot combine zero models");
  const size_t count = per_model.front().size();
  for (const auto &row : per_model) {
    if (row.size() != count) {
      throw DataError("models disagree on the antecedent set");
    }
  }
  std::vector<double> combined(count);
  std::vector<double> column(per_model.size());
  for (size_t j = 0; j < count; ++j) {
    for (size_t m = 0; m < per_model.size(); ++m) column[m] = per_model[m][j];
    combined[j] = EnsembleMentionScore(column);
  }
  return MakeAntecedentRow(combined);
}

namespace {

double OracleCombine(std::span<const double> scores,
                     std::optional<bool> positive, const char *what) {
  if (scores.empty()) throw DataError("cannot combine zero scores");
  if (!positive.has_value()) {
    throw DataError(fmt::format("oracle combination needs the gold {}", what));
  }
  return *positive ? *std::max_element(scores.begin(), scores.end())
                   : *std::min_element(scores.begin(), scores.end());
}

}  // namespace

double OracleCombineMention(std::span<const double> scores,
                            std::optional<bool> is_gold_mention) {
  return OracleCombine(scores, is_gold_mention, "mention label");
}

double OracleCombinePairwise(std::span<const double> scores,
                             std::optional<bool> is_gold_link) {
  return OracleCombine(scores, is_gold_link, "link label");
}

// ---------------------------------------------------------------------------

namespace {

class ModelDocumentScores : public DocumentScores {
 public:
  ModelDocumentScores(const Document &doc, const ModelParams &params,
                      const PrecomputedEmbeddings *precomputed, Exec exec)
      : id_(doc.id), num_tokens_(doc.size()),
        scorer_(doc, params, precomputed, exec) {}

  const std::string &doc_id() const override { return id_; }
  int num_tokens() const override { return num_tokens_; }
  const std::vector<MentionSpan> &candidates() const override {
    return scorer_.candidates();
  }
  const std::vector<double> &mention_scores() const override {
    return scorer_.mention_scores();
  }
  std::vector<double> PairScores(const PrunedSpans &kept) const override {
    return scorer_.PairScores(kept.candidates);
  }

 private:
  std::string id_;
  int num_tokens_;
  SpanScorer scorer_;
};

class DumpDocumentScores : public DocumentScores {
 public:
  DumpDocumentScores(std::string id, const ScoreDump::Entry &entry)
      : id_(std::move(id)), entry_(entry) {}

  const std::string &doc_id() const override { return id_; }
  int num_tokens() const override { return entry_.num_tokens; }
  const std::vector<MentionSpan> &candidates() const override {
    return entry_.candidates;
  }
  const std::vector<double> &mention_scores() const override {
    return entry_.mention_scores;
  }
  std::vector<double> PairScores(const PrunedSpans &kept) const override {
    const int count = static_cast<int>(kept.size());
    std::vector<double> out(count > 1 ? PairOffset(count) : 0);
    for (int p = 1; p < count; ++p) {
      for (int q = 0; q < p; ++q) {
        auto it = entry_.pairs.find({kept.spans[p], kept.spans[q]});
        if (it == entry_.pairs.end()) {
          throw DataError(fmt::format(
              "score dump for {} lacks pair ({}, {}) -> ({}, {})", id_,
              kept.spans[p].start, kept.spans[p].end, kept.spans[q].start,
              kept.spans[q].end));
        }
        out[PairOffset(p) + q] = it->second;
      }
    }
    return out;
  }

 private:
  std::string id_;
  const ScoreDump::Entry &entry_;
};

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

template <typename T>
T ParseNumber(std::string_view s, int line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("bad number '{}' in score dump", s), line_no);
  }
  return value;
}

}  // namespace

std::unique_ptr<DocumentScores> ModelSource::Score(const Document &doc) const {
  return std::make_unique<ModelDocumentScores>(doc, params_, precomputed_,
                                               exec_);
}

ScoreDump ScoreDump::Parse(std::string_view text) {
  ScoreDump dump;
  Entry *current = nullptr;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f[0] == "#doc") {
      if (f.size() != 3) throw ParseError("malformed #doc line", line_no);
      auto [it, inserted] = dump.entries_.try_emplace(std::string(f[1]));
      if (!inserted) {
        throw ParseError(fmt::format("duplicate document {} in dump", f[1]),
                         line_no);
      }
      current = &it->second;
      current->num_tokens = ParseNumber<int>(f[2], line_no);
    } else if (f[0] == "M") {
      if (!current) throw ParseError("score line before #doc", line_no);
      if (f.size() != 4) throw ParseError("malformed M line", line_no);
      MentionSpan span{ParseNumber<int>(f[1], line_no),
                       ParseNumber<int>(f[2], line_no)};
      if (!current->candidates.empty() && !(current->candidates.back() < span)) {
        throw ParseError("M lines must follow span order", line_no);
      }
      current->candidates.push_back(span);
      current->mention_scores.push_back(ParseNumber<double>(f[3], line_no));
    } else if (f[0] == "P") {
      if (!current) throw ParseError("score line before #doc", line_no);
      if (f.size() != 6) throw ParseError("malformed P line", line_no);
      MentionSpan i{ParseNumber<int>(f[1], line_no),
                    ParseNumber<int>(f[2], line_no)};
      MentionSpan j{ParseNumber<int>(f[3], line_no),
                    ParseNumber<int>(f[4], line_no)};
      current->pairs[{i, j}] = ParseNumber<double>(f[5], line_no);
    } else {
      throw ParseError("unknown score dump line", line_no);
    }
  }
  return dump;
}

ScoreDump ScoreDump::Load(const std::string &path) {
  return Parse(ReadTextFile(path));
}

std::unique_ptr<DocumentScores> ScoreDump::Score(const Document &doc) const {
  auto it = entries_.find(doc.id);
  if (it == entries_.end()) {
    throw DataError("score dump has no document " + doc.id);
  }
  return std::make_unique<DumpDocumentScores>(doc.id, it->second);
}

std::string FormatScoreDump(const DocumentScores &scores,
                            const PrunedSpans &kept,
                            std::span<const double> pair_scores) {
  std::string out =
      fmt::format("#doc\t{}\t{}\n", scores.doc_id(), scores.num_tokens());
  const auto &candidates = scores.candidates();
  const auto &mention = scores.mention_scores();
  for (size_t c = 0; c < candidates.size(); ++c) {
    out += fmt::format("M\t{}\t{}\t{:.17g}\n", candidates[c].start,
                       candidates[c].end, mention[c]);
  }
  for (size_t p = 1; p < kept.size(); ++p) {
    for (size_t q = 0; q < p; ++q) {
      out += fmt::format("P\t{}\t{}\t{}\t{}\t{:.17g}\n", kept.spans[p].start,
                         kept.spans[p].end, kept.spans[q].start,
                         kept.spans[q].end,
                         pair_scores[PairOffset(static_cast<int>(p)) + q]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

EnsembleDocumentResult EnsembleDocument(
    const Document &doc, std::span<const DocumentScores *const> sources,
    const PruneStrategy &prune, Combine combine, bool emit_singletons) {
  if (sources.empty()) throw DataError("ensemble needs at least one source");
  const DocumentScores &first = *sources.front();
  for (const DocumentScores *s : sources) {
    if (s->doc_id() != doc.id) {
      throw DataError(fmt::format("score source document {} != {}",
                                  s->doc_id(), doc.id));
    }
    if (s->num_tokens() != doc.size()) {
      throw DataError(fmt::format(
          "document {}: score source has {} tokens, document has {}", doc.id,
          s->num_tokens(), doc.size()));
    }
    if (s->candidates() != first.candidates()) {
      throw DataError("document " + doc.id +
                      ": score sources disagree on candidate spans");
    }
  }

  const bool oracle = combine == Combine::kOracle;
  std::map<MentionSpan, int> gold;
  if (oracle) gold = ClusterIndex(doc.gold_clusters);

  const size_t k = sources.size();
  const auto &candidates = first.candidates();
  std::vector<double> combined(candidates.size());
  std::vector<double> column(k);
  for (size_t c = 0; c < candidates.size(); ++c) {
    for (size_t m = 0; m < k; ++m) column[m] = sources[m]->mention_scores()[c];
    combined[c] = oracle ? OracleCombineMention(
                               column, gold.count(candidates[c]) > 0)
                         : EnsembleMentionScore(column);
  }

  EnsembleDocumentResult result;
  AntecedentTable &table = result.table;
  table.kept = Prune(candidates, combined, prune, doc.size());
  for (const DocumentScores *s : sources) {
    result.source_pairs.push_back(s->PairScores(table.kept));
  }
  const size_t kept = table.kept.size();
  table.rows.reserve(kept);
  std::vector<double> row;
  for (size_t p = 0; p < kept; ++p) {
    row.assign(p, 0.0);
    const size_t offset = PairOffset(static_cast<int>(p));
    for (size_t q = 0; q < p; ++q) {
      for (size_t m = 0; m < k; ++m) {
        column[m] = result.source_pairs[m][offset + q];
      }
      if (oracle) {
        auto gi = gold.find(table.kept.spans[p]);
        auto gj = gold.find(table.kept.spans[q]);
        const bool link =
            gi != gold.end() && gj != gold.end() && gi->second == gj->second;
        row[q] = OracleCombinePairwise(column, link);
      } else {
        row[q] = EnsembleMentionScore(column);
      }
    }
    table.rows.push_back(MakeAntecedentRow(row));
  }
  result.decoded = DecodeClusters(table, emit_singletons);
  return result;
}

EnsembleCorpusResult EnsembleCorpus(
    const Corpus &corpus, std::span<const ScoreSource *const> sources,
    const EnsembleOptions &options) {
  const size_t n = corpus.size();
  std::vector<Clustering> clusters(n);
  std::vector<std::vector<std::string>> dumps(
      sources.size(), std::vector<std::string>(n));
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long d = 0; d < static_cast<long>(n); ++d) {
    try {
      const Document &doc = corpus.documents[d];
      std::vector<std::unique_ptr<DocumentScores>> owned;
      std::vector<const DocumentScores *> views;
      for (const ScoreSource *source : sources) {
        owned.push_back(source->Score(doc));
        views.push_back(owned.back().get());
      }
      EnsembleDocumentResult r = EnsembleDocument(
          doc, views, options.prune, options.combine, options.emit_singletons);
      clusters[d] = std::move(r.decoded.clusters);
      if (options.dump_scores) {
        for (size_t m = 0; m < views.size(); ++m) {
          dumps[m][d] =
              FormatScoreDump(*views[m], r.table.kept, r.source_pairs[m]);
        }
      }
    } catch (const std::exception &e) {
      errors[d] = e.what();
    }
  }
  EnsembleCorpusResult result;
  for (size_t d = 0; d < n; ++d) {
    if (!errors[d].empty()) throw DataError(errors[d]);
    result.predictions.emplace(corpus.documents[d].id, std::move(clusters[d]));
  }
  result.predicted_conll = PredictionsToConll(corpus, result.predictions);
  result.cluster_table = PredictionsToTable(corpus, result.predictions);
  if (options.dump_scores) {
    for (const auto &per_doc : dumps) {
      std::string all;
      for (const std::string &s : per_doc) all += s;
      result.dumps.push_back(std::move(all));
    }
  }
  return result;
}

std::string PredictionsToConll(
    const Corpus &corpus,
    const std::map<std::string, Clustering> &predictions) {
  std::string out;
  for (const Document &doc : corpus.documents) {
    auto it = predictions.find(doc.id);
    out += EmitConllDocument(doc, it == predictions.end() ? Clustering{}
                                                           : it->second);
  }
  return out;
}

std::string PredictionsToTable(
    const Corpus &corpus,
    const std::map<std::string, Clustering> &predictions) {
  std::string out;
  for (const Document &doc : corpus.documents) {
    auto it = predictions.find(doc.id);
    if (it == predictions.end()) continue;
    for (size_t c = 0; c < it->second.size(); ++c) {
      for (const MentionSpan &span : it->second[c].spans) {
        out += fmt::format("{}\t{}\t{}\t{}\n", doc.id, c, span.start, span.end);
      }
    }
  }
  return out;
}

}  // namespace corefens
