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

// Inference: single-model prediction, k-model score combination (mean or
// gold-guided oracle), score dumps, and greedy antecedent decoding.

#ifndef COREFENS_ENSEMBLE_H_
#define COREFENS_ENSEMBLE_H_

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corefens/corpus.h"
#include "corefens/encoder.h"
#include "corefens/model.h"
#include "corefens/scorer.h"

namespace corefens {

struct DecodedClusters {
  PrunedSpans kept;
  // Chosen antecedent per kept position; -1 is the dummy antecedent.
  std::vector<int> antecedent;
  Clustering clusters;
};

// Every kept span links to its best-scoring antecedent (the dummy at 0
// wins ties, then the earlier span). Clusters are the connected components
// of the links. Unlinked spans become singletons only when emit_singletons
// is set and their mention score is positive.
DecodedClusters DecodeClusters(const AntecedentTable &table,
                               bool emit_singletons);

struct InferenceOptions {
  PruneStrategy prune;
  bool emit_singletons = false;
};

AntecedentTable BuildAntecedentTable(const SpanScorer &scorer,
                                     const PruneStrategy &prune,
                                     int num_tokens);

DecodedClusters PredictDocument(const Document &doc, const ModelParams &params,
                                const InferenceOptions &options,
                                const PrecomputedEmbeddings *precomputed = nullptr,
                                Exec exec = Exec::kParallel);

// Documents in parallel; results keyed by document id.
std::map<std::string, Clustering> PredictCorpus(
    const Corpus &corpus, const ModelParams &params,
    const InferenceOptions &options,
    const PrecomputedEmbeddings *precomputed = nullptr);

// ---------------------------------------------------------------------------
// Combination rules

// Arithmetic mean, symmetric in its inputs and exact when all inputs are
// equal. Throws DataError on empty or non-finite input.
double EnsembleMentionScore(std::span<const double> scores);

// Mean pairwise score per antecedent (dummy fixed at 0), then softmax.
// `per_model[m][j]` is model m's score for real antecedent j. Throws
// DataError if the models disagree on the number of antecedents.
AntecedentRow EnsembleAntecedentDistribution(
    const std::vector<std::vector<double>> &per_model);

// Max of the scores for gold mentions, min otherwise. Throws DataError when
// the gold label is unknown.
double OracleCombineMention(std::span<const double> scores,
                            std::optional<bool> is_gold_mention);

// Max for gold links (both spans in one gold cluster), min otherwise.
double OracleCombinePairwise(std::span<const double> scores,
                             std::optional<bool> is_gold_link);

enum class Combine { kMean, kOracle };

// ---------------------------------------------------------------------------
// Score sources

// One model's scores for one document.
class DocumentScores {
 public:
  virtual ~DocumentScores() = default;

  virtual const std::string &doc_id() const = 0;
  virtual int num_tokens() const = 0;
  virtual const std::vector<MentionSpan> &candidates() const = 0;
  virtual const std::vector<double> &mention_scores() const = 0;
  // Lower-triangular pair scores over the kept spans (see ScorePairs).
  virtual std::vector<double> PairScores(const PrunedSpans &kept) const = 0;
};

class ScoreSource {
 public:
  virtual ~ScoreSource() = default;
  virtual std::unique_ptr<DocumentScores> Score(const Document &doc) const = 0;
};

// Live model.
class ModelSource : public ScoreSource {
 public:
  ModelSource(const ModelParams &params,
              const PrecomputedEmbeddings *precomputed = nullptr,
              Exec exec = Exec::kSerial)
      : params_(params), precomputed_(precomputed), exec_(exec) {}

  std::unique_ptr<DocumentScores> Score(const Document &doc) const override;

 private:
  const ModelParams &params_;
  const PrecomputedEmbeddings *precomputed_;
  Exec exec_;
};

// Scores replayed from a dump file. Per document:
//
//   #doc<TAB>doc_id<TAB>num_tokens
//   M<TAB>start<TAB>end<TAB>s_m                           (every candidate)
//   P<TAB>i_start<TAB>i_end<TAB>j_start<TAB>j_end<TAB>s_ij (kept pairs)
//
// Dummy-antecedent rows are omitted since their score is fixed at 0. Pair
// scores depend on the kept set they were computed over, so a dump can
// only answer for kept sets whose pairs it contains.
class ScoreDump : public ScoreSource {
 public:
  static ScoreDump Parse(std::string_view text);
  static ScoreDump Load(const std::string &path);

  std::unique_ptr<DocumentScores> Score(const Document &doc) const override;

  struct Entry {
    int num_tokens = 0;
    std::vector<MentionSpan> candidates;
    std::vector<double> mention_scores;
    std::map<std::pair<MentionSpan, MentionSpan>, double> pairs;
  };

  const std::map<std::string, Entry> &entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

// Writes one document of a dump.
std::string FormatScoreDump(const DocumentScores &scores,
                            const PrunedSpans &kept,
                            std::span<const double> pair_scores);

// ---------------------------------------------------------------------------
// Pipeline

struct EnsembleDocumentResult {
  AntecedentTable table;
  DecodedClusters decoded;
  // Per source, pair scores over table.kept.
  std::vector<std::vector<double>> source_pairs;
};

// Combines mention scores over every candidate, prunes on the combined
// score, combines pair scores over the kept set, and decodes. Oracle
// combination reads gold labels from `doc`. Throws DataError when the
// sources disagree on document id, token count or candidate spans.
EnsembleDocumentResult EnsembleDocument(
    const Document &doc,
    std::span<const DocumentScores *const> sources,
    const PruneStrategy &prune, Combine combine, bool emit_singletons);

struct EnsembleOptions {
  PruneStrategy prune;
  Combine combine = Combine::kMean;
  bool emit_singletons = false;
  // Collect a score dump per source.
  bool dump_scores = false;
};

struct EnsembleCorpusResult {
  std::map<std::string, Clustering> predictions;
  // CoNLL of the predicted clusters, in corpus order.
  std::string predicted_conll;
  // `doc_id<TAB>cluster_id<TAB>start<TAB>end` lines.
  std::string cluster_table;
  std::vector<std::string> dumps;
};

EnsembleCorpusResult EnsembleCorpus(
    const Corpus &corpus, std::span<const ScoreSource *const> sources,
    const EnsembleOptions &options);

// CoNLL and side-table renderings of predictions, in corpus order.
std::string PredictionsToConll(
    const Corpus &corpus, const std::map<std::string, Clustering> &predictions);
std::string PredictionsToTable(
    const Corpus &corpus, const std::map<std::string, Clustering> &predictions);

}  // namespace corefens

#endif  // COREFENS_ENSEMBLE_H_
