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

// Span enumeration, mention scoring, pruning and antecedent scoring.

#ifndef COREFENS_SCORER_H_
#define COREFENS_SCORER_H_

#include <span>
#include <string>
#include <vector>

#include "corefens/corpus.h"
#include "corefens/encoder.h"
#include "corefens/model.h"

namespace corefens {

struct PruneStrategy {
  enum class Kind { kTopLambda, kPositiveScore };

  Kind kind = Kind::kTopLambda;
  double lambda = 0.18;

  static PruneStrategy TopLambda(double lambda = 0.18) {
    return {Kind::kTopLambda, lambda};
  }
  static PruneStrategy PositiveScore() { return {Kind::kPositiveScore, 0.0}; }

  std::string ToString() const;
  // "top-lambda" or "positive".
  static PruneStrategy Parse(const std::string &name, double lambda);
};

// The kept set S in (start, end) order.
struct PrunedSpans {
  std::vector<MentionSpan> spans;
  std::vector<double> scores;
  // Position of each kept span in the candidate list it was pruned from.
  std::vector<int> candidates;

  size_t size() const { return spans.size(); }
  bool empty() const { return spans.empty(); }
};

// One row of the antecedent table. Entry 0 is the dummy antecedent, whose
// score is always exactly 0; entry k > 0 is kept span k - 1.
struct AntecedentRow {
  std::vector<double> scores;
  std::vector<double> probs;
};

struct AntecedentTable {
  PrunedSpans kept;
  std::vector<AntecedentRow> rows;
};

// All spans of width 1..max_width in (start, end) order.
std::vector<MentionSpan> EnumerateSpans(int num_tokens, int max_width);

double MentionScore(std::span<const double> rep, const ModelParams &params);

// TopLambda keeps the max(1, floor(lambda * n)) best spans, ties going to
// the earlier span; PositiveScore keeps spans with score > 0.
PrunedSpans Prune(std::span<const MentionSpan> spans,
                  std::span<const double> scores, const PruneStrategy &strategy,
                  int num_tokens);

// Distance bucket between kept-span positions; j must precede i.
int DistanceFeature(int i_position, int j_position);

// Writes [g_i, g_j, g_i * g_j, phi(distance)] into `out` (pair_dim).
void PairInputInto(std::span<const double> rep_i, std::span<const double> rep_j,
                   int distance_bucket, const ModelParams &params, double *out);

double PairwiseScore(std::span<const double> rep_i,
                     std::span<const double> rep_j, int distance_bucket,
                     const ModelParams &params);

// Softmax over {0 (dummy)} + `antecedent_scores`, max-subtracted.
AntecedentRow MakeAntecedentRow(std::span<const double> antecedent_scores);

// Row for kept span at `position`, given every kept span's representation.
AntecedentRow AntecedentDistribution(
    int position, const std::vector<std::vector<double>> &kept_reps,
    const ModelParams &params);

// ---------------------------------------------------------------------------
// Data-parallel kernels. The serial variants are the reference; parallel
// variants evaluate the same per-item arithmetic under OpenMP and produce
// bit-identical results.

enum class Exec { kSerial, kParallel };

// Span representations (row-major, spans x span_dim) and mention scores for
// every candidate span.
void ScoreMentions(const TokenVectors &tokens,
                   std::span<const MentionSpan> spans,
                   const ModelParams &params, Exec exec,
                   std::vector<double> &reps, std::vector<double> &scores);

// Pairwise scores among `count` kept spans whose representations are
// gathered row-major in `kept_reps`. Row p (p >= 1) holds p scores starting
// at offset p * (p - 1) / 2.
std::vector<double> ScorePairs(std::span<const double> kept_reps, int count,
                               const ModelParams &params, Exec exec);

inline size_t PairOffset(int position) {
  return static_cast<size_t>(position) * (position - 1) / 2;
}

// Scores for one document under one model: representations and mention
// scores of every candidate span, then pairwise scores on demand.
class SpanScorer {
 public:
  SpanScorer(const Document &doc, const ModelParams &params,
             const PrecomputedEmbeddings *precomputed = nullptr,
             Exec exec = Exec::kParallel);

  const std::vector<MentionSpan> &candidates() const { return candidates_; }
  const std::vector<double> &mention_scores() const { return mention_scores_; }
  std::span<const double> rep(int candidate) const;

  // Lower-triangular pair scores (see ScorePairs) for the kept candidates.
  std::vector<double> PairScores(std::span<const int> kept_candidates) const;

 private:
  const ModelParams &params_;
  Exec exec_;
  int span_dim_;
  std::vector<MentionSpan> candidates_;
  std::vector<double> reps_;
  std::vector<double> mention_scores_;
};

}  // namespace corefens

#endif  // COREFENS_SCORER_H_
