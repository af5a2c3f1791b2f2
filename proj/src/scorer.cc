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

#include "corefens/scorer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/ffnn.h"

namespace corefens {

std::string PruneStrategy::ToString() const {
  if (kind == Kind::kPositiveScore) return "positive";
  return fmt::format("top-lambda({})", lambda);
}

PruneStrategy PruneStrategy::Parse(const std::string &name, double lambda) {
  if (name == "positive") return PositiveScore();
  if (name == "top-lambda") {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    return TopLambda(lambda);
  }
  throw ConfigError("unknown pruning strategy '" + name +
                    "' (expected top-lambda or positive)");
}

std::vector<MentionSpan> EnumerateSpans(int num_tokens, int max_width) {
  std::vector<MentionSpan> spans;
  for (int s = 0; s < num_tokens; ++s) {
    for (int e = s; e < num_tokens && e - s + 1 <= max_width; ++e) {
      spans.push_back(MentionSpan{s, e});
    }
  }
  return spans;
}

double MentionScore(std::span<const double> rep, const ModelParams &params) {
  return FfnnForward(params, params.mention_ffnn(), rep);
}

PrunedSpans Prune(std::span<const MentionSpan> spans,
                  std::span<const double> scores, const PruneStrategy &strategy,
                  int num_tokens) {
  if (spans.size() != scores.size()) {
    throw ContractError("prune: spans and scores differ in length");
  }
  std::vector<int> keep;
  if (strategy.kind == PruneStrategy::Kind::kPositiveScore) {
    for (size_t i = 0; i < spans.size(); ++i) {
      if (scores[i] > 0.0) keep.push_back(static_cast<int>(i));
    }
  } else {
    size_t limit = static_cast<size_t>(
        std::floor(strategy.lambda * num_tokens + 1e-9));
    limit = std::min(std::max<size_t>(limit, 1), spans.size());
    std::vector<int> order(spans.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return spans[a] < spans[b];
    });
    keep.assign(order.begin(), order.begin() + limit);
  }
  std::sort(keep.begin(), keep.end(),
            [&](int a, int b) { return spans[a] < spans[b]; });
  PrunedSpans out;
  for (int i : keep) {
    out.spans.push_back(spans[i]);
    out.scores.push_back(scores[i]);
    out.candidates.push_back(i);
  }
  return out;
}

int DistanceFeature(int i_position, int j_position) {
  if (j_position < 0 || j_position >= i_position) {
    throw ContractError(fmt::format(
        "antecedent at position {} does not precede span at position {}",
        j_position, i_position));
  }
  return DistanceBucket(i_position - j_position);
}

void PairInputInto(std::span<const double> rep_i, std::span<const double> rep_j,
                   int distance_bucket, const ModelParams &params,
                   double *out) {
  const int g = params.config().span_dim();
  for (int k = 0; k < g; ++k) {
    out[k] = rep_i[k];
    out[g + k] = rep_j[k];
    out[2 * g + k] = rep_i[k] * rep_j[k];
  }
  const ParamBlock &dist = params.block(ModelParams::kDistanceEmbeddings);
  const double *phi = dist.row(distance_bucket);
  std::copy(phi, phi + dist.cols, out + 3 * g);
}

double PairwiseScore(std::span<const double> rep_i,
                     std::span<const double> rep_j, int distance_bucket,
                     const ModelParams &params) {
  std::vector<double> input(params.config().pair_dim());
  PairInputInto(rep_i, rep_j, distance_bucket, params, input.data());
  return FfnnForward(params, params.pair_ffnn(), input);
}

AntecedentRow MakeAntecedentRow(std::span<const double> antecedent_scores) {
  AntecedentRow row;
  row.scores.reserve(antecedent_scores.size() + 1);
  row.scores.push_back(0.0);
  row.scores.insert(row.scores.end(), antecedent_scores.begin(),
                    antecedent_scores.end());
  const double top = *std::max_element(row.scores.begin(), row.scores.end());
  row.probs.resize(row.scores.size());
  double z = 0.0;
  for (size_t k = 0; k < row.scores.size(); ++k) {
    row.probs[k] = std::exp(row.scores[k] - top);
    z += row.probs[k];
  }
  for (double &p : row.probs) p /= z;
  return row;
}

AntecedentRow AntecedentDistribution(
    int position, const std::vector<std::vector<double>> &kept_reps,
    const ModelParams &params) {
  if (position < 0 || position >= static_cast<int>(kept_reps.size())) {
    throw ContractError("antecedent distribution: span not in kept set");
  }
  std::vector<double> scores;
  for (int j = 0; j < position; ++j) {
    scores.push_back(PairwiseScore(kept_reps[position], kept_reps[j],
                                   DistanceFeature(position, j), params));
  }
  return MakeAntecedentRow(scores);
}

SpanScorer::SpanScorer(const Document &doc, const ModelParams &params,
                       const PrecomputedEmbeddings *precomputed, Exec exec)
    : params_(params),
      exec_(exec),
      span_dim_(params.config().span_dim()),
      candidates_(EnumerateSpans(doc.size(), params.config().max_span_width)) {
  TokenVectors tokens = EncodeTokens(doc, params, precomputed);
  ScoreMentions(tokens, candidates_, params, exec, reps_, mention_scores_);
}

std::span<const double> SpanScorer::rep(int candidate) const {
  return std::span<const double>(reps_).subspan(
      static_cast<size_t>(candidate) * span_dim_, span_dim_);
}

std::vector<double> SpanScorer::PairScores(
    std::span<const int> kept_candidates) const {
  std::vector<double> kept(kept_candidates.size() * span_dim_);
  for (size_t p = 0; p < kept_candidates.size(); ++p) {
    auto r = rep(kept_candidates[p]);
    std::copy(r.begin(), r.end(), kept.begin() + p * span_dim_);
  }
  return ScorePairs(kept, static_cast<int>(kept_candidates.size()), params_,
                    exec_);
}

}  // namespace corefens
