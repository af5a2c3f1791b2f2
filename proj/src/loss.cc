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

#include <algorithm>
#include <cmath>

#include "corefens/errors.h"
#include "corefens/ffnn.h"
#include "corefens/training.h"

namespace corefens {

namespace {

constexpr double kLogFloor = 1e-12;

double Sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

GoldAssignment AssignGold(const Document &doc, const PrunedSpans &kept) {
  const std::map<MentionSpan, int> index = ClusterIndex(doc.gold_clusters);
  const size_t n = kept.size();
  GoldAssignment gold;
  gold.labels.assign(n, 0);
  gold.antecedents.resize(n);
  std::vector<int> cluster(n, -1);
  for (size_t i = 0; i < n; ++i) {
    auto it = index.find(kept.spans[i]);
    if (it != index.end()) {
      cluster[i] = it->second;
      gold.labels[i] = 1;
    }
    for (size_t j = 0; j < i; ++j) {
      if (cluster[i] >= 0 && cluster[j] == cluster[i]) {
        gold.antecedents[i].push_back(static_cast<int>(j) + 1);
      }
    }
    if (gold.antecedents[i].empty()) gold.antecedents[i].push_back(0);
  }
  return gold;
}

double DetectionLoss(std::span<const double> scores,
                     std::span<const int> labels,
                     std::vector<double> *d_scores) {
  if (scores.size() != labels.size()) {
    throw ContractError("detection loss: scores and labels differ in size");
  }
  if (d_scores) d_scores->assign(scores.size(), 0.0);
  if (scores.empty()) return 0.0;
  const double inv = 1.0 / static_cast<double>(scores.size());
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double p = Sigmoid(scores[i]);
    const double q = Sigmoid(-scores[i]);
    double term;
    double d_term;
    if (labels[i]) {
      term = std::log(std::max(p, kLogFloor));
      d_term = p >= kLogFloor ? q : 0.0;
    } else {
      term = std::log(std::max(q, kLogFloor));
      d_term = q >= kLogFloor ? -p : 0.0;
    }
    sum += term;
    if (d_scores) (*d_scores)[i] = -d_term * inv;
  }
  return -sum * inv;
}

double ClusteringLoss(const std::vector<AntecedentRow> &rows,
                      const GoldAssignment &gold,
                      std::vector<std::vector<double>> *d_scores) {
  if (rows.size() != gold.antecedents.size()) {
    throw ContractError("clustering loss: table and gold differ in size");
  }
  if (d_scores) d_scores->assign(rows.size(), {});
  double loss = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const std::vector<double> &s = rows[i].scores;
    const std::vector<int> &g = gold.antecedents[i];
    const double top = *std::max_element(s.begin(), s.end());
    double z_all = 0.0;
    for (double v : s) z_all += std::exp(v - top);
    double top_gold = s[g.front()];
    for (int k : g) top_gold = std::max(top_gold, s[k]);
    double z_gold = 0.0;
    for (int k : g) z_gold += std::exp(s[k] - top_gold);
    const double lse_all = top + std::log(z_all);
    const double lse_gold = top_gold + std::log(z_gold);
    loss += lse_all - lse_gold;
    if (d_scores) {
      // dL/ds_k = P(k) - P(k | gold); the dummy score is fixed.
      std::vector<double> &d = (*d_scores)[i];
      d.assign(s.size() - 1, 0.0);
      for (size_t k = 1; k < s.size(); ++k) d[k - 1] = std::exp(s[k] - lse_all);
      for (int k : g) {
        if (k > 0) d[k - 1] -= std::exp(s[k] - lse_gold);
      }
    }
  }
  return loss;
}

std::vector<MentionSpan> KeptSpans(const Document &doc,
                                   const ModelParams &params,
                                   const PruneStrategy &prune,
                                   const PrecomputedEmbeddings *precomputed) {
  SpanScorer scorer(doc, params, precomputed, Exec::kSerial);
  return Prune(scorer.candidates(), scorer.mention_scores(), prune, doc.size())
      .spans;
}

std::vector<MentionSpan> KeptSpansWithGold(
    const Document &doc, const ModelParams &params, const PruneStrategy &prune,
    const PrecomputedEmbeddings *precomputed) {
  std::vector<MentionSpan> spans = KeptSpans(doc, params, prune, precomputed);
  const int limit = params.config().max_span_width;
  for (const Cluster &cluster : doc.gold_clusters) {
    for (const MentionSpan &span : cluster.spans) {
      if (span.length() <= limit) spans.push_back(span);
    }
  }
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  return spans;
}

LossValue ForwardBackward(const Document &doc, const ModelParams &params,
                          const PruneStrategy &prune, Gradients *grads,
                          const PrecomputedEmbeddings *precomputed,
                          const std::vector<MentionSpan> *fixed_kept) {
  PrunedSpans kept;
  if (fixed_kept) {
    kept.spans = *fixed_kept;
    if (!std::is_sorted(kept.spans.begin(), kept.spans.end())) {
      throw ContractError("fixed kept set must be in span order");
    }
  } else {
    kept.spans = KeptSpans(doc, params, prune, precomputed);
  }

  const TokenVectors tokens = EncodeTokens(doc, params, precomputed);
  const int count = static_cast<int>(kept.size());
  const int g = params.config().span_dim();
  std::vector<std::vector<double>> reps(count);
  std::vector<std::vector<double>> weights(count);
  std::vector<FfnnCache> mention_cache(count);
  kept.scores.resize(count);
  for (int i = 0; i < count; ++i) {
    reps[i] = SpanRepresentation(tokens, kept.spans[i], params, &weights[i]);
    kept.scores[i] =
        FfnnForward(params, params.mention_ffnn(), reps[i], &mention_cache[i]);
  }

  std::vector<double> input(params.config().pair_dim());
  std::vector<std::vector<FfnnCache>> pair_cache(count);
  std::vector<AntecedentRow> rows(count);
  std::vector<double> pair_scores;
  for (int i = 0; i < count; ++i) {
    pair_cache[i].resize(i);
    pair_scores.assign(i, 0.0);
    for (int j = 0; j < i; ++j) {
      PairInputInto(reps[i], reps[j], DistanceFeature(i, j), params,
                    input.data());
      pair_scores[j] =
          FfnnForward(params, params.pair_ffnn(), input, &pair_cache[i][j]);
    }
    rows[i] = MakeAntecedentRow(pair_scores);
  }

  const GoldAssignment gold = AssignGold(doc, kept);
  LossValue value;
  value.kept = kept.size();
  std::vector<double> d_mention;
  std::vector<std::vector<double>> d_pair;
  value.detect = DetectionLoss(kept.scores, gold.labels,
                               grads ? &d_mention : nullptr);
  value.cluster = ClusteringLoss(rows, gold, grads ? &d_pair : nullptr);
  if (!grads) return value;

  std::vector<std::vector<double>> d_reps(count, std::vector<double>(g, 0.0));
  std::vector<double> d_input(input.size());
  std::vector<double> &d_distance = (*grads)[ModelParams::kDistanceEmbeddings];
  const int dd = params.config().distance_dim;
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < i; ++j) {
      const double ds = d_pair[i][j];
      if (ds == 0.0) continue;
      const int bucket = DistanceFeature(i, j);
      PairInputInto(reps[i], reps[j], bucket, params, input.data());
      std::fill(d_input.begin(), d_input.end(), 0.0);
      FfnnBackward(params, params.pair_ffnn(), input, pair_cache[i][j], ds,
                   *grads, d_input);
      for (int k = 0; k < g; ++k) {
        d_reps[i][k] += d_input[k] + d_input[2 * g + k] * reps[j][k];
        d_reps[j][k] += d_input[g + k] + d_input[2 * g + k] * reps[i][k];
      }
      for (int k = 0; k < dd; ++k) {
        d_distance[static_cast<size_t>(bucket) * dd + k] += d_input[3 * g + k];
      }
    }
  }

  TokenVectors d_tokens(tokens.rows, tokens.cols);
  for (int i = 0; i < count; ++i) {
    if (d_mention[i] != 0.0) {
      FfnnBackward(params, params.mention_ffnn(), reps[i], mention_cache[i],
                   d_mention[i], *grads, d_reps[i]);
    }
    SpanRepresentationBackward(tokens, kept.spans[i], params, weights[i],
                               d_reps[i], d_tokens, *grads);
  }
  EncodeTokensBackward(doc, params, d_tokens, *grads);
  return value;
}

}  // namespace corefens
