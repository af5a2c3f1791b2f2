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

// Mention and pair scoring kernels. Each item is computed by the same
// function in both variants, so parallel results match the serial ones
// bit for bit regardless of thread count.

#include <vector>

#include "corefens/ffnn.h"
#include "corefens/scorer.h"

namespace corefens {

namespace {

inline double ScoreOneSpan(const TokenVectors &tokens, MentionSpan span,
                           const ModelParams &params, double *rep) {
  SpanRepresentationInto(tokens, span, params, rep);
  return FfnnForward(params, params.mention_ffnn(),
                     std::span<const double>(rep, params.config().span_dim()));
}

inline void ScorePairRow(std::span<const double> kept_reps, int p,
                         const ModelParams &params, double *input,
                         double *row) {
  const int g = params.config().span_dim();
  const int pair_dim = params.config().pair_dim();
  auto rep_p = kept_reps.subspan(static_cast<size_t>(p) * g, g);
  for (int q = 0; q < p; ++q) {
    auto rep_q = kept_reps.subspan(static_cast<size_t>(q) * g, g);
    PairInputInto(rep_p, rep_q, DistanceFeature(p, q), params, input);
    row[q] = FfnnForward(params, params.pair_ffnn(),
                         std::span<const double>(input, pair_dim));
  }
}

}  // namespace

void ScoreMentions(const TokenVectors &tokens,
                   std::span<const MentionSpan> spans,
                   const ModelParams &params, Exec exec,
                   std::vector<double> &reps, std::vector<double> &scores) {
  const int g = params.config().span_dim();
  const long n = static_cast<long>(spans.size());
  reps.assign(static_cast<size_t>(n) * g, 0.0);
  scores.assign(n, 0.0);
  if (exec == Exec::kSerial) {
    for (long s = 0; s < n; ++s) {
      scores[s] = ScoreOneSpan(tokens, spans[s], params, reps.data() + s * g);
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (long s = 0; s < n; ++s) {
    scores[s] = ScoreOneSpan(tokens, spans[s], params, reps.data() + s * g);
  }
}

std::vector<double> ScorePairs(std::span<const double> kept_reps, int count,
                               const ModelParams &params, Exec exec) {
  std::vector<double> out(count > 1 ? PairOffset(count) : 0);
  const int pair_dim = params.config().pair_dim();
  if (exec == Exec::kSerial) {
    std::vector<double> input(pair_dim);
    for (int p = 1; p < count; ++p) {
      ScorePairRow(kept_reps, p, params, input.data(),
                   out.data() + PairOffset(p));
    }
    return out;
  }
#pragma omp parallel
  {
    std::vector<double> input(pair_dim);
#pragma omp for schedule(dynamic, 4)
    for (int p = 1; p < count; ++p) {
      ScorePairRow(kept_reps, p, params, input.data(),
                   out.data() + PairOffset(p));
    }
  }
  return out;
}

}  // namespace corefens
