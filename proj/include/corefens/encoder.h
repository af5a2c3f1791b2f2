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

// Token encoder and span representations.
//
// Each token is embedded through a hashed lookup table and mixed with the
// mean embedding of its neighbors:
//
//   x_t = e[h(t)] + mean{ e[h(u)] : 0 < |u - t| <= context_window }
//
// A span (s, e) is represented as g = [x_s, x_e, xhat, width(e - s + 1)]
// where xhat is the attention-weighted sum of x_s..x_e with weights
// softmax(w_attn . x_t).

#ifndef COREFENS_ENCODER_H_
#define COREFENS_ENCODER_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corefens/corpus.h"
#include "corefens/model.h"

namespace corefens {

// n x dim, row t is x_t.
struct TokenVectors {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  TokenVectors() = default;
  TokenVectors(int n, int dim)
      : rows(n), cols(dim), values(static_cast<size_t>(n) * dim, 0.0) {}

  double *row(int t) { return values.data() + static_cast<size_t>(t) * cols; }
  const double *row(int t) const {
    return values.data() + static_cast<size_t>(t) * cols;
  }
};

// Externally produced token vectors keyed by (doc id, token index).
// File format: a `dim=<d>` header line, then
// `doc_id<TAB>token_index<TAB>v1,v2,...,vd` lines.
class PrecomputedEmbeddings {
 public:
  static PrecomputedEmbeddings Parse(std::string_view text);
  static PrecomputedEmbeddings Load(const std::string &path);

  int dim() const { return dim_; }
  // Throws DataError when the document or a token is missing.
  TokenVectors Lookup(const Document &doc) const;

 private:
  int dim_ = 0;
  std::map<std::string, std::map<int, std::vector<double>>> vectors_;
};

// Hash bucket of a token string (FNV-1a of its UTF-8 bytes).
int TokenBucket(std::string_view text, int buckets);

// Throws DataError on an empty document, or when precomputed vectors are
// required but missing.
TokenVectors EncodeTokens(const Document &doc, const ModelParams &params,
                          const PrecomputedEmbeddings *precomputed = nullptr);

// Accumulates dL/d(embeddings) given dL/dX. No-op for precomputed vectors.
void EncodeTokensBackward(const Document &doc, const ModelParams &params,
                          const TokenVectors &d_tokens, Gradients &grads);

// Attention-weighted span head; optionally returns the weights.
std::vector<double> HeadAttention(const TokenVectors &tokens, MentionSpan span,
                                  const ModelParams &params,
                                  std::vector<double> *weights = nullptr);

void HeadAttentionBackward(const TokenVectors &tokens, MentionSpan span,
                           const ModelParams &params,
                           std::span<const double> weights,
                           std::span<const double> d_head,
                           TokenVectors &d_tokens, Gradients &grads);

// Writes g into `out` (span_dim entries). Throws ContractError for spans
// outside the document or longer than max_span_width.
void SpanRepresentationInto(const TokenVectors &tokens, MentionSpan span,
                            const ModelParams &params, double *out,
                            std::vector<double> *weights = nullptr);

std::vector<double> SpanRepresentation(const TokenVectors &tokens,
                                       MentionSpan span,
                                       const ModelParams &params,
                                       std::vector<double> *weights = nullptr);

void SpanRepresentationBackward(const TokenVectors &tokens, MentionSpan span,
                                const ModelParams &params,
                                std::span<const double> weights,
                                std::span<const double> d_rep,
                                TokenVectors &d_tokens, Gradients &grads);

}  // namespace corefens

#endif  // COREFENS_ENCODER_H_
