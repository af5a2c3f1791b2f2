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

#include "corefens/encoder.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/rng.h"

namespace corefens {

namespace {

bool ParseDouble(std::string_view s, double *out) {
  // from_chars for double is available in libstdc++ 11.
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(*out);
}

}  // namespace

PrecomputedEmbeddings PrecomputedEmbeddings::Parse(std::string_view text) {
  PrecomputedEmbeddings result;
  int line_no = 0;
  size_t pos = 0;
  bool header = false;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (!line.starts_with("dim=")) {
        throw ParseError("embedding file must start with dim=<d>", line_no);
      }
      int dim = 0;
      auto digits = line.substr(4);
      auto [p, ec] = std::from_chars(digits.data(),
                                     digits.data() + digits.size(), dim);
      if (ec != std::errc() || p != digits.data() + digits.size() || dim < 1) {
        throw ParseError("bad embedding dimension", line_no);
      }
      result.dim_ = dim;
      header = true;
      continue;
    }
    size_t tab1 = line.find('\t');
    size_t tab2 = tab1 == std::string_view::npos ? tab1
                                                  : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) {
      throw ParseError("expected doc_id<TAB>token_index<TAB>vector", line_no);
    }
    std::string doc(line.substr(0, tab1));
    std::string_view index_text = line.substr(tab1 + 1, tab2 - tab1 - 1);
    int index = -1;
    auto [p, ec] = std::from_chars(
        index_text.data(), index_text.data() + index_text.size(), index);
    if (ec != std::errc() || p != index_text.data() + index_text.size() ||
        index < 0) {
      throw ParseError("bad token index", line_no);
    }
    std::vector<double> vec;
    std::string_view values = line.substr(tab2 + 1);
    size_t vpos = 0;
    while (vpos <= values.size()) {
      size_t comma = values.find(',', vpos);
      if (comma == std::string_view::npos) comma = values.size();
      double v = 0;
      if (!ParseDouble(values.substr(vpos, comma - vpos), &v)) {
        throw ParseError("bad vector component", line_no);
      }
      vec.push_back(v);
      vpos = comma + 1;
      if (comma == values.size()) break;
    }
    if (static_cast<int>(vec.size()) != result.dim_) {
      throw ParseError(fmt::format("vector has {} components, expected {}",
                                   vec.size(), result.dim_),
                       line_no);
    }
    result.vectors_[doc][index] = std::move(vec);
  }
  if (!header) throw ParseError("empty embedding file", 0);
  return result;
}

PrecomputedEmbeddings PrecomputedEmbeddings::Load(const std::string &path) {
  return Parse(ReadTextFile(path));
}

TokenVectors PrecomputedEmbeddings::Lookup(const Document &doc) const {
  auto it = vectors_.find(doc.id);
  if (it == vectors_.end()) {
    throw DataError("no precomputed vectors for document " + doc.id);
  }
  TokenVectors out(doc.size(), dim_);
  for (int t = 0; t < doc.size(); ++t) {
    auto v = it->second.find(t);
    if (v == it->second.end()) {
      throw DataError(fmt::format("no precomputed vector for {} token {}",
                                  doc.id, t));
    }
    std::copy(v->second.begin(), v->second.end(), out.row(t));
  }
  return out;
}

int TokenBucket(std::string_view text, int buckets) {
  return static_cast<int>(Fnv1a(text.data(), text.size()) %
                          static_cast<uint64_t>(buckets));
}

TokenVectors EncodeTokens(const Document &doc, const ModelParams &params,
                          const PrecomputedEmbeddings *precomputed) {
  const ModelConfig &config = params.config();
  if (doc.size() == 0) throw DataError("cannot encode empty document " + doc.id);
  if (config.precomputed_embeddings) {
    if (precomputed == nullptr) {
      throw DataError("model expects precomputed token vectors");
    }
    if (precomputed->dim() != config.embed_dim) {
      throw DataError(fmt::format("precomputed dim {} != embed_dim {}",
                                  precomputed->dim(), config.embed_dim));
    }
    return precomputed->Lookup(doc);
  }

  const int n = doc.size();
  const int d = config.embed_dim;
  const int w = config.context_window;
  const ParamBlock &table = params.block(ModelParams::kEmbeddings);
  std::vector<int> bucket(n);
  for (int t = 0; t < n; ++t) {
    bucket[t] = TokenBucket(doc.tokens[t].text, config.hash_buckets);
  }

  TokenVectors x(n, d);
  for (int t = 0; t < n; ++t) {
    double *out = x.row(t);
    const double *self = table.row(bucket[t]);
    const int lo = std::max(0, t - w);
    const int hi = std::min(n - 1, t + w);
    const int neighbors = hi - lo;  // excludes t itself
    for (int k = 0; k < d; ++k) {
      double sum = 0.0;
      for (int u = lo; u <= hi; ++u) {
        if (u != t) sum += table.row(bucket[u])[k];
      }
      out[k] = self[k] + (neighbors > 0 ? sum / neighbors : 0.0);
    }
  }
  return x;
}

void EncodeTokensBackward(const Document &doc, const ModelParams &params,
                          const TokenVectors &d_tokens, Gradients &grads) {
  const ModelConfig &config = params.config();
  if (config.precomputed_embeddings) return;
  const int n = doc.size();
  const int d = config.embed_dim;
  const int w = config.context_window;
  std::vector<double> &g = grads[ModelParams::kEmbeddings];
  for (int t = 0; t < n; ++t) {
    const double *dx = d_tokens.row(t);
    const int self = TokenBucket(doc.tokens[t].text, config.hash_buckets);
    for (int k = 0; k < d; ++k) g[static_cast<size_t>(self) * d + k] += dx[k];
    const int lo = std::max(0, t - w);
    const int hi = std::min(n - 1, t + w);
    const int neighbors = hi - lo;
    if (neighbors == 0) continue;
    for (int u = lo; u <= hi; ++u) {
      if (u == t) continue;
      const int b = TokenBucket(doc.tokens[u].text, config.hash_buckets);
      for (int k = 0; k < d; ++k) {
        g[static_cast<size_t>(b) * d + k] += dx[k] / neighbors;
      }
    }
  }
}

namespace {

void CheckSpan(const TokenVectors &tokens, MentionSpan span,
               const ModelParams &params) {
  if (span.start < 0 || span.end < span.start || span.end >= tokens.rows) {
    throw ContractError(fmt::format("span ({}, {}) outside document of {} tokens",
                                    span.start, span.end, tokens.rows));
  }
  if (span.length() > params.config().max_span_width) {
    throw ContractError(fmt::format("span of width {} exceeds limit {}",
                                    span.length(),
                                    params.config().max_span_width));
  }
}

// out = sum_t softmax(u)_t x_t over the span, u_t = w . x_t.
void AttendInto(const TokenVectors &tokens, MentionSpan span,
                const double *attn, double *out, double *weights) {
  const int d = tokens.cols;
  const int len = span.length();
  double max_u = -INFINITY;
  for (int i = 0; i < len; ++i) {
    const double *x = tokens.row(span.start + i);
    double u = 0.0;
    for (int k = 0; k < d; ++k) u += attn[k] * x[k];
    weights[i] = u;
    max_u = std::max(max_u, u);
  }
  double z = 0.0;
  for (int i = 0; i < len; ++i) {
    weights[i] = std::exp(weights[i] - max_u);
    z += weights[i];
  }
  for (int i = 0; i < len; ++i) weights[i] /= z;
  std::fill(out, out + d, 0.0);
  for (int i = 0; i < len; ++i) {
    const double *x = tokens.row(span.start + i);
    for (int k = 0; k < d; ++k) out[k] += weights[i] * x[k];
  }
}

}  // namespace

std::vector<double> HeadAttention(const TokenVectors &tokens, MentionSpan span,
                                  const ModelParams &params,
                                  std::vector<double> *weights) {
  if (span.start < 0 || span.end < span.start || span.end >= tokens.rows) {
    throw ContractError("span outside document");
  }
  std::vector<double> head(tokens.cols);
  std::vector<double> local(span.length());
  AttendInto(tokens, span, params.block(ModelParams::kAttention).values.data(),
             head.data(), local.data());
  if (weights) *weights = std::move(local);
  return head;
}

void HeadAttentionBackward(const TokenVectors &tokens, MentionSpan span,
                           const ModelParams &params,
                           std::span<const double> weights,
                           std::span<const double> d_head,
                           TokenVectors &d_tokens, Gradients &grads) {
  const int d = tokens.cols;
  const int len = span.length();
  const double *attn = params.block(ModelParams::kAttention).values.data();
  std::vector<double> &d_attn = grads[ModelParams::kAttention];

  // dL/dalpha_i = d_head . x_i, then through the softmax.
  std::vector<double> d_alpha(len);
  double mean = 0.0;
  for (int i = 0; i < len; ++i) {
    const double *x = tokens.row(span.start + i);
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += d_head[k] * x[k];
    d_alpha[i] = s;
    mean += weights[i] * s;
  }
  for (int i = 0; i < len; ++i) {
    const double du = weights[i] * (d_alpha[i] - mean);
    const double *x = tokens.row(span.start + i);
    double *dx = d_tokens.row(span.start + i);
    for (int k = 0; k < d; ++k) {
      dx[k] += weights[i] * d_head[k] + du * attn[k];
      d_attn[k] += du * x[k];
    }
  }
}

void SpanRepresentationInto(const TokenVectors &tokens, MentionSpan span,
                            const ModelParams &params, double *out,
                            std::vector<double> *weights) {
  CheckSpan(tokens, span, params);
  const int d = tokens.cols;
  const ModelConfig &config = params.config();
  std::copy(tokens.row(span.start), tokens.row(span.start) + d, out);
  std::copy(tokens.row(span.end), tokens.row(span.end) + d, out + d);
  double local[64];
  std::vector<double> heap;
  double *alpha = local;
  if (weights) {
    weights->resize(span.length());
    alpha = weights->data();
  } else if (span.length() > 64) {
    heap.resize(span.length());
    alpha = heap.data();
  }
  AttendInto(tokens, span, params.block(ModelParams::kAttention).values.data(),
             out + 2 * d, alpha);
  const ParamBlock &width = params.block(ModelParams::kWidthEmbeddings);
  const double *phi = width.row(WidthBucket(span.length()));
  std::copy(phi, phi + config.width_dim, out + 3 * d);
}

std::vector<double> SpanRepresentation(const TokenVectors &tokens,
                                       MentionSpan span,
                                       const ModelParams &params,
                                       std::vector<double> *weights) {
  std::vector<double> g(params.config().span_dim());
  SpanRepresentationInto(tokens, span, params, g.data(), weights);
  return g;
}

void SpanRepresentationBackward(const TokenVectors &tokens, MentionSpan span,
                                const ModelParams &params,
                                std::span<const double> weights,
                                std::span<const double> d_rep,
                                TokenVectors &d_tokens, Gradients &grads) {
  const int d = tokens.cols;
  const int wd = params.config().width_dim;
  double *dstart = d_tokens.row(span.start);
  double *dend = d_tokens.row(span.end);
  for (int k = 0; k < d; ++k) {
    dstart[k] += d_rep[k];
    dend[k] += d_rep[d + k];
  }
  HeadAttentionBackward(tokens, span, params, weights, d_rep.subspan(2 * d, d),
                        d_tokens, grads);
  std::vector<double> &dw = grads[ModelParams::kWidthEmbeddings];
  const size_t row = static_cast<size_t>(WidthBucket(span.length())) * wd;
  for (int k = 0; k < wd; ++k) dw[row + k] += d_rep[3 * d + k];
}

}  // namespace corefens
