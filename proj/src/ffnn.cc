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

#include "corefens/ffnn.h"

namespace corefens {

namespace internal {

namespace {
thread_local ReluPatternRecorder *active_recorder = nullptr;
}  // namespace

ReluPatternRecorder::ReluPatternRecorder() : previous_(active_recorder) {
  active_recorder = this;
}

ReluPatternRecorder::~ReluPatternRecorder() { active_recorder = previous_; }

void ReluPatternRecorder::Record(bool active) {
  if (active_recorder) active_recorder->pattern_.push_back(active ? 1 : 0);
}

}  // namespace internal

double FfnnForward(const ModelParams &params, const FfnnLayout &layout,
                   std::span<const double> input, FfnnCache *cache) {
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  if (cache) cache->hidden.resize(layout.layers);
  for (int l = 0; l < layout.layers; ++l) {
    const ParamBlock &w = params.block(layout.weight(l));
    const ParamBlock &b = params.block(layout.bias(l));
    next.assign(w.rows, 0.0);
    for (int o = 0; o < w.rows; ++o) {
      const double *wr = w.row(o);
      double s = b.values[o];
      for (int i = 0; i < w.cols; ++i) s += wr[i] * current[i];
      internal::ReluPatternRecorder::Record(s > 0.0);
      next[o] = s > 0.0 ? s : 0.0;
    }
    current.swap(next);
    if (cache) cache->hidden[l] = current;
  }
  const ParamBlock &wo = params.block(layout.out_weight());
  double out = params.block(layout.out_bias()).values[0];
  for (int i = 0; i < wo.cols; ++i) out += wo.values[i] * current[i];
  return out;
}

void FfnnBackward(const ModelParams &params, const FfnnLayout &layout,
                  std::span<const double> input, const FfnnCache &cache,
                  double d_out, Gradients &grads, std::span<double> d_input) {
  const ParamBlock &wo = params.block(layout.out_weight());
  const std::vector<double> &top = cache.hidden.back();
  std::vector<double> &g_wo = grads[layout.out_weight()];
  grads[layout.out_bias()][0] += d_out;
  std::vector<double> delta(wo.cols);
  for (int i = 0; i < wo.cols; ++i) {
    g_wo[i] += d_out * top[i];
    delta[i] = d_out * wo.values[i];
  }
  for (int l = layout.layers - 1; l >= 0; --l) {
    const ParamBlock &w = params.block(layout.weight(l));
    const std::vector<double> &out = cache.hidden[l];
    std::span<const double> in =
        l == 0 ? input : std::span<const double>(cache.hidden[l - 1]);
    std::vector<double> &g_w = grads[layout.weight(l)];
    std::vector<double> &g_b = grads[layout.bias(l)];
    std::vector<double> below(w.cols, 0.0);
    for (int o = 0; o < w.rows; ++o) {
      // ReLU gate: the output is zero exactly when the unit is off.
      if (out[o] <= 0.0) continue;
      const double dz = delta[o];
      if (dz == 0.0) continue;
      g_b[o] += dz;
      const double *wr = w.row(o);
      double *gr = g_w.data() + static_cast<size_t>(o) * w.cols;
      for (int i = 0; i < w.cols; ++i) {
        gr[i] += dz * in[i];
        below[i] += dz * wr[i];
      }
    }
    if (l == 0) {
      for (int i = 0; i < w.cols; ++i) d_input[i] += below[i];
    } else {
      delta.swap(below);
    }
  }
}

}  // namespace corefens
