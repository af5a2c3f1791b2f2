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

// Scalar-output feed-forward network with ReLU hidden layers.

#ifndef COREFENS_FFNN_H_
#define COREFENS_FFNN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "corefens/model.h"

namespace corefens {

// Post-activation outputs of every hidden layer.
struct FfnnCache {
  std::vector<std::vector<double>> hidden;
};

double FfnnForward(const ModelParams &params, const FfnnLayout &layout,
                   std::span<const double> input, FfnnCache *cache = nullptr);

// Accumulates parameter gradients into `grads` and dL/d(input) into
// `d_input` for an upstream gradient `d_out` on the scalar output.
void FfnnBackward(const ModelParams &params, const FfnnLayout &layout,
                  std::span<const double> input, const FfnnCache &cache,
                  double d_out, Gradients &grads, std::span<double> d_input);

namespace internal {

// Records the on/off pattern of every ReLU evaluated on this thread while
// alive. Gradient checks use it to skip finite-difference probes that cross
// a kink.
class ReluPatternRecorder {
 public:
  ReluPatternRecorder();
  ~ReluPatternRecorder();
  ReluPatternRecorder(const ReluPatternRecorder &) = delete;
  ReluPatternRecorder &operator=(const ReluPatternRecorder &) = delete;

  const std::vector<uint8_t> &pattern() const { return pattern_; }

  static void Record(bool active);

 private:
  std::vector<uint8_t> pattern_;
  ReluPatternRecorder *previous_;
};

}  // namespace internal

}  // namespace corefens

#endif  // COREFENS_FFNN_H_
