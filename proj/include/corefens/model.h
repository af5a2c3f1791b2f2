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

#ifndef COREFENS_MODEL_H_
#define COREFENS_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corefens {

struct ModelConfig {
  int embed_dim = 32;
  int context_window = 1;
  int hash_buckets = 4096;
  int width_dim = 8;
  int distance_dim = 8;
  int hidden_dim = 64;
  int hidden_layers = 1;
  // Longest candidate span, in tokens.
  int max_span_width = 30;
  // Token vectors come from a precomputed file instead of the hash table.
  bool precomputed_embeddings = false;

  // Length of a span representation g.
  int span_dim() const { return 3 * embed_dim + width_dim; }
  // Length of the pairwise scorer input [g_i, g_j, g_i*g_j, phi(i,j)].
  int pair_dim() const { return 3 * span_dim() + distance_dim; }

  void Validate() const;

  // Canonical `key=value;...` rendering of every field. Two checkpoints
  // with equal fingerprints have identical parameter shapes.
  std::string Fingerprint() const;
  static ModelConfig FromFingerprint(const std::string &fingerprint);

  bool operator==(const ModelConfig &) const = default;
};

// Span widths 1, 2, 3, 4, 5-7, 8-15, 16-31, 32+.
inline constexpr int kNumWidthBuckets = 8;
// Antecedent distances 1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+.
inline constexpr int kNumDistanceBuckets = 9;

int WidthBucket(int width);
int DistanceBucket(int distance);

// A named dense parameter matrix, row-major.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  // Encoder blocks train at the lower learning rate.
  bool encoder = false;
  std::vector<double> values;

  double *row(int r) { return values.data() + static_cast<size_t>(r) * cols; }
  const double *row(int r) const {
    return values.data() + static_cast<size_t>(r) * cols;
  }
};

// Block indices of a feed-forward scorer: per hidden layer a weight matrix
// (out x in) and a bias row, then the scalar output head.
struct FfnnLayout {
  int first_block = 0;
  int layers = 1;

  int weight(int layer) const { return first_block + 2 * layer; }
  int bias(int layer) const { return first_block + 2 * layer + 1; }
  int out_weight() const { return first_block + 2 * layers; }
  int out_bias() const { return first_block + 2 * layers + 1; }
  int num_blocks() const { return 2 * layers + 2; }
};

using Gradients = std::vector<std::vector<double>>;

// All trainable parameters of one model.
class ModelParams {
 public:
  static constexpr int kEmbeddings = 0;
  static constexpr int kAttention = 1;
  static constexpr int kWidthEmbeddings = 2;
  static constexpr int kDistanceEmbeddings = 3;

  ModelParams() = default;

  // Allocates every block with zeros.
  explicit ModelParams(const ModelConfig &config);

  // Uniform in [-scale, scale] from `seed`.
  static ModelParams Initialize(const ModelConfig &config, uint64_t seed,
                                double scale = 0.1);

  const ModelConfig &config() const { return config_; }
  uint64_t version() const { return version_; }
  void set_version(uint64_t v) { version_ = v; }

  std::vector<ParamBlock> &blocks() { return blocks_; }
  const std::vector<ParamBlock> &blocks() const { return blocks_; }
  ParamBlock &block(int i) { return blocks_[i]; }
  const ParamBlock &block(int i) const { return blocks_[i]; }

  const FfnnLayout &mention_ffnn() const { return mention_; }
  const FfnnLayout &pair_ffnn() const { return pair_; }

  Gradients ZeroGradients() const;
  size_t NumParameters() const;

  bool operator==(const ModelParams &other) const;

 private:
  void AddBlock(std::string name, int rows, int cols, bool encoder);
  FfnnLayout AddFfnn(const std::string &prefix, int input_dim);

  ModelConfig config_;
  uint64_t version_ = 0;
  std::vector<ParamBlock> blocks_;
  FfnnLayout mention_;
  FfnnLayout pair_;
};

}  // namespace corefens

#endif  // COREFENS_MODEL_H_
