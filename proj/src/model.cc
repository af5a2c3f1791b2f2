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

#include "corefens/model.h"

#include <cstring>
#include <map>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/rng.h"

namespace corefens {

void ModelConfig::Validate() const {
  if (embed_dim < 2) throw ConfigError("embed_dim must be at least 2");
  if (context_window < 0) throw ConfigError("context_window must be >= 0");
  if (hash_buckets < 1) throw ConfigError("hash_buckets must be positive");
  if (width_dim < 1 || distance_dim < 1) {
    throw ConfigError("feature embedding sizes must be positive");
  }
  if (hidden_dim < 1 || hidden_layers < 1) {
    throw ConfigError("scorer networks need at least one hidden layer");
  }
  if (max_span_width < 1) throw ConfigError("max_span_width must be >= 1");
}

std::string ModelConfig::Fingerprint() const {
  return fmt::format(
      "embed_dim={};context_window={};hash_buckets={};width_dim={};"
      "distance_dim={};hidden_dim={};hidden_layers={};max_span_width={};"
      "precomputed_embeddings={};span_order=start_end",
      embed_dim, context_window, hash_buckets, width_dim, distance_dim,
      hidden_dim, hidden_layers, max_span_width,
      precomputed_embeddings ? 1 : 0);
}

ModelConfig ModelConfig::FromFingerprint(const std::string &fingerprint) {
  std::map<std::string, std::string> kv;
  size_t pos = 0;
  while (pos < fingerprint.size()) {
    size_t semi = fingerprint.find(';', pos);
    if (semi == std::string::npos) semi = fingerprint.size();
    std::string item = fingerprint.substr(pos, semi - pos);
    size_t eq = item.find('=');
    if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
    pos = semi + 1;
  }
  auto get = [&](const char *key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw DataError(fmt::format("config fingerprint lacks '{}'", key));
    }
    try {
      return std::stoi(it->second);
    } catch (const std::exception &) {
      throw DataError(fmt::format("bad value for '{}' in fingerprint", key));
    }
  };
  if (kv.count("span_order") && kv["span_order"] != "start_end") {
    throw DataError("unsupported span ordering " + kv["span_order"]);
  }
  ModelConfig config;
  config.embed_dim = get("embed_dim");
  config.context_window = get("context_window");
  config.hash_buckets = get("hash_buckets");
  config.width_dim = get("width_dim");
  config.distance_dim = get("distance_dim");
  config.hidden_dim = get("hidden_dim");
  config.hidden_layers = get("hidden_layers");
  config.max_span_width = get("max_span_width");
  config.precomputed_embeddings = get("precomputed_embeddings") != 0;
  config.Validate();
  return config;
}

int WidthBucket(int width) {
  if (width <= 4) return width < 1 ? 0 : width - 1;
  if (width <= 7) return 4;
  if (width <= 15) return 5;
  if (width <= 31) return 6;
  return 7;
}

int DistanceBucket(int distance) {
  if (distance <= 4) return distance < 1 ? 0 : distance - 1;
  if (distance <= 7) return 4;
  if (distance <= 15) return 5;
  if (distance <= 31) return 6;
  if (distance <= 63) return 7;
  return 8;
}

ModelParams::ModelParams(const ModelConfig &config) : config_(config) {
  config_.Validate();
  const int d = config_.embed_dim;
  AddBlock("embeddings",
           config_.precomputed_embeddings ? 0 : config_.hash_buckets, d, true);
  AddBlock("attention", 1, d, false);
  AddBlock("width_embeddings", kNumWidthBuckets, config_.width_dim, false);
  AddBlock("distance_embeddings", kNumDistanceBuckets, config_.distance_dim,
           false);
  mention_ = AddFfnn("mention", config_.span_dim());
  pair_ = AddFfnn("pair", config_.pair_dim());
}

void ModelParams::AddBlock(std::string name, int rows, int cols, bool encoder) {
  ParamBlock block;
  block.name = std::move(name);
  block.rows = rows;
  block.cols = cols;
  block.encoder = encoder;
  block.values.assign(static_cast<size_t>(rows) * cols, 0.0);
  blocks_.push_back(std::move(block));
}

FfnnLayout ModelParams::AddFfnn(const std::string &prefix, int input_dim) {
  FfnnLayout layout{static_cast<int>(blocks_.size()), config_.hidden_layers};
  int in = input_dim;
  for (int l = 0; l < config_.hidden_layers; ++l) {
    AddBlock(fmt::format("{}.w{}", prefix, l), config_.hidden_dim, in, false);
    AddBlock(fmt::format("{}.b{}", prefix, l), 1, config_.hidden_dim, false);
    in = config_.hidden_dim;
  }
  AddBlock(prefix + ".w_out", 1, in, false);
  AddBlock(prefix + ".b_out", 1, 1, false);
  return layout;
}

ModelParams ModelParams::Initialize(const ModelConfig &config, uint64_t seed,
                                    double scale) {
  ModelParams params(config);
  Rng rng(seed);
  for (ParamBlock &block : params.blocks_) {
    for (double &v : block.values) v = rng.Uniform(-scale, scale);
  }
  return params;
}

Gradients ModelParams::ZeroGradients() const {
  Gradients grads(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    grads[b].assign(blocks_[b].values.size(), 0.0);
  }
  return grads;
}

size_t ModelParams::NumParameters() const {
  size_t n = 0;
  for (const ParamBlock &block : blocks_) n += block.values.size();
  return n;
}

bool ModelParams::operator==(const ModelParams &other) const {
  if (!(config_ == other.config_) || version_ != other.version_ ||
      blocks_.size() != other.blocks_.size()) {
    return false;
  }
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const ParamBlock &x = blocks_[b];
    const ParamBlock &y = other.blocks_[b];
    if (x.name != y.name || x.rows != y.rows || x.cols != y.cols ||
        x.values.size() != y.values.size()) {
      return false;
    }
    // Bitwise, so -0.0 and NaN payloads count.
    if (!x.values.empty() &&
        std::memcmp(x.values.data(), y.values.data(),
                    x.values.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace corefens
