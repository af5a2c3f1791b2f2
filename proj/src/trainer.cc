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

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "corefens/ensemble.h"
#include "corefens/errors.h"
#include "corefens/rng.h"
#include "corefens/training.h"

namespace corefens {

void TrainConfig::Validate() const {
  if (!(lower_lr > 0.0) || !(upper_lr > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (epochs < 1 || pretrain_epochs < 1 || finetune_epochs < 1) {
    throw ConfigError("epoch counts must be at least 1");
  }
  if (clip_norm < 0.0) throw ConfigError("clip norm must be non-negative");
  if (!(init_scale > 0.0)) throw ConfigError("init scale must be positive");
  if (prune.kind == PruneStrategy::Kind::kTopLambda &&
      !(prune.lambda > 0.0 && prune.lambda <= 1.0)) {
    throw ConfigError("lambda must be in (0, 1]");
  }
}

void ApplyGradients(ModelParams &params, const Gradients &grads,
                    const TrainConfig &config) {
  auto &blocks = params.blocks();
  if (grads.size() != blocks.size()) {
    throw ContractError("gradient block count does not match parameters");
  }
  double norm_sq = 0.0;
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (grads[b].size() != blocks[b].values.size()) {
      throw ContractError("gradient shape mismatch in block " +
                          blocks[b].name);
    }
    for (size_t k = 0; k < grads[b].size(); ++k) {
      if (!std::isfinite(grads[b][k])) {
        throw NumericError(fmt::format(
            "non-finite gradient in parameter block '{}' at entry {}",
            blocks[b].name, k));
      }
      norm_sq += grads[b][k] * grads[b][k];
    }
  }
  double scale = 1.0;
  if (config.clip_norm > 0.0) {
    const double norm = std::sqrt(norm_sq);
    if (norm > config.clip_norm) scale = config.clip_norm / norm;
  }
  for (size_t b = 0; b < blocks.size(); ++b) {
    const double rate =
        (blocks[b].encoder ? config.lower_lr : config.upper_lr) * scale;
    std::vector<double> &values = blocks[b].values;
    for (size_t k = 0; k < values.size(); ++k) values[k] -= rate * grads[b][k];
  }
  params.set_version(params.version() + 1);
}

LossValue Step(ModelParams &params, const Document &doc,
               const TrainConfig &config,
               const PrecomputedEmbeddings *precomputed) {
  Gradients grads = params.ZeroGradients();
  LossValue value;
  if (config.gold_mentions_in_training) {
    const std::vector<MentionSpan> spans =
        KeptSpansWithGold(doc, params, config.prune, precomputed);
    value = ForwardBackward(doc, params, config.prune, &grads, precomputed,
                            &spans);
  } else {
    value = ForwardBackward(doc, params, config.prune, &grads, precomputed);
  }
  ApplyGradients(params, grads, config);
  return value;
}

std::string RegimeName(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::kBaseline:
      return "baseline";
    case RegimeKind::kContinued:
      return "continued";
    case RegimeKind::kJoint:
      return "joint";
    case RegimeKind::kWikiPretrain:
      return "wiki-pretrain";
  }
  return "unknown";
}

RegimeKind ParseRegime(const std::string &name) {
  for (RegimeKind kind : {RegimeKind::kBaseline, RegimeKind::kContinued,
                          RegimeKind::kJoint, RegimeKind::kWikiPretrain}) {
    if (RegimeName(kind) == name) return kind;
  }
  throw ConfigError("unknown regime '" + name + "'");
}

std::string TrainResult::Log() const {
  std::string out;
  std::string stage;
  for (const EpochRecord &r : epochs) {
    if (r.stage != stage || out.empty()) {
      stage = r.stage;
      out += fmt::format("# stage {}\n", stage);
    }
    out += fmt::format("{}\t{:.6f}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.4f}\n", r.epoch,
                       r.train_loss, r.dev.muc.f1, r.dev.b3.f1, r.dev.ceaf.f1,
                       r.dev.avg_f1);
  }
  return out;
}

TrainResult TrainStage(const ModelParams &init,
                       const std::vector<const Document *> &train,
                       const Corpus &dev, int epochs, uint64_t stage_seed,
                       const TrainConfig &config, const std::string &stage,
                       int first_epoch,
                       const PrecomputedEmbeddings *precomputed) {
  if (train.empty()) throw DataError("training corpus is empty");
  if (dev.empty()) throw DataError("dev corpus is empty");
  if (epochs < 1) throw ConfigError("a stage needs at least one epoch");

  TrainResult result;
  result.params = init;
  ModelParams params = init;
  double best = -std::numeric_limits<double>::infinity();
  const InferenceOptions inference{config.prune, config.emit_singletons};
  std::vector<size_t> order(train.size());
  for (int e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(Rng::Derive(stage_seed, static_cast<uint64_t>(e)));
    rng.Shuffle(order);
    double loss = 0.0;
    for (size_t idx : order) {
      loss += Step(params, *train[idx], config, precomputed).total();
    }

    EpochRecord record;
    record.epoch = first_epoch + e;
    record.stage = stage;
    record.train_loss = loss / static_cast<double>(train.size());
    record.dev = ScoreCorpus(
        dev, PredictCorpus(dev, params, inference, precomputed),
        config.emit_singletons);
    spdlog::info("{} epoch {}: loss {:.4f} dev AVG {:.4f}", stage,
                 record.epoch, record.train_loss, record.dev.avg_f1);
    if (record.dev.avg_f1 > best) {
      best = record.dev.avg_f1;
      result.params = params;
      result.best_epoch = record.epoch;
      result.best_dev_avg = record.dev.avg_f1;
    }
    result.epochs.push_back(std::move(record));
  }
  return result;
}

namespace {

std::vector<const Document *> Pointers(
    std::initializer_list<const Corpus *> corpora) {
  std::vector<const Document *> out;
  for (const Corpus *c : corpora) {
    for (const Document &d : c->documents) out.push_back(&d);
  }
  return out;
}

void Append(TrainResult &into, TrainResult &&stage) {
  for (EpochRecord &r : stage.epochs) into.epochs.push_back(std::move(r));
  into.params = std::move(stage.params);
  into.best_epoch = stage.best_epoch;
  into.best_dev_avg = stage.best_dev_avg;
}

}  // namespace

TrainResult Train(const Regime &regime, const Corpus &dev,
                  const ModelConfig &model, const TrainConfig &config,
                  const PrecomputedEmbeddings *precomputed) {
  model.Validate();
  config.Validate();
  if (regime.target == nullptr || regime.target->empty()) {
    throw DataError("target training corpus is empty");
  }
  if (regime.kind != RegimeKind::kBaseline &&
      (regime.source == nullptr || regime.source->empty())) {
    throw DataError(RegimeName(regime.kind) +
                    " training requires a non-empty source corpus");
  }
  if (dev.empty()) throw DataError("dev corpus is empty");

  const ModelParams init = ModelParams::Initialize(
      model, Rng::Derive(config.seed, 0), config.init_scale);
  const uint64_t first_seed = Rng::Derive(config.seed, 1);
  const uint64_t second_seed = Rng::Derive(config.seed, 2);
  const Corpus &target = *regime.target;

  switch (regime.kind) {
    case RegimeKind::kBaseline:
      return TrainStage(init, Pointers({&target}), dev, config.epochs,
                        first_seed, config, "baseline", 1, precomputed);
    case RegimeKind::kJoint:
      return TrainStage(init, Pointers({regime.source, &target}), dev,
                        config.epochs, first_seed, config, "joint", 1,
                        precomputed);
    case RegimeKind::kContinued: {
      TrainResult result =
          TrainStage(init, Pointers({regime.source}), dev, config.epochs,
                     first_seed, config, "source", 1, precomputed);
      Append(result, TrainStage(result.params, Pointers({&target}), dev,
                                config.epochs, second_seed, config, "target",
                                config.epochs + 1, precomputed));
      return result;
    }
    case RegimeKind::kWikiPretrain: {
      TrainResult result =
          TrainStage(init, Pointers({regime.source}), dev,
                     config.pretrain_epochs, first_seed, config, "pretrain", 1,
                     precomputed);
      Append(result, TrainStage(result.params, Pointers({&target}), dev,
                                config.finetune_epochs, second_seed, config,
                                "finetune", config.pretrain_epochs + 1,
                                precomputed));
      return result;
    }
  }
  throw ContractError("unhandled regime");
}

}  // namespace corefens
