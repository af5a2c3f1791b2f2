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

// Losses, backpropagation, two-group gradient descent and the training
// regimes (baseline, continued, joint, Wikipedia pre-training).

#ifndef COREFENS_TRAINING_H_
#define COREFENS_TRAINING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corefens/corpus.h"
#include "corefens/encoder.h"
#include "corefens/metrics.h"
#include "corefens/model.h"
#include "corefens/scorer.h"

namespace corefens {

// Training targets over a kept set.
struct GoldAssignment {
  // 1 iff kept span i belongs to a gold cluster.
  std::vector<int> labels;
  // Indices into row i of the antecedent table (0 is the dummy) of the
  // correct antecedents. Falls back to {0} when i is not a gold mention or
  // none of its gold antecedents was kept.
  std::vector<std::vector<int>> antecedents;
};

GoldAssignment AssignGold(const Document &doc, const PrunedSpans &kept);

// -(1/|S|) sum_i [y log sigmoid(s_i) + (1 - y) log(1 - sigmoid(s_i))], with
// log arguments clamped at 1e-12. Zero for an empty kept set. Optionally
// writes dL/ds_i.
double DetectionLoss(std::span<const double> scores,
                     std::span<const int> labels,
                     std::vector<double> *d_scores = nullptr);

// -sum_i log sum_{j in GOLD(i)} P(j). Optionally writes dL/ds(i, j) for the
// real antecedents of every row (entry j - 1 of d_scores[i]).
double ClusteringLoss(const std::vector<AntecedentRow> &rows,
                      const GoldAssignment &gold,
                      std::vector<std::vector<double>> *d_scores = nullptr);

struct LossValue {
  double detect = 0.0;
  double cluster = 0.0;
  size_t kept = 0;

  double total() const { return detect + cluster; }
};

// Loss of one document, with its gradient accumulated into `grads` when
// given. The kept set comes from pruning under `prune`, unless `fixed_kept`
// supplies it.
LossValue ForwardBackward(const Document &doc, const ModelParams &params,
                          const PruneStrategy &prune, Gradients *grads,
                          const PrecomputedEmbeddings *precomputed = nullptr,
                          const std::vector<MentionSpan> *fixed_kept = nullptr);

// The kept set pruning produces for `doc`.
std::vector<MentionSpan> KeptSpans(const Document &doc,
                                   const ModelParams &params,
                                   const PruneStrategy &prune,
                                   const PrecomputedEmbeddings *precomputed =
                                       nullptr);

// KeptSpans plus every gold mention no longer than the span limit, in span
// order.
std::vector<MentionSpan> KeptSpansWithGold(
    const Document &doc, const ModelParams &params, const PruneStrategy &prune,
    const PrecomputedEmbeddings *precomputed = nullptr);

struct TrainConfig {
  // Encoder parameters use the lower rate, everything else the upper rate.
  double lower_lr = 1e-2;
  double upper_lr = 1e-1;
  // Rates tuned for large pretrained encoders, recorded for reference.
  static constexpr double kLargeEncoderLowerLr = 1e-5;
  static constexpr double kLargeEncoderUpperLr = 1e-4;

  int epochs = 25;
  int pretrain_epochs = 5;
  int finetune_epochs = 50;
  uint64_t seed = 1;
  PruneStrategy prune;
  // Global gradient-norm clip; 0 disables it.
  double clip_norm = 20.0;
  double init_scale = 0.1;
  // Dev scoring keeps predicted and gold singletons.
  bool emit_singletons = false;
  // Training steps add the gold mentions to the pruned set, so both losses
  // also see gold spans that pruning dropped. Inference is unaffected.
  bool gold_mentions_in_training = true;

  void Validate() const;
};

// params -= rate * grads, per group, then bumps the version counter.
// Throws NumericError naming the first block with a non-finite gradient.
void ApplyGradients(ModelParams &params, const Gradients &grads,
                    const TrainConfig &config);

// One gradient step on one document; returns the loss before the step.
// Trains on KeptSpansWithGold when config.gold_mentions_in_training is set.
LossValue Step(ModelParams &params, const Document &doc,
               const TrainConfig &config,
               const PrecomputedEmbeddings *precomputed = nullptr);

enum class RegimeKind { kBaseline, kContinued, kJoint, kWikiPretrain };

std::string RegimeName(RegimeKind kind);
RegimeKind ParseRegime(const std::string &name);

struct Regime {
  RegimeKind kind = RegimeKind::kBaseline;
  // Source corpus for continued/joint training, or the Wikipedia corpus
  // for pre-training. Unused by the baseline.
  const Corpus *source = nullptr;
  const Corpus *target = nullptr;
};

struct EpochRecord {
  int epoch = 0;
  std::string stage;
  double train_loss = 0.0;
  MetricReport dev;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> epochs;
  // Global epoch number of the selected checkpoint.
  int best_epoch = 0;
  double best_dev_avg = 0.0;

  // `epoch<TAB>train_loss<TAB>dev_MUC<TAB>dev_B3<TAB>dev_CEAF<TAB>dev_AVG`
  // lines, with a `# stage <name>` line before each stage.
  std::string Log() const;
};

// Trains `params` on `train` for `epochs` epochs, one document per step in a
// seeded order, and returns the epoch with the best dev AVG (earliest on
// ties). Epoch numbers in the records start at `first_epoch`.
TrainResult TrainStage(const ModelParams &init,
                       const std::vector<const Document *> &train,
                       const Corpus &dev, int epochs, uint64_t stage_seed,
                       const TrainConfig &config, const std::string &stage,
                       int first_epoch = 1,
                       const PrecomputedEmbeddings *precomputed = nullptr);

// Runs a full regime from freshly initialized parameters.
TrainResult Train(const Regime &regime, const Corpus &dev,
                  const ModelConfig &model, const TrainConfig &config,
                  const PrecomputedEmbeddings *precomputed = nullptr);

}  // namespace corefens

#endif  // COREFENS_TRAINING_H_
