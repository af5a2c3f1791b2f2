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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Arguments select criteria by number.

#include <fcntl.h>
#include <omp.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "corefens/checkpoint.h"
#include "corefens/cli.h"
#include "corefens/corpus.h"
#include "corefens/ensemble.h"
#include "corefens/ffnn.h"
#include "corefens/hungarian.h"
#include "corefens/metrics.h"
#include "corefens/rng.h"
#include "corefens/training.h"
#include "corefens/wiki.h"

namespace corefens {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Document RandomDocument(Rng &rng, int min_len, int max_len, int vocab) {
  const int n = min_len + static_cast<int>(rng.Below(max_len - min_len + 1));
  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) {
    words.push_back(fmt::format("t{}", rng.Below(vocab)));
  }
  // Random gold clusters over disjoint single tokens and pairs.
  std::vector<MentionSpan> spans;
  for (int s = 0; s < n;) {
    const int width = 1 + static_cast<int>(rng.Below(2));
    if (s + width <= n && rng.Unit() < 0.5) {
      spans.push_back({s, s + width - 1});
    }
    s += width;
  }
  rng.Shuffle(spans);
  Clustering clusters;
  const int k = 1 + static_cast<int>(rng.Below(3));
  clusters.resize(std::min<size_t>(k, spans.size()));
  for (size_t i = 0; i < spans.size() && !clusters.empty(); ++i) {
    clusters[i % clusters.size()].spans.push_back(spans[i]);
  }
  return Document::Make("doc", words, clusters);
}

ModelConfig SmallConfig() {
  ModelConfig c;
  c.embed_dim = 6;
  c.hash_buckets = 32;
  c.width_dim = 3;
  c.distance_dim = 3;
  c.hidden_dim = 10;
  c.max_span_width = 4;
  return c;
}

// ---------------------------------------------------------------------------
// 1. Analytic gradients against central finite differences.

Outcome GradientSuite() {
  const auto start = std::chrono::steady_clock::now();
  constexpr double kStep = 1e-4;
  constexpr double kTolerance = 1e-4;
  constexpr double kFloor = 1e-8;
  constexpr int kSeeds = 24;
  double worst = 0.0;
  std::string worst_at;
  size_t probes = 0;
  size_t kinks = 0;
  std::set<std::string> blocks_checked;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(Rng::Derive(seed, 100));
    const Document doc = RandomDocument(rng, 4, 8, 6);
    ModelConfig config = SmallConfig();
    config.hidden_layers = 1 + seed % 2;
    const ModelParams init = ModelParams::Initialize(config, seed, 0.5);
    ModelParams params = init;
    const PruneStrategy prune = PruneStrategy::TopLambda(0.6);
    // Odd seeds train on the pruned set plus gold mentions.
    const std::vector<MentionSpan> kept =
        seed % 2 == 0 ? KeptSpans(doc, params, prune)
                      : KeptSpansWithGold(doc, params, prune);
    Gradients grads = params.ZeroGradients();
    std::vector<uint8_t> pattern;
    {
      internal::ReluPatternRecorder recorder;
      ForwardBackward(doc, params, prune, &grads, nullptr, &kept);
      pattern = recorder.pattern();
    }
    auto loss_at = [&](std::vector<uint8_t> *relu) {
      internal::ReluPatternRecorder recorder;
      const double loss =
          ForwardBackward(doc, params, prune, nullptr, nullptr, &kept).total();
      *relu = recorder.pattern();
      return loss;
    };
    for (size_t b = 0; b < params.blocks().size(); ++b) {
      ParamBlock &block = params.block(static_cast<int>(b));
      blocks_checked.insert(block.name);
      for (size_t k = 0; k < block.values.size(); ++k) {
        const double original = block.values[k];
        std::vector<uint8_t> plus_pattern, minus_pattern;
        block.values[k] = original + kStep;
        const double plus = loss_at(&plus_pattern);
        block.values[k] = original - kStep;
        const double minus = loss_at(&minus_pattern);
        block.values[k] = original;
        ++probes;
        if (plus_pattern != pattern || minus_pattern != pattern) {
          ++kinks;
          continue;
        }
        const double numeric = (plus - minus) / (2 * kStep);
        const double analytic = grads[b][k];
        const double scale =
            std::max({std::abs(analytic), std::abs(numeric), kFloor});
        const double rel = std::abs(analytic - numeric) / scale;
        if (rel > worst) {
          worst = rel;
          worst_at = fmt::format("seed {} {}[{}]", seed, block.name, k);
        }
      }
    }
  }
  const double seconds = Seconds(start);
  Outcome out;
  out.pass = worst <= kTolerance && seconds < 60.0 && kinks * 100 < probes;
  out.detail = fmt::format(
      "{} seeds, {} blocks, {} probes ({} skipped at ReLU kinks), worst "
      "relative error {:.2e} at {} (limit {:.0e}), {:.1f}s (limit 60s)",
      kSeeds, blocks_checked.size(), probes, kinks, worst, worst_at,
      kTolerance, seconds);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Antecedent distributions are normalized and the dummy scores 0.

Outcome DistributionNormalization() {
  constexpr int kTablesPerSetting = 1000;
  size_t tables = 0;
  size_t rows = 0;
  double worst = 0.0;
  bool dummy_zero = true;
  bool finite = true;
  auto check = [&](const AntecedentTable &table) {
    for (const AntecedentRow &row : table.rows) {
      ++rows;
      if (row.scores.empty() || row.scores[0] != 0.0) dummy_zero = false;
      double sum = 0.0;
      for (double p : row.probs) {
        if (!std::isfinite(p) || p < 0.0) finite = false;
        sum += p;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  };

  // k = 0 stands for the single-model path.
  std::map<int, size_t> per_setting;
  for (int k : {0, 1, 2, 3, 5}) {
    Rng rng(Rng::Derive(2, k));
    int made = 0;
    for (int trial = 0; made < kTablesPerSetting; ++trial) {
      const Document doc = RandomDocument(rng, 2, 30, 12);
      const ModelConfig config = SmallConfig();
      // Large scales push scores far apart to stress the softmax.
      const double scale = trial % 4 == 0 ? 4.0 : 0.5;
      std::vector<ModelParams> models;
      for (int m = 0; m < std::max(k, 1); ++m) {
        models.push_back(ModelParams::Initialize(config, rng.Next(), scale));
      }
      const PruneStrategy prune =
          trial % 5 == 0 ? PruneStrategy::PositiveScore()
                         : PruneStrategy::TopLambda(0.2 + 0.8 * rng.Unit());
      AntecedentTable table;
      if (k == 0) {
        const SpanScorer scorer(doc, models[0], nullptr, Exec::kSerial);
        table = BuildAntecedentTable(scorer, prune, doc.size());
      } else {
        std::vector<std::unique_ptr<DocumentScores>> owned;
        std::vector<const DocumentScores *> sources;
        for (const ModelParams &m : models) {
          owned.push_back(ModelSource(m).Score(doc));
          sources.push_back(owned.back().get());
        }
        table =
            EnsembleDocument(doc, sources, prune, Combine::kMean, false).table;
      }
      if (table.rows.empty()) continue;
      check(table);
      ++made;
      ++tables;
    }
    per_setting[k] = made;
  }
  Outcome out;
  out.pass = worst <= 1e-9 && dummy_zero && finite;
  out.detail = fmt::format(
      "{} tables ({} single-model, {} each for k=1,2,3,5), {} rows, max "
      "|sum P - 1| = {:.2e} (limit 1e-9), dummy score exactly 0: {}, "
      "probabilities finite and non-negative: {}",
      tables, per_setting[0], kTablesPerSetting, rows, worst,
      dummy_zero ? "yes" : "no", finite ? "yes" : "no");
  return out;
}

// ---------------------------------------------------------------------------
// Shared fixture for 3 and 4: a 50-document synthetic test set and three
// trained checkpoints.

struct EnsembleFixture {
  SyntheticSplits data;
  std::vector<ModelParams> models;
  double train_seconds = 0.0;
};

const EnsembleFixture &GetEnsembleFixture() {
  static const EnsembleFixture fixture = [] {
    const auto start = std::chrono::steady_clock::now();
    EnsembleFixture f;
    f.data = GenerateSyntheticSplits(SyntheticConfig{}, 20, 5, 50, 7);
    for (uint64_t seed : {1, 2, 3}) {
      TrainConfig config;
      config.seed = seed;
      Regime regime;
      regime.target = &f.data.train;
      f.models.push_back(
          Train(regime, f.data.dev, ModelConfig{}, config).params);
    }
    f.train_seconds = Seconds(start);
    return f;
  }();
  return fixture;
}

std::string EnsembleConll(const Corpus &test,
                          const std::vector<const ModelParams *> &models,
                          Combine combine) {
  std::vector<ModelSource> sources;
  sources.reserve(models.size());
  for (const ModelParams *m : models) sources.emplace_back(*m);
  std::vector<const ScoreSource *> ptrs;
  for (const ModelSource &s : sources) ptrs.push_back(&s);
  EnsembleOptions options;
  options.combine = combine;
  return EnsembleCorpus(test, ptrs, options).predicted_conll;
}

// 3. k identical checkpoints reproduce the single model; order does not
// matter.

Outcome EnsembleIdentities() {
  const EnsembleFixture &f = GetEnsembleFixture();
  const Corpus &test = f.data.test;
  const std::string single = PredictionsToConll(
      test, PredictCorpus(test, f.models[0], InferenceOptions{}));
  std::vector<std::string> failures;
  for (int k : {1, 2, 3, 5}) {
    const std::vector<const ModelParams *> same(k, &f.models[0]);
    if (EnsembleConll(test, same, Combine::kMean) != single) {
      failures.push_back(fmt::format("k={} identical differs", k));
    }
  }
  int permutations = 0;
  for (Combine combine : {Combine::kMean, Combine::kOracle}) {
    std::vector<int> order = {0, 1, 2};
    std::string reference;
    do {
      const std::vector<const ModelParams *> models = {
          &f.models[order[0]], &f.models[order[1]], &f.models[order[2]]};
      const std::string conll = EnsembleConll(test, models, combine);
      if (reference.empty()) {
        reference = conll;
      } else if (conll != reference) {
        failures.push_back(fmt::format(
            "{} order {}{}{} differs", combine == Combine::kMean ? "mean"
                                                                 : "oracle",
            order[0], order[1], order[2]));
      }
      ++permutations;
    } while (std::next_permutation(order.begin(), order.end()));
  }
  Outcome out;
  out.pass = failures.empty();
  out.detail = fmt::format(
      "{} test docs; k=1,2,3,5 identical checkpoints byte-identical to the "
      "single-model CoNLL; {} permutations of 3 checkpoints (mean, oracle) "
      "byte-identical{}",
      test.size(), permutations,
      failures.empty() ? "" : "; failures: " + fmt::format("{}", fmt::join(failures, ", ")));
  return out;
}

// 4. Oracle combination dominates the mean decision by decision, and in AVG.

Outcome OracleDominance() {
  const auto start = std::chrono::steady_clock::now();
  const EnsembleFixture &f = GetEnsembleFixture();
  const Corpus &test = f.data.test;
  size_t decisions = 0;
  size_t violations = 0;
  for (const Document &doc : test.documents) {
    std::vector<std::unique_ptr<DocumentScores>> owned;
    std::vector<const DocumentScores *> sources;
    for (const ModelParams &m : f.models) {
      owned.push_back(ModelSource(m).Score(doc));
      sources.push_back(owned.back().get());
    }
    const std::map<MentionSpan, int> gold = ClusterIndex(doc.gold_clusters);
    // Mention decisions over every candidate.
    const std::vector<MentionSpan> &candidates = sources[0]->candidates();
    for (size_t c = 0; c < candidates.size(); ++c) {
      std::vector<double> scores;
      for (const DocumentScores *s : sources) {
        scores.push_back(s->mention_scores()[c]);
      }
      const bool is_gold = gold.count(candidates[c]) > 0;
      const double oracle = OracleCombineMention(scores, is_gold);
      const double mean = EnsembleMentionScore(scores);
      const double hi = *std::max_element(scores.begin(), scores.end());
      const double lo = *std::min_element(scores.begin(), scores.end());
      const bool ok = is_gold ? (oracle == hi && hi >= mean && mean >= lo)
                              : (oracle == lo && lo <= mean && mean <= hi);
      ++decisions;
      if (!ok) ++violations;
    }
    // Pair decisions over the kept set of the oracle ensemble, checked
    // against the scores the pipeline actually used.
    const EnsembleDocumentResult result = EnsembleDocument(
        doc, sources, PruneStrategy{}, Combine::kOracle, false);
    const PrunedSpans &kept = result.table.kept;
    for (size_t i = 1; i < kept.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
        std::vector<double> scores;
        for (const auto &pairs : result.source_pairs) {
          scores.push_back(pairs[PairOffset(static_cast<int>(i)) + j]);
        }
        auto gi = gold.find(kept.spans[i]);
        auto gj = gold.find(kept.spans[j]);
        const bool is_gold = gi != gold.end() && gj != gold.end() &&
                             gi->second == gj->second;
        const double used = result.table.rows[i].scores[j + 1];
        const double mean = std::accumulate(scores.begin(), scores.end(),
                                            0.0) /
                            scores.size();
        const double hi = *std::max_element(scores.begin(), scores.end());
        const double lo = *std::min_element(scores.begin(), scores.end());
        const bool ok =
            used == OracleCombinePairwise(scores, is_gold) &&
            (is_gold ? (used == hi && hi >= mean) : (used == lo && lo <= mean));
        ++decisions;
        if (!ok) ++violations;
      }
    }
  }
  auto avg = [&](Combine combine) {
    std::vector<ModelSource> sources(f.models.begin(), f.models.end());
    std::vector<const ScoreSource *> s;
    for (const ModelSource &m : sources) s.push_back(&m);
    EnsembleOptions options;
    options.combine = combine;
    return ScoreCorpus(test, EnsembleCorpus(test, s, options).predictions,
                       false)
        .avg_f1;
  };
  const double mean_avg = avg(Combine::kMean);
  const double oracle_avg = avg(Combine::kOracle);
  const double seconds = Seconds(start) + f.train_seconds;
  Outcome out;
  out.pass = violations == 0 && oracle_avg >= mean_avg && seconds < 120.0;
  out.detail = fmt::format(
      "{} decisions, {} dominance violations; oracle AVG {:.4f} >= mean AVG "
      "{:.4f}; {:.1f}s including training 3 checkpoints (limit 120s)",
      decisions, violations, oracle_avg, mean_avg, seconds);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Metrics against brute force and direct definitions.

Clustering RandomClustering(Rng &rng, const std::vector<MentionSpan> &pool,
                            int max_mentions, int max_clusters) {
  std::vector<MentionSpan> spans = pool;
  rng.Shuffle(spans);
  spans.resize(rng.Below(std::min<size_t>(max_mentions, spans.size()) + 1));
  if (spans.empty()) return {};
  const size_t k = 1 + rng.Below(std::min<size_t>(max_clusters, spans.size()));
  Clustering clusters(k);
  // Every cluster gets one mention, the rest go anywhere.
  for (size_t i = 0; i < spans.size(); ++i) {
    const size_t c = i < k ? i : rng.Below(k);
    clusters[c].spans.push_back(spans[i]);
  }
  CanonicalizeClusters(clusters);
  return clusters;
}

// Direct MUC definition: recall sums |K| - |p(K)| over key clusters, where
// p(K) is the partition of K by the response (unmatched mentions alone).
std::pair<double, double> DirectMucCounts(const Clustering &key,
                                          const Clustering &response) {
  std::map<MentionSpan, int> where;
  for (size_t c = 0; c < response.size(); ++c) {
    for (const MentionSpan &s : response[c].spans) where[s] = c;
  }
  double num = 0, den = 0;
  for (const Cluster &k : key) {
    std::set<int> parts;
    int alone = 0;
    for (const MentionSpan &s : k.spans) {
      auto it = where.find(s);
      if (it == where.end()) {
        ++alone;
      } else {
        parts.insert(it->second);
      }
    }
    num += static_cast<double>(k.spans.size()) - (parts.size() + alone);
    den += static_cast<double>(k.spans.size()) - 1;
  }
  return {num, den};
}

double DirectF1(double p, double r) {
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

Prf DirectMuc(const Clustering &gold, const Clustering &pred) {
  const auto [rn, rd] = DirectMucCounts(gold, pred);
  const auto [pn, pd] = DirectMucCounts(pred, gold);
  Prf prf;
  prf.recall = rd == 0 ? 0.0 : rn / rd;
  prf.precision = pd == 0 ? 0.0 : pn / pd;
  prf.f1 = DirectF1(prf.precision, prf.recall);
  return prf;
}

// B3: per mention of one side, |C(m) & C'(m)| / |C(m)|, averaged; mentions
// missing from the other side contribute 0.
double DirectBCubedSide(const Clustering &a, const Clustering &b) {
  std::map<MentionSpan, const Cluster *> in_b;
  for (const Cluster &c : b) {
    for (const MentionSpan &s : c.spans) in_b[s] = &c;
  }
  double total = 0;
  size_t mentions = 0;
  for (const Cluster &c : a) {
    for (const MentionSpan &s : c.spans) {
      ++mentions;
      auto it = in_b.find(s);
      if (it == in_b.end()) continue;
      size_t overlap = 0;
      for (const MentionSpan &t : c.spans) {
        const auto &other = it->second->spans;
        if (std::find(other.begin(), other.end(), t) != other.end()) ++overlap;
      }
      total += static_cast<double>(overlap) / c.spans.size();
    }
  }
  return mentions == 0 ? 0.0 : total / mentions;
}

Prf DirectBCubed(const Clustering &gold, const Clustering &pred) {
  Prf prf;
  prf.recall = DirectBCubedSide(gold, pred);
  prf.precision = DirectBCubedSide(pred, gold);
  prf.f1 = DirectF1(prf.precision, prf.recall);
  return prf;
}

// phi4 scaled to an integer: 2|K & R| / (|K| + |R|) times lcm(1..20).
int64_t ScaledPhi4(const Cluster &k, const Cluster &r) {
  constexpr int64_t kLcm = 232792560;
  size_t overlap = 0;
  for (const MentionSpan &s : k.spans) {
    if (std::find(r.spans.begin(), r.spans.end(), s) != r.spans.end()) {
      ++overlap;
    }
  }
  return 2 * static_cast<int64_t>(overlap) * kLcm /
         static_cast<int64_t>(k.spans.size() + r.spans.size());
}

// Best total over every injective map from the smaller side.
int64_t BruteForceCeaf(const Clustering &gold, const Clustering &pred) {
  const bool gold_small = gold.size() <= pred.size();
  const Clustering &small = gold_small ? gold : pred;
  const Clustering &large = gold_small ? pred : gold;
  std::vector<int> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  int64_t best = 0;
  do {
    int64_t total = 0;
    for (size_t i = 0; i < small.size(); ++i) {
      total += gold_small ? ScaledPhi4(small[i], large[perm[i]])
                          : ScaledPhi4(large[perm[i]], small[i]);
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome MetricOracles() {
  constexpr int kInstances = 2000;
  Rng rng(5);
  std::vector<MentionSpan> pool;
  for (int s = 0; s < 12; ++s) pool.push_back({s, s});
  int ceaf_mismatch = 0;
  double muc_worst = 0.0;
  double b3_worst = 0.0;
  for (int t = 0; t < kInstances; ++t) {
    const Clustering gold = RandomClustering(rng, pool, 10, 6);
    const Clustering pred = RandomClustering(rng, pool, 10, 6);
    if (!gold.empty() && !pred.empty()) {
      std::vector<std::vector<double>> sim(gold.size(),
                                           std::vector<double>(pred.size()));
      for (size_t i = 0; i < gold.size(); ++i) {
        for (size_t j = 0; j < pred.size(); ++j) {
          sim[i][j] = Phi4(gold[i], pred[j]);
        }
      }
      const std::vector<int> match = MaxWeightAssignment(sim);
      int64_t solver = 0;
      for (size_t i = 0; i < gold.size(); ++i) {
        if (match[i] >= 0) solver += ScaledPhi4(gold[i], pred[match[i]]);
      }
      if (solver != BruteForceCeaf(gold, pred)) ++ceaf_mismatch;
    }
    const Prf muc = Muc(gold, pred);
    const Prf direct_muc = DirectMuc(gold, pred);
    const Prf b3 = BCubed(gold, pred);
    const Prf direct_b3 = DirectBCubed(gold, pred);
    for (auto [a, b] : {std::pair{muc.precision, direct_muc.precision},
                        std::pair{muc.recall, direct_muc.recall},
                        std::pair{muc.f1, direct_muc.f1}}) {
      muc_worst = std::max(muc_worst, std::abs(a - b));
    }
    for (auto [a, b] : {std::pair{b3.precision, direct_b3.precision},
                        std::pair{b3.recall, direct_b3.recall},
                        std::pair{b3.f1, direct_b3.f1}}) {
      b3_worst = std::max(b3_worst, std::abs(a - b));
    }
  }

  auto c = [](std::initializer_list<int> tokens) {
    Cluster cluster;
    for (int t : tokens) cluster.spans.push_back({t, t});
    return cluster;
  };
  // a, b, c, d are tokens 0..3.
  const double hand_muc = Muc({c({0, 1, 2})}, {c({0, 1}), c({2})}).f1;
  const double hand_b3 = BCubed({c({0, 1}), c({2})}, {c({0, 1, 2})}).f1;
  const double hand_ceaf = CeafPhi4({c({0, 1}), c({2, 3})}, {c({0, 1, 2, 3})}).f1;
  const bool hand_ok = std::abs(hand_muc - 2.0 / 3.0) < 1e-12 &&
                       std::abs(hand_b3 - 5.0 / 7.0) < 1e-12 &&
                       std::abs(hand_ceaf - 4.0 / 9.0) < 1e-12;
  Outcome out;
  out.pass =
      ceaf_mismatch == 0 && muc_worst <= 1e-12 && b3_worst <= 1e-12 && hand_ok;
  out.detail = fmt::format(
      "{} instances: CEAF solver vs brute force {} mismatches (exact), MUC "
      "max diff {:.1e}, B3 max diff {:.1e} (limit 1e-12); hand examples MUC "
      "{:.6f} (2/3), B3 {:.6f} (5/7), CEAF {:.6f} (4/9)",
      kInstances, ceaf_mismatch, muc_worst, b3_worst, hand_muc, hand_b3,
      hand_ceaf);
  return out;
}

// ---------------------------------------------------------------------------
// 6. Baseline learns the synthetic task on one core.

Outcome EndToEndLearning() {
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto start = std::chrono::steady_clock::now();
  const SyntheticSplits data =
      GenerateSyntheticSplits(SyntheticConfig{}, 20, 5, 10, 1);
  TrainConfig config;
  config.seed = 1;
  Regime regime;
  regime.target = &data.train;
  const TrainResult result = Train(regime, data.dev, ModelConfig{}, config);
  const double avg =
      ScoreCorpus(data.test,
                  PredictCorpus(data.test, result.params, {config.prune, false}),
                  false)
          .avg_f1;
  const double seconds = Seconds(start);
  omp_set_num_threads(threads);
  Outcome out;
  out.pass = avg >= 0.90 && config.epochs <= 25 && seconds < 300.0;
  out.detail = fmt::format(
      "20/5/10 docs, seed 1, {} epochs (best {}), test AVG {:.4f} (need "
      ">= 0.90), {:.1f}s on 1 thread (limit 300s)",
      config.epochs, result.best_epoch, avg, seconds);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Transfer from a 100-document source helps a 10-document target.

Outcome TransferDirectionality() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> base, continued, joint;
  std::string per_seed;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const SyntheticSplits target =
        GenerateSyntheticSplits(SyntheticConfig{}, 10, 5, 10, seed);
    SyntheticConfig source_config;
    source_config.num_docs = 100;
    source_config.filler_prefix = "v";
    source_config.id_prefix = "src";
    source_config.language = "src";
    const Corpus source =
        GenerateSynthetic(source_config, Rng::Derive(seed, 3), Split::kTrain);
    TrainConfig config;
    config.seed = seed;
    double avg[3];
    const RegimeKind kinds[3] = {RegimeKind::kBaseline, RegimeKind::kContinued,
                                 RegimeKind::kJoint};
    for (int k = 0; k < 3; ++k) {
      Regime regime;
      regime.kind = kinds[k];
      regime.target = &target.train;
      regime.source = &source;
      const TrainResult r = Train(regime, target.dev, ModelConfig{}, config);
      avg[k] = ScoreCorpus(target.test,
                           PredictCorpus(target.test, r.params,
                                         {config.prune, false}),
                           false)
                   .avg_f1;
    }
    base.push_back(avg[0]);
    continued.push_back(avg[1]);
    joint.push_back(avg[2]);
    per_seed += fmt::format(" {:.3f}/{:.3f}/{:.3f}", avg[0], avg[1], avg[2]);
  }
  const double seconds = Seconds(start);
  const double mb = Median(base), mc = Median(continued), mj = Median(joint);
  Outcome out;
  out.pass = mc >= mb && mj >= mb && seconds < 900.0;
  out.detail = fmt::format(
      "median test AVG over 5 seeds: baseline {:.4f}, continued {:.4f}, "
      "joint {:.4f}; per seed base/cont/joint{}; {:.0f}s (limit 900s)",
      mb, mc, mj, per_seed, seconds);
  return out;
}

// ---------------------------------------------------------------------------
// 8. Wikipedia builder on a fixed fixture.

std::string SortedConll(const fs::path &dir) {
  Corpus all;
  for (const char *name : {"train.conll", "dev.conll", "test.conll"}) {
    Corpus part = ReadConllFile((dir / name).string());
    for (Document &d : part.documents) all.documents.push_back(std::move(d));
  }
  std::sort(all.documents.begin(), all.documents.end(),
            [](const Document &a, const Document &b) { return a.id < b.id; });
  return EmitConll(all);
}

std::map<std::string, std::string> ReadDir(const fs::path &dir) {
  std::map<std::string, std::string> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[entry.path().filename().string()] =
          ReadTextFile(entry.path().string());
    }
  }
  return files;
}

Outcome WikiBuilder(const fs::path &work) {
  const fs::path data = fs::path(COREFENS_TEST_DATA_DIR) / "wiki";
  WikiCorpusSpec spec;
  spec.dev_docs = 1;
  spec.test_docs = 1;
  const fs::path first = work / "wiki_a";
  const fs::path second = work / "wiki_b";
  const WikiStats stats =
      StreamBuild((data / "articles.tsv").string(), spec, first.string());
  StreamBuild((data / "articles.tsv").string(), spec, second.string());
  const bool matches_expected =
      SortedConll(first) == ReadTextFile((data / "expected.conll").string());
  const bool rerun_identical = ReadDir(first) == ReadDir(second);

  // Two mentions share a cluster iff their anchors name the same article.
  size_t pairs = 0;
  size_t violations = 0;
  std::string records = ReadTextFile((data / "articles.tsv").string());
  for (size_t pos = 0; pos < records.size();) {
    const size_t nl = records.find('\n', pos);
    const std::string line = records.substr(pos, nl - pos);
    pos = nl + 1;
    const size_t tab = line.find('\t');
    const WikiArticle article{line.substr(0, tab), line.substr(tab + 1)};
    const BuiltDocument built = BuildDocument(article, spec);
    const ParsedWikitext parsed = ParseWikitextLinks(article.body, spec);
    const std::vector<TextToken> tokens = Tokenize(parsed.text);
    std::map<MentionSpan, std::string> target_of;
    for (const RawAnchor &a : parsed.anchors) {
      int first_token = -1, last_token = -1;
      for (size_t t = 0; t < tokens.size(); ++t) {
        if (tokens[t].begin == a.begin) first_token = static_cast<int>(t);
        if (tokens[t].end == a.end) last_token = static_cast<int>(t);
      }
      std::string target = *NormalizeTarget(a.target, spec);
      if (target.empty()) target = *NormalizeTarget(article.title, spec);
      target_of[{first_token, last_token}] = target;
    }
    const std::map<MentionSpan, int> cluster_of =
        ClusterIndex(built.document.gold_clusters);
    if (cluster_of.size() != target_of.size()) ++violations;
    for (const auto &[a, ca] : cluster_of) {
      for (const auto &[b, cb] : cluster_of) {
        if (!(a < b)) continue;
        ++pairs;
        if (!target_of.count(a) || !target_of.count(b) ||
            (ca == cb) != (target_of[a] == target_of[b])) {
          ++violations;
        }
      }
    }
  }
  Outcome out;
  out.pass = matches_expected && stats.kept == 5 && rerun_identical &&
             violations == 0;
  out.detail = fmt::format(
      "6 articles: output {} expected CoNLL, kept={} (need 5), rerun "
      "byte-identical: {}, {} mention pairs checked for same-cluster iff "
      "same-target, {} violations",
      matches_expected ? "matches" : "differs from", stats.kept,
      rerun_identical ? "yes" : "no", pairs, violations);
  return out;
}

// ---------------------------------------------------------------------------
// 9. Every CLI command is reproducible byte for byte.

// Sends the CLI's reports on standard output to /dev/null while alive.
class QuietStdout {
 public:
  QuietStdout() {
    std::fflush(stdout);
    saved_ = dup(STDOUT_FILENO);
    const int null = open("/dev/null", O_WRONLY);
    dup2(null, STDOUT_FILENO);
    close(null);
  }
  ~QuietStdout() {
    std::fflush(stdout);
    dup2(saved_, STDOUT_FILENO);
    close(saved_);
  }

 private:
  int saved_;
};

int RunQuiet(const std::vector<std::string> &args) {
  QuietStdout quiet;
  return RunMain(args);
}

Outcome Reproducibility(const fs::path &work) {
  const fs::path data = fs::path(COREFENS_TEST_DATA_DIR) / "wiki";
  const std::string w = work.string();
  struct Command {
    std::string name;
    std::vector<std::string> args;
  };
  const std::vector<Command> commands = {
      {"synth", {"synth-gen"}},
      {"source",
       {"synth-gen", "--train-docs", "30", "--dev-docs", "1", "--test-docs",
        "1", "--filler-prefix", "v", "--id-prefix", "src"}},
      {"wiki",
       {"build-wiki", "--input", (data / "articles.tsv").string(),
        "--dev-docs", "1", "--test-docs", "1"}},
      {"base",
       {"train", "--train", w + "/synth/train.conll", "--dev",
        w + "/synth/dev.conll", "--epochs", "6"}},
      {"cont",
       {"train", "--regime", "continued", "--source",
        w + "/source/train.conll", "--train", w + "/synth/train.conll",
        "--dev", w + "/synth/dev.conll", "--epochs", "3"}},
      {"joint",
       {"train", "--regime", "joint", "--source", w + "/source/train.conll",
        "--train", w + "/synth/train.conll", "--dev", w + "/synth/dev.conll",
        "--epochs", "3", "--seed", "5"}},
      {"wikipre",
       {"train", "--regime", "wiki-pretrain", "--source",
        w + "/wiki/train.conll", "--train", w + "/synth/train.conll", "--dev",
        w + "/synth/dev.conll", "--pretrain-epochs", "2", "--finetune-epochs",
        "2"}},
      {"eval",
       {"evaluate", "--checkpoint", w + "/base/model.ckpt", "--test",
        w + "/synth/test.conll"}},
      {"ens",
       {"evaluate", "--checkpoint", w + "/base/model.ckpt", "--checkpoint",
        w + "/cont/model.ckpt", "--checkpoint", w + "/joint/model.ckpt",
        "--ensemble", "oracle", "--dump-scores", "--test",
        w + "/synth/test.conll"}},
      {"dumps",
       {"evaluate", "--scores", w + "/ens/scores_0.tsv", "--scores",
        w + "/ens/scores_1.tsv", "--scores", w + "/ens/scores_2.tsv",
        "--ensemble", "oracle", "--test", w + "/synth/test.conll"}},
      {"score",
       {"score", "--gold", w + "/synth/test.conll", "--pred",
        w + "/eval/predicted.conll"}},
  };
  std::vector<std::string> failures;
  size_t files = 0;
  for (const Command &command : commands) {
    const fs::path out = work / command.name;
    std::map<std::string, std::string> runs[2];
    for (int run = 0; run < 2; ++run) {
      fs::remove_all(out);
      std::vector<std::string> args = {"corefens", "--out", out.string(),
                                       "--log-level", "error"};
      args.insert(args.end(), command.args.begin(), command.args.end());
      const int code = RunQuiet(args);
      if (code != kExitOk) {
        failures.push_back(fmt::format("{} exited {}", command.name, code));
        break;
      }
      runs[run] = ReadDir(out);
    }
    if (runs[0] != runs[1]) {
      failures.push_back(command.name + " outputs differ");
    }
    files += runs[1].size();
  }
  // Thread count does not change a checkpoint either.
  const int threads = omp_get_max_threads();
  if (failures.empty()) {
    std::string checkpoints[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = work / fmt::format("base_jobs_{}", k);
      std::vector<std::string> args = {"corefens",    "--out", out.string(),
                                       "--log-level", "error", "--jobs",
                                       k == 0 ? "1" : "4"};
      args.insert(args.end(), commands[3].args.begin(),
                  commands[3].args.end());
      RunQuiet(args);
      checkpoints[k] = ReadTextFile((out / "model.ckpt").string());
    }
    omp_set_num_threads(threads);
    if (checkpoints[0] != checkpoints[1] ||
        checkpoints[0] != ReadTextFile((work / "base" / "model.ckpt").string())) {
      failures.push_back("checkpoint depends on thread count");
    }
  }
  // The echoed config replays the run.
  if (failures.empty()) {
    const fs::path out = work / "base_replay";
    RunQuiet({"corefens", "--config",
              (work / "base" / "effective_config.ini").string(), "--out",
              out.string(), "--log-level", "error", "train"});
    if (ReadTextFile((out / "model.ckpt").string()) !=
        ReadTextFile((work / "base" / "model.ckpt").string())) {
      failures.push_back("effective_config.ini replay differs");
    }
  }
  Outcome out;
  out.pass = failures.empty();
  out.detail = fmt::format(
      "{} commands (synth-gen x2, build-wiki, train x4 regimes, evaluate "
      "single/oracle+dump/from dumps, score) each run twice: {} output files "
      "compared; --jobs 1 vs 4 checkpoints and config replay compared{}",
      commands.size(), files,
      failures.empty() ? ", all byte-identical"
                       : "; failures: " + fmt::format("{}", fmt::join(failures, ", ")));
  return out;
}

}  // namespace
}  // namespace corefens

int main(int argc, char **argv) {
  using namespace corefens;
  spdlog::set_level(spdlog::level::warn);
  const fs::path work =
      fs::temp_directory_path() / fmt::format("corefens_acceptance_{}", getpid());
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>>
      criteria = {
          {"gradient check", GradientSuite},
          {"distribution normalization", DistributionNormalization},
          {"ensemble identities", EnsembleIdentities},
          {"oracle dominance", OracleDominance},
          {"metric oracles", MetricOracles},
          {"end-to-end learning", EndToEndLearning},
          {"transfer directionality", TransferDirectionality},
          {"wikipedia builder", [&] { return WikiBuilder(work); }},
          {"reproducibility", [&] { return Reproducibility(work); }},
      };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", outcome.pass ? "PASS" : "FAIL",
                number, criteria[i].first.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
