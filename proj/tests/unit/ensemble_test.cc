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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "corefens/ensemble.h"
#include "corefens/errors.h"
#include "corefens/training.h"

namespace corefens {
namespace {

AntecedentTable Table(std::vector<MentionSpan> spans,
                      std::vector<double> mention_scores,
                      std::vector<std::vector<double>> pair_rows) {
  AntecedentTable t;
  t.kept.spans = std::move(spans);
  t.kept.scores = std::move(mention_scores);
  for (size_t i = 0; i < t.kept.spans.size(); ++i) {
    t.kept.candidates.push_back(static_cast<int>(i));
  }
  for (const auto &row : pair_rows) t.rows.push_back(MakeAntecedentRow(row));
  return t;
}

TEST_CASE("Mean mention score") {
  CHECK(EnsembleMentionScore(std::vector<double>{1.0, 2.0, 6.0}) == 3.0);
  CHECK(EnsembleMentionScore(std::vector<double>{0.1, 0.1, 0.1}) == 0.1);
  CHECK_THROWS_AS(EnsembleMentionScore(std::vector<double>{}), DataError);
  CHECK_THROWS_AS(
      EnsembleMentionScore(std::vector<double>{
          1.0, std::numeric_limits<double>::infinity()}),
      DataError);
}

TEST_CASE("Ensembled antecedent distribution") {
  const AntecedentRow row =
      EnsembleAntecedentDistribution({{1.0, -2.0}, {3.0, 0.0}});
  CHECK(row.scores == std::vector<double>{0.0, 2.0, -1.0});
  double sum = 0;
  for (double p : row.probs) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(EnsembleAntecedentDistribution({{1.0}, {1.0, 2.0}}),
                  DataError);
}

TEST_CASE("Oracle combination") {
  const std::vector<double> s = {-1.0, 2.0, 0.5};
  CHECK(OracleCombineMention(s, true) == 2.0);
  CHECK(OracleCombineMention(s, false) == -1.0);
  CHECK(OracleCombinePairwise(s, true) == 2.0);
  CHECK(OracleCombinePairwise(s, false) == -1.0);
  CHECK_THROWS_AS(OracleCombineMention(s, std::nullopt), DataError);
}

TEST_CASE("Decoding links to the best antecedent") {
  // Span 1 prefers span 0; span 2 prefers the dummy; span 3 ties between
  // spans 0 and 2 and takes the earlier one.
  const AntecedentTable t = Table({{0, 0}, {1, 1}, {2, 2}, {3, 3}},
                                  {1.0, 1.0, 1.0, -1.0},
                                  {{}, {2.0}, {-1.0, -3.0}, {4.0, 1.0, 4.0}});
  const DecodedClusters d = DecodeClusters(t, false);
  CHECK(d.antecedent == std::vector<int>{-1, 0, -1, 0});
  REQUIRE(d.clusters.size() == 1);
  CHECK(d.clusters[0].spans ==
        std::vector<MentionSpan>{{0, 0}, {1, 1}, {3, 3}});
  const DecodedClusters with = DecodeClusters(t, true);
  CHECK(with.clusters.size() == 2);
  // Ties with the dummy stay unlinked.
  const DecodedClusters tie =
      DecodeClusters(Table({{0, 0}, {1, 1}}, {1, 1}, {{}, {0.0}}), false);
  CHECK(tie.clusters.empty());
}

struct Fixture {
  SyntheticSplits data = GenerateSyntheticSplits(SyntheticConfig{}, 2, 1, 3, 4);
  ModelConfig config;
  std::vector<ModelParams> models;
  Fixture() {
    config.embed_dim = 8;
    config.hidden_dim = 8;
    config.hash_buckets = 128;
    for (uint64_t seed : {1, 2}) {
      models.push_back(ModelParams::Initialize(config, seed, 0.3));
    }
  }
};

TEST_CASE("Single-model predictions match a one-member ensemble") {
  Fixture f;
  const auto single =
      PredictCorpus(f.data.test, f.models[0], InferenceOptions{});
  const ModelSource source(f.models[0]);
  const ScoreSource *sources[] = {&source};
  const EnsembleCorpusResult r =
      EnsembleCorpus(f.data.test, sources, EnsembleOptions{});
  CHECK(r.predictions == single);
  CHECK(r.predicted_conll == PredictionsToConll(f.data.test, single));
  CHECK(r.cluster_table == PredictionsToTable(f.data.test, single));
}

TEST_CASE("Score dumps replay the ensemble") {
  Fixture f;
  const ModelSource a(f.models[0]), b(f.models[1]);
  const ScoreSource *sources[] = {&a, &b};
  EnsembleOptions options;
  options.dump_scores = true;
  const EnsembleCorpusResult live = EnsembleCorpus(f.data.test, sources, options);
  REQUIRE(live.dumps.size() == 2);
  const ScoreDump da = ScoreDump::Parse(live.dumps[0]);
  const ScoreDump db = ScoreDump::Parse(live.dumps[1]);
  CHECK(da.entries().size() == f.data.test.size());
  const ScoreSource *replay[] = {&da, &db};
  const EnsembleCorpusResult again =
      EnsembleCorpus(f.data.test, replay, EnsembleOptions{});
  CHECK(again.predicted_conll == live.predicted_conll);

  // A dump only answers for documents it contains.
  const Corpus other = GenerateSynthetic(SyntheticConfig{}, 99);
  CHECK_THROWS_AS(EnsembleCorpus(other, replay, EnsembleOptions{}), DataError);
  CHECK_THROWS_AS(ScoreDump::Parse("#doc\tx\n"), DataError);
}

TEST_CASE("Sources with different span limits are rejected") {
  Fixture f;
  ModelConfig shorter = f.config;
  shorter.max_span_width = 3;
  const ModelParams other = ModelParams::Initialize(shorter, 1, 0.3);
  const ModelSource a(f.models[0]), b(other);
  const ScoreSource *sources[] = {&a, &b};
  CHECK_THROWS_AS(EnsembleCorpus(f.data.test, sources, EnsembleOptions{}),
                  DataError);
}

TEST_CASE("Oracle ensemble needs and uses gold labels") {
  Fixture f;
  const ModelSource a(f.models[0]), b(f.models[1]);
  const ScoreSource *sources[] = {&a, &b};
  EnsembleOptions mean, oracle;
  oracle.combine = Combine::kOracle;
  const double mean_avg =
      ScoreCorpus(f.data.test,
                  EnsembleCorpus(f.data.test, sources, mean).predictions, false)
          .avg_f1;
  const double oracle_avg =
      ScoreCorpus(f.data.test,
                  EnsembleCorpus(f.data.test, sources, oracle).predictions,
                  false)
          .avg_f1;
  CHECK(oracle_avg >= mean_avg);
}

}  // namespace
}  // namespace corefens
