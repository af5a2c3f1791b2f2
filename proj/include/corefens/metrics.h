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

// Coreference scorer: MUC, B-cubed, CEAF-phi4 and their average.
//
// Mentions are identified by exact (start, end) match. A mention missing
// from the other side contributes nothing to that side's numerators, as in
// the CoNLL reference scorer. Corpus scores pool numerators and
// denominators over documents.

#ifndef COREFENS_METRICS_H_
#define COREFENS_METRICS_H_

#include <map>
#include <string>
#include <vector>

#include "corefens/corpus.h"

namespace corefens {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // A denominator was zero; the affected value is reported as 0 (or 1 for
  // CEAF with both sides empty).
  bool degenerate = false;
};

struct MetricReport {
  Prf muc;
  Prf b3;
  Prf ceaf;
  double avg_f1 = 0.0;

  // Aligned text table.
  std::string ToTable() const;
  // `muc.precision 0.5000` style lines, 4 decimals.
  std::string ToKeyValue() const;
};

double HarmonicF1(double precision, double recall);

// Raw counts of one or more documents; pooled by addition.
struct MetricCounts {
  double muc_recall_num = 0, muc_recall_den = 0;
  double muc_precision_num = 0, muc_precision_den = 0;
  double b3_recall_num = 0, b3_recall_den = 0;
  double b3_precision_num = 0, b3_precision_den = 0;
  double ceaf_similarity = 0;
  double ceaf_gold_clusters = 0, ceaf_pred_clusters = 0;

  MetricCounts &operator+=(const MetricCounts &other);
  MetricReport Report() const;
};

MetricCounts CountMuc(const Clustering &gold, const Clustering &pred);
MetricCounts CountBCubed(const Clustering &gold, const Clustering &pred);
MetricCounts CountCeafPhi4(const Clustering &gold, const Clustering &pred);
MetricCounts CountAll(const Clustering &gold, const Clustering &pred);

Prf Muc(const Clustering &gold, const Clustering &pred);
Prf BCubed(const Clustering &gold, const Clustering &pred);
Prf CeafPhi4(const Clustering &gold, const Clustering &pred);

// phi4(K, R) = 2 |K n R| / (|K| + |R|).
double Phi4(const Cluster &key, const Cluster &response);

double AvgF1(const MetricReport &report);

MetricReport ScoreDocument(const Clustering &gold, const Clustering &pred,
                           bool emit_singletons);

// `predictions` maps document id to predicted clusters. Throws DataError on
// a document id that has no counterpart on the other side.
MetricReport ScoreCorpus(const Corpus &gold,
                         const std::map<std::string, Clustering> &predictions,
                         bool emit_singletons);

}  // namespace corefens

#endif  // COREFENS_METRICS_H_
