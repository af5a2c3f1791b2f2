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

#include "corefens/metrics.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "corefens/errors.h"
#include "corefens/hungarian.h"

namespace corefens {

double HarmonicF1(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricCounts &MetricCounts::operator+=(const MetricCounts &o) {
  muc_recall_num += o.muc_recall_num;
  muc_recall_den += o.muc_recall_den;
  muc_precision_num += o.muc_precision_num;
  muc_precision_den += o.muc_precision_den;
  b3_recall_num += o.b3_recall_num;
  b3_recall_den += o.b3_recall_den;
  b3_precision_num += o.b3_precision_num;
  b3_precision_den += o.b3_precision_den;
  ceaf_similarity += o.ceaf_similarity;
  ceaf_gold_clusters += o.ceaf_gold_clusters;
  ceaf_pred_clusters += o.ceaf_pred_clusters;
  return *this;
}

namespace {

Prf Ratio(double p_num, double p_den, double r_num, double r_den) {
  Prf out;
  if (p_den > 0) {
    out.precision = p_num / p_den;
  } else {
    out.degenerate = true;
  }
  if (r_den > 0) {
    out.recall = r_num / r_den;
  } else {
    out.degenerate = true;
  }
  out.f1 = HarmonicF1(out.precision, out.recall);
  return out;
}

// Number of parts `cluster` is split into by `other`; mentions absent from
// `other` are parts of their own.
int Partitions(const Cluster &cluster,
               const std::map<MentionSpan, int> &other_index) {
  std::set<int> parts;
  int missing = 0;
  for (const MentionSpan &m : cluster.spans) {
    auto it = other_index.find(m);
    if (it == other_index.end()) {
      ++missing;
    } else {
      parts.insert(it->second);
    }
  }
  return static_cast<int>(parts.size()) + missing;
}

void MucSide(const Clustering &key, const Clustering &response, double *num,
             double *den) {
  const auto index = ClusterIndex(response);
  for (const Cluster &cluster : key) {
    const double size = static_cast<double>(cluster.size());
    *num += size - Partitions(cluster, index);
    *den += size - 1.0;
  }
}

void BCubedSide(const Clustering &key, const Clustering &response,
                double *num, double *den) {
  const auto index = ClusterIndex(response);
  for (const Cluster &cluster : key) {
    // Overlap of this key cluster with each response cluster.
    std::map<int, int> overlap;
    for (const MentionSpan &m : cluster.spans) {
      auto it = index.find(m);
      if (it != index.end()) ++overlap[it->second];
    }
    const double size = static_cast<double>(cluster.size());
    for (const MentionSpan &m : cluster.spans) {
      auto it = index.find(m);
      if (it != index.end()) *num += overlap[it->second] / size;
    }
    *den += size;
  }
}

}  // namespace

double Phi4(const Cluster &key, const Cluster &response) {
  if (!std::is_sorted(key.spans.begin(), key.spans.end()) ||
      !std::is_sorted(response.spans.begin(), response.spans.end())) {
    Cluster k = key, r = response;
    std::sort(k.spans.begin(), k.spans.end());
    std::sort(r.spans.begin(), r.spans.end());
    return Phi4(k, r);
  }
  int common = 0;
  size_t i = 0, j = 0;
  while (i < key.spans.size() && j < response.spans.size()) {
    if (key.spans[i] == response.spans[j]) {
      ++common;
      ++i;
      ++j;
    } else if (key.spans[i] < response.spans[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * common / static_cast<double>(key.size() + response.size());
}

MetricCounts CountMuc(const Clustering &gold, const Clustering &pred) {
  MetricCounts c;
  MucSide(gold, pred, &c.muc_recall_num, &c.muc_recall_den);
  MucSide(pred, gold, &c.muc_precision_num, &c.muc_precision_den);
  return c;
}

MetricCounts CountBCubed(const Clustering &gold, const Clustering &pred) {
  MetricCounts c;
  BCubedSide(gold, pred, &c.b3_recall_num, &c.b3_recall_den);
  BCubedSide(pred, gold, &c.b3_precision_num, &c.b3_precision_den);
  return c;
}

MetricCounts CountCeafPhi4(const Clustering &gold, const Clustering &pred) {
  MetricCounts c;
  c.ceaf_gold_clusters = static_cast<double>(gold.size());
  c.ceaf_pred_clusters = static_cast<double>(pred.size());
  if (gold.empty() || pred.empty()) return c;
  std::vector<std::vector<double>> sim(gold.size(),
                                       std::vector<double>(pred.size()));
  for (size_t i = 0; i < gold.size(); ++i) {
    for (size_t j = 0; j < pred.size(); ++j) sim[i][j] = Phi4(gold[i], pred[j]);
  }
  const std::vector<int> match = MaxWeightAssignment(sim);
  for (size_t i = 0; i < gold.size(); ++i) {
    if (match[i] >= 0) c.ceaf_similarity += sim[i][match[i]];
  }
  return c;
}

MetricCounts CountAll(const Clustering &gold, const Clustering &pred) {
  MetricCounts c = CountMuc(gold, pred);
  c += CountBCubed(gold, pred);
  c += CountCeafPhi4(gold, pred);
  return c;
}

MetricReport MetricCounts::Report() const {
  MetricReport r;
  r.muc = Ratio(muc_precision_num, muc_precision_den, muc_recall_num,
                muc_recall_den);
  r.b3 = Ratio(b3_precision_num, b3_precision_den, b3_recall_num,
               b3_recall_den);
  if (ceaf_gold_clusters == 0 && ceaf_pred_clusters == 0) {
    r.ceaf = Prf{1.0, 1.0, 1.0, true};
  } else {
    r.ceaf = Ratio(ceaf_similarity, ceaf_pred_clusters, ceaf_similarity,
                   ceaf_gold_clusters);
  }
  r.avg_f1 = AvgF1(r);
  return r;
}

Prf Muc(const Clustering &gold, const Clustering &pred) {
  return CountMuc(gold, pred).Report().muc;
}

Prf BCubed(const Clustering &gold, const Clustering &pred) {
  return CountBCubed(gold, pred).Report().b3;
}

Prf CeafPhi4(const Clustering &gold, const Clustering &pred) {
  return CountCeafPhi4(gold, pred).Report().ceaf;
}

double AvgF1(const MetricReport &report) {
  return (report.muc.f1 + report.b3.f1 + report.ceaf.f1) / 3.0;
}

MetricReport ScoreDocument(const Clustering &gold, const Clustering &pred,
                           bool emit_singletons) {
  if (emit_singletons) return CountAll(gold, pred).Report();
  return CountAll(WithoutSingletons(gold), WithoutSingletons(pred)).Report();
}

MetricReport ScoreCorpus(const Corpus &gold,
                         const std::map<std::string, Clustering> &predictions,
                         bool emit_singletons) {
  for (const auto &[id, clusters] : predictions) {
    if (gold.Find(id) == nullptr) {
      throw DataError("predicted document " + id + " has no gold document");
    }
  }
  // Per-document counts, then pooled in corpus order.
  std::vector<MetricCounts> counts(gold.size());
  std::vector<const Clustering *> preds(gold.size());
  for (size_t d = 0; d < gold.size(); ++d) {
    auto it = predictions.find(gold.documents[d].id);
    if (it == predictions.end()) {
      throw DataError("no prediction for document " + gold.documents[d].id);
    }
    preds[d] = &it->second;
  }
#pragma omp parallel for schedule(dynamic)
  for (long d = 0; d < static_cast<long>(gold.size()); ++d) {
    const Clustering &g = gold.documents[d].gold_clusters;
    const Clustering &p = *preds[d];
    counts[d] = emit_singletons
                    ? CountAll(g, p)
                    : CountAll(WithoutSingletons(g), WithoutSingletons(p));
  }
  MetricCounts total;
  for (const MetricCounts &c : counts) total += c;
  return total.Report();
}

std::string MetricReport::ToTable() const {
  std::string out = fmt::format("{:<10}{:>10}{:>10}{:>10}\n", "metric",
                                "precision", "recall", "f1");
  auto line = [&](const char *name, const Prf &m) {
    out += fmt::format("{:<10}{:>10.4f}{:>10.4f}{:>10.4f}{}\n", name,
                       m.precision, m.recall, m.f1,
                       m.degenerate ? "  (degenerate)" : "");
  };
  line("MUC", muc);
  line("B3", b3);
  line("CEAF_phi4", ceaf);
  out += fmt::format("{:<10}{:>30.4f}\n", "AVG", avg_f1);
  return out;
}

std::string MetricReport::ToKeyValue() const {
  std::string out;
  auto emit = [&](const char *name, const Prf &m) {
    out += fmt::format("{}.precision {:.4f}\n", name, m.precision);
    out += fmt::format("{}.recall {:.4f}\n", name, m.recall);
    out += fmt::format("{}.f1 {:.4f}\n", name, m.f1);
  };
  emit("muc", muc);
  emit("b3", b3);
  emit("ceaf_phi4", ceaf);
  out += fmt::format("avg_f1 {:.4f}\n", avg_f1);
  return out;
}

}  // namespace corefens
