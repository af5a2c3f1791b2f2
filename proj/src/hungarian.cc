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

#include "corefens/hungarian.h"

#include <algorithm>
#include <limits>

namespace corefens {

std::vector<int> MaxWeightAssignment(
    const std::vector<std::vector<double>> &similarity) {
  const int rows = static_cast<int>(similarity.size());
  int cols = 0;
  for (const auto &r : similarity) cols = std::max(cols, static_cast<int>(r.size()));
  const int n = std::max(rows, cols);
  if (n == 0) return {};

  // Minimize cost = top - similarity on the padded square; padding costs
  // `top`, i.e. similarity 0.
  double top = 0.0;
  for (const auto &r : similarity) {
    for (double v : r) top = std::max(top, v);
  }
  auto cost = [&](int i, int j) {
    if (i < rows && j < static_cast<int>(similarity[i].size())) {
      return top - similarity[i][j];
    }
    return top;
  };

  // 1-based potentials; match_col[j] = row assigned to column j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match_col[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match_col[j] - 1;
    if (i >= 0 && i < rows && j - 1 < static_cast<int>(similarity[i].size())) {
      assignment[i] = j - 1;
    }
  }
  return assignment;
}

}  // namespace corefens
