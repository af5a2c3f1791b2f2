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

#ifndef COREFENS_HUNGARIAN_H_
#define COREFENS_HUNGARIAN_H_

#include <vector>

namespace corefens {

// Maximum-weight one-to-one assignment on a rows x cols similarity matrix
// (Hungarian method with row/column potentials, O(n^3) on the padded
// square matrix). Returns, for each row, the matched column or -1 when the
// row is matched to padding.
std::vector<int> MaxWeightAssignment(
    const std::vector<std::vector<double>> &similarity);

}  // namespace corefens

#endif  // COREFENS_HUNGARIAN_H_
