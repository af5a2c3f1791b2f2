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

// Binary checkpoint container. All integers are little-endian.
//
//   8 bytes   magic "CORFCKPT"
//   u32       format version (1)
//   u32, ...  config fingerprint length and bytes
//   u64       parameter version counter
//   u32       block count
//   per block: u32 name length, name bytes, u32 rows, u32 cols,
//              rows * cols IEEE-754 doubles
//   u64       FNV-1a of every preceding byte

#ifndef COREFENS_CHECKPOINT_H_
#define COREFENS_CHECKPOINT_H_

#include <string>
#include <string_view>

#include "corefens/model.h"

namespace corefens {

std::string SerializeCheckpoint(const ModelParams &params);

// Throws ChecksumError on a corrupt or truncated container and
// ShapeMismatchError when a block disagrees with the recorded config.
ModelParams DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const ModelParams &params, const std::string &path);
ModelParams LoadCheckpoint(const std::string &path);

// Also requires the stored config to equal `expected`.
ModelParams LoadCheckpoint(const std::string &path,
                           const ModelConfig &expected);

}  // namespace corefens

#endif  // COREFENS_CHECKPOINT_H_
