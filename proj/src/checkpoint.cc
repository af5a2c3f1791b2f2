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

#include "corefens/checkpoint.h"

#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "corefens/corpus.h"
#include "corefens/errors.h"
#include "corefens/rng.h"

namespace corefens {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'O', 'R', 'F', 'C', 'K', 'P', 'T'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void Put(std::string &out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void PutString(std::string &out, std::string_view s) {
  Put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    T value;
    std::memcpy(&value, Take(sizeof(T)).data(), sizeof(T));
    return value;
  }

  std::string GetString() {
    const uint32_t size = Get<uint32_t>();
    return std::string(Take(size));
  }

  std::string_view Take(size_t size) {
    if (size > bytes_.size() - pos_) {
      throw ChecksumError("checkpoint is truncated");
    }
    std::string_view out = bytes_.substr(pos_, size);
    pos_ += size;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const ModelParams &params) {
  std::string out(kMagic, sizeof(kMagic));
  Put<uint32_t>(out, kFormatVersion);
  PutString(out, params.config().Fingerprint());
  Put<uint64_t>(out, params.version());
  Put<uint32_t>(out, static_cast<uint32_t>(params.blocks().size()));
  for (const ParamBlock &block : params.blocks()) {
    PutString(out, block.name);
    Put<uint32_t>(out, static_cast<uint32_t>(block.rows));
    Put<uint32_t>(out, static_cast<uint32_t>(block.cols));
    out.append(reinterpret_cast<const char *>(block.values.data()),
               block.values.size() * sizeof(double));
  }
  Put<uint64_t>(out, Fnv1a(out.data(), out.size()));
  return out;
}

ModelParams DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + sizeof(uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ChecksumError("not a checkpoint file");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  uint64_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), sizeof(stored));
  if (stored != Fnv1a(body.data(), body.size())) {
    throw ChecksumError("checkpoint checksum mismatch");
  }

  Reader in(body);
  in.Take(sizeof(kMagic));
  const uint32_t format = in.Get<uint32_t>();
  if (format != kFormatVersion) {
    throw ChecksumError(fmt::format("unsupported checkpoint format {}", format));
  }
  ModelParams params(ModelConfig::FromFingerprint(in.GetString()));
  params.set_version(in.Get<uint64_t>());
  const uint32_t count = in.Get<uint32_t>();
  if (count != params.blocks().size()) {
    throw ShapeMismatchError(
        fmt::format("checkpoint has {} parameter blocks, config implies {}",
                    count, params.blocks().size()));
  }
  for (ParamBlock &block : params.blocks()) {
    const std::string name = in.GetString();
    const uint32_t rows = in.Get<uint32_t>();
    const uint32_t cols = in.Get<uint32_t>();
    if (name != block.name || static_cast<int>(rows) != block.rows ||
        static_cast<int>(cols) != block.cols) {
      throw ShapeMismatchError(fmt::format(
          "checkpoint block {} [{}x{}] does not match expected {} [{}x{}]",
          name, rows, cols, block.name, block.rows, block.cols));
    }
    std::string_view raw = in.Take(block.values.size() * sizeof(double));
    std::memcpy(block.values.data(), raw.data(), raw.size());
  }
  if (!in.done()) throw ChecksumError("trailing bytes in checkpoint");
  return params;
}

void SaveCheckpoint(const ModelParams &params, const std::string &path) {
  WriteTextFile(path, SerializeCheckpoint(params));
}

ModelParams LoadCheckpoint(const std::string &path) {
  return DeserializeCheckpoint(ReadTextFile(path));
}

ModelParams LoadCheckpoint(const std::string &path,
                           const ModelConfig &expected) {
  ModelParams params = LoadCheckpoint(path);
  if (!(params.config() == expected)) {
    throw ShapeMismatchError(
        fmt::format("checkpoint {} has config {} but {} was expected", path,
                    params.config().Fingerprint(), expected.Fingerprint()));
  }
  return params;
}

}  // namespace corefens
