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

#ifndef COREFENS_ERRORS_H_
#define COREFENS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace corefens {

// Bad input data or configuration. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL text, score dumps, embedding files, ...
class ParseError : public DataError {
 public:
  ParseError(const std::string &what, int line)
      : DataError(line > 0 ? what + " (line " + std::to_string(line) + ")"
                           : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

class ChecksumError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatchError : public DataError {
 public:
  using DataError::DataError;
};

// A caller broke an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values showed up during optimization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corefens

#endif  // COREFENS_ERRORS_H_
