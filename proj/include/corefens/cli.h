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

// The `corefens` command line: synth-gen, build-wiki, train, evaluate and
// score subcommands.

#ifndef COREFENS_CLI_H_
#define COREFENS_CLI_H_

#include <string>
#include <vector>

namespace corefens {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Parses the arguments and runs one subcommand. Logs go to standard error,
// reports to standard output, artifacts to --out.
int RunMain(int argc, const char *const *argv);

// Same, with args[0] as the program name.
int RunMain(const std::vector<std::string> &args);

}  // namespace corefens

#endif  // COREFENS_CLI_H_
