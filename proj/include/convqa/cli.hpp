// Copyright 2025 The convqa Authors.
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

#ifndef CONVQA_CLI_HPP_
#define CONVQA_CLI_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace convqa::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes shared by every subcommand (also listed in --help).
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitIdMismatch = 3;
inline constexpr int kExitTestSplit = 4;
inline constexpr int kExitMissingData = 5;
inline constexpr int kExitProvider = 6;
inline constexpr int kExitConfig = 7;

/// Parses and runs one invocation. `args` excludes the program name.
/// All user-facing prints go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// main() adapter.
int run(int argc, const char* const* argv);

}  // namespace convqa::cli

#endif  // CONVQA_CLI_HPP_
