// Copyright 2026 The bayespc Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bayespc/types.hpp"

namespace bayespc::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `bayespc` command line with the given arguments (program name
/// first). Subcommands: learn, learn-mixture, eval, sample, mpe, bench.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses evidence rows: comma-separated `0`, `1` or `?`, all of arity
/// `width`. Cell c of a row is the value of variable c.
std::vector<Evidence> read_evidence(std::istream& in, std::size_t width,
                                    const std::string& source = "<evidence>");

}  // namespace bayespc::cli
