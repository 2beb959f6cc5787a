// Copyright 2026 The Lensum Authors.
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

#ifndef LENSUM_CLI_H_
#define LENSUM_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lensum {

inline constexpr char kToolVersion[] = "0.1.0";

// Entry point of the `lensum` tool. Returns the process exit status;
// human-readable output goes to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace lensum

#endif  // LENSUM_CLI_H_
