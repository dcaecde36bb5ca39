// Copyright 2026 The repsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPSIM_TOOLS_CLI_H_
#define REPSIM_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace repsim::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNonConvergence = 3,
  kRuntimeCap = 4,
};

// Entry point shared by main() and the tests. `args` excludes argv[0].
// Primary output goes to --out (or `out` when absent); diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repsim::cli

#endif  // REPSIM_TOOLS_CLI_H_
