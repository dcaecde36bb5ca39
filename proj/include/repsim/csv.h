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

#ifndef REPSIM_CSV_H_
#define REPSIM_CSV_H_

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace repsim {

// Shortest-safe full-precision rendering, printf "%.17g"; non-finite values
// print as inf / -inf / nan.
std::string format_double(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

// Tabular output rendered either as RFC-4180-style CSV ("\n" line endings)
// or as a JSON object {"columns": [...], "rows": [[...]], ...summary}.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Trailing `key=value` lines in CSV; top-level fields in JSON.
  std::vector<std::pair<std::string, Cell>> summary;

  std::string to_csv() const;
  std::string to_json() const;
};

}  // namespace repsim

#endif  // REPSIM_CSV_H_
