// Copyright 2026 The Postprice Authors.
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

// Self-check suite over the library's invariants, run by `postprice check`.

#ifndef POSTPRICE_CHECK_H_
#define POSTPRICE_CHECK_H_

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace postprice {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> results;

  int passed() const;
  int failed() const;
  bool ok() const { return failed() == 0; }

  // PASS/FAIL lines followed by a count line.
  void Print(std::ostream& out) const;
  nlohmann::json ToJson() const;
};

struct CheckOptions {
  // Adds a price that falls and then rises to the monotone-price check.
  bool inject_perturbation = false;
};

CheckReport RunInvariantChecks(const CheckOptions& options = {});

}  // namespace postprice

#endif  // POSTPRICE_CHECK_H_
