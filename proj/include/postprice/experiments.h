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

// Parameter sweeps comparing the constant-ratio, piecewise-constant and
// arrival-index mechanisms:
//
//   result1  uniform valuations, no discount, Monte Carlo revenue
//   result2  identical valuations on {1, 1.5, ..., h}, exact loss indices
//   result3  as result1 with the truncated normal
//   result4  uniform valuations under a linear discount
//
// Each cell draws from a seed derived from (seed, id, lambda, T, mechanism,
// nsub), so any cell can be recomputed on its own.

#ifndef POSTPRICE_EXPERIMENTS_H_
#define POSTPRICE_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "postprice/discount.h"

namespace postprice {

struct ExperimentSpec {
  std::string id;
  std::vector<double> lambda_grid;
  std::vector<double> horizon_grid;
  double h = 10.0;
  int n_runs = 1000;
  std::vector<int> nsub_list;
  uint64_t seed = 0;
  DiscountKind discount_kind = DiscountKind::kConstantOne;
  int threads = 1;

  // Defaults for one of result1..result4; `full` uses lambda = 1..20 and
  // T in {10, 20, 50, 100} instead of the desk-scale grid.
  static ExperimentSpec Defaults(const std::string& id, bool full = false);

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct ExperimentRow {
  std::string experiment_id;
  double lambda = 0.0;
  double horizon = 0.0;
  double h = 0.0;
  std::string mechanism;
  std::optional<int> nsub;
  int n_runs = 0;
  uint64_t seed = 0;
  double mean_revenue = 0.0;
  double normalized_mean = 0.0;
  double std_error = 0.0;
  std::optional<double> argmax_v;

  nlohmann::json ToJson() const;
};

struct ExperimentTable {
  std::string experiment_id;
  nlohmann::json config;
  std::vector<ExperimentRow> rows;
  std::vector<std::string> notes;

  // '#' lines with the config and notes, then the header and rows.
  void WriteCsv(std::ostream& out) const;
  nlohmann::json ToJson() const;

  const ExperimentRow* Find(double lambda, double horizon,
                            const std::string& mechanism,
                            std::optional<int> nsub = std::nullopt) const;
};

uint64_t CellSeed(const ExperimentSpec& spec, double lambda, double horizon,
                  const std::string& mechanism, int nsub);

// One Monte Carlo cell of result1, result3 or result4. mechanism is "mc",
// "mpc" or "esoes_ss"; nsub is used by mpc only.
ExperimentRow RunCell(const ExperimentSpec& spec, double lambda,
                      double horizon, const std::string& mechanism,
                      int nsub = 0);

ExperimentTable RunResult1(const ExperimentSpec& spec);
ExperimentTable RunResult2(const ExperimentSpec& spec);
ExperimentTable RunResult3(const ExperimentSpec& spec);
ExperimentTable RunResult4(const ExperimentSpec& spec);

// Dispatches on spec.id; throws std::invalid_argument for unknown ids.
ExperimentTable RunExperiment(const ExperimentSpec& spec);

}  // namespace postprice

#endif  // POSTPRICE_EXPERIMENTS_H_
