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

#ifndef POSTPRICE_SIMULATOR_H_
#define POSTPRICE_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "postprice/mechanisms.h"
#include "postprice/random.h"
#include "postprice/valuation.h"

namespace postprice {

struct ArrivalTrace {
  std::vector<double> times;  // strictly increasing, within [0, T]
  std::vector<double> valuations;

  size_t size() const { return times.size(); }
};

// Draws arrivals by exponential gaps, each followed by its valuation. A run
// that stops at the first buyer consumes a prefix of the same stream.
ArrivalTrace SampleArrivals(Rng& rng, const MarketParams& params,
                            const ValuationDistribution& dist);

struct RunOutcome {
  bool sold = false;
  std::optional<double> sale_time;
  std::optional<double> sale_price;
  std::optional<int> buyer_index;  // 1-based

  double revenue() const { return sale_price.value_or(0.0); }
};

// First agent with V xi(W) >= price buys.
RunOutcome RunOnce(const PricingStrategy& strategy, const ArrivalTrace& trace);

struct McOptions {
  int threads = 1;  // 0 picks the hardware concurrency
  bool keep_per_run = false;
};

struct McReport {
  int n_runs = 0;
  double mean_revenue = 0.0;
  double std_error = 0.0;
  double sell_rate = 0.0;
  double normalized_mean = 0.0;  // mean_revenue / h
  uint64_t seed = 0;
  std::vector<RunOutcome> per_run;

  nlohmann::json ToJson() const;
  // Header plus one row.
  void WriteCsv(std::ostream& out) const;
  // run_index, revenue, sale_time, buyer_index.
  void WritePerRunCsv(std::ostream& out) const;
};

// Run r draws from MakeStream(seed, r). The report does not depend on the
// thread count.
McReport MonteCarlo(const PricingStrategy& strategy,
                    const ValuationDistribution& dist, int n_runs,
                    uint64_t seed, const McOptions& options = {});

// Sum by recursive halving; the result depends only on the values.
double PairwiseSum(const std::vector<double>& values);

}  // namespace postprice

#endif  // POSTPRICE_SIMULATOR_H_
