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

// Exact expected revenue when every agent shares one valuation v, plus the
// curve and loss statistics built on it.

#ifndef POSTPRICE_ANALYTICS_H_
#define POSTPRICE_ANALYTICS_H_

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "postprice/discount.h"
#include "postprice/mechanisms.h"

namespace postprice {

// The requested quantity has no exact evaluation for this strategy; use
// Monte Carlo instead.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Benchmark revenue per unit valuation, integral_0^T xi lambda e^(-lambda t).
double KStar(const MarketParams& params, const DiscountFunction& discount);

// Expected revenue when all agents value the item at v.
//
// Time-indexed strategies need p(t) / xi(t) non-increasing, except mpc
// whose step schedule is integrated interval by interval. esoes_ss is
// summed over the Poisson arrival count and needs a constant-one discount.
// Everything else throws UnsupportedError.
double ExpectedRevenueIv(const PricingStrategy& strategy, double valuation);

// ExpectedRevenueIv / (v k*).
double RatioIv(const PricingStrategy& strategy, double valuation);

// Earliest time the agent would buy: inf{t : p(t) <= v xi(t)}. Returns T
// if no such time exists. Requires a non-increasing undiscounted price.
double FirstAcceptTime(const PricingStrategy& strategy, double valuation);

// Exact esoes_ss revenue for point valuations under xi = 1. The Poisson
// tail is dropped once it falls below 1e-12.
double EsoesIvRevenue(const PricingStrategy& strategy, double valuation);

// Largest relative violation of p(t) / xi(t) being non-increasing over an
// equispaced grid on [0, T]; points with xi(t) <= 1e-12 are skipped. Zero
// for a monotone price.
double UndiscountedIncrease(const PricingStrategy& strategy, int n_grid = 2048);

struct RevenueCurve {
  std::vector<double> v_grid;
  std::vector<double> revenue;
  std::vector<double> ratio;

  // Columns v, revenue, ratio.
  void WriteCsv(std::ostream& out) const;
};

RevenueCurve IvRevenueCurve(const PricingStrategy& strategy,
                            const std::vector<double>& v_grid);

// 1, 1 + step, ..., h; h is appended if the step does not land on it.
std::vector<double> ValuationGrid(double h, double step = 0.5);

struct LossIndices {
  // max_v max(0, a(v) - b(v)) / h: what b gives up against a.
  double max_loss_b_vs_a = 0.0;
  // max_v max(0, b(v) - a(v)) / h.
  double max_loss_a_vs_b = 0.0;
  // Valuations attaining the unclamped maxima of a - b and b - a.
  double argmax_b_vs_a = 0.0;
  double argmax_a_vs_b = 0.0;
};

// Throws std::invalid_argument if the valuation grids differ.
LossIndices ComputeLossIndices(const RevenueCurve& a, const RevenueCurve& b,
                               double h);

}  // namespace postprice

#endif  // POSTPRICE_ANALYTICS_H_
