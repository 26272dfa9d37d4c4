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

#include "postprice/simulator.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace postprice {
namespace {

bool Accepts(const PricingStrategy& strategy, int index, double time,
             double valuation, double* price) {
  *price = strategy.PriceForArrival(index, time);
  return valuation * strategy.discount()(time) >= *price;
}

// Same draw order as SampleArrivals, stopping at the first buyer.
RunOutcome StreamRun(const PricingStrategy& strategy,
                     const ValuationDistribution& dist, Rng& rng) {
  const double rate = strategy.params().arrival_rate;
  const double horizon = strategy.params().horizon;
  RunOutcome out;
  double t = 0.0;
  for (int index = 1;; ++index) {
    t += Exponential(rng, rate);
    if (t > horizon) break;
    const double valuation = dist.Sample(rng);
    double price;
    if (Accepts(strategy, index, t, valuation, &price)) {
      out.sold = true;
      out.sale_time = t;
      out.sale_price = price;
      out.buyer_index = index;
      break;
    }
  }
  return out;
}

double PairwiseRange(const double* values, size_t n) {
  if (n <= 8) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += values[i];
    return sum;
  }
  const size_t half = n / 2;
  return PairwiseRange(values, half) + PairwiseRange(values + half, n - half);
}

std::string OptionalCell(const std::optional<double>& value) {
  if (!value) return "";
  std::ostringstream cell;
  cell.precision(17);
  cell << *value;
  return cell.str();
}

}  // namespace

ArrivalTrace SampleArrivals(Rng& rng, const MarketParams& params,
                            const ValuationDistribution& dist) {
  ArrivalTrace trace;
  double t = 0.0;
  for (;;) {
    t += Exponential(rng, params.arrival_rate);
    if (t > params.horizon) break;
    trace.times.push_back(t);
    trace.valuations.push_back(dist.Sample(rng));
  }
  return trace;
}

RunOutcome RunOnce(const PricingStrategy& strategy, const ArrivalTrace& trace) {
  if (trace.times.size() != trace.valuations.size()) {
    throw std::invalid_argument("trace times and valuations differ in length");
  }
  RunOutcome out;
  for (size_t i = 0; i < trace.size(); ++i) {
    double price;
    const int index = static_cast<int>(i) + 1;
    if (Accepts(strategy, index, trace.times[i], trace.valuations[i], &price)) {
      out.sold = true;
      out.sale_time = trace.times[i];
      out.sale_price = price;
      out.buyer_index = index;
      break;
    }
  }
  return out;
}

double PairwiseSum(const std::vector<double>& values) {
  return PairwiseRange(values.data(), values.size());
}

McReport MonteCarlo(const PricingStrategy& strategy,
                    const ValuationDistribution& dist, int n_runs,
                    uint64_t seed, const McOptions& options) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (std::abs(dist.h() - strategy.params().value_ratio) > 1e-12) {
    throw std::invalid_argument("valuation range does not match the market's h");
  }
  int threads = options.threads;
  if (threads <= 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, n_runs);

  std::vector<RunOutcome> outcomes(n_runs);
  auto worker = [&](int first) {
    for (int r = first; r < n_runs; r += threads) {
      Rng rng = MakeStream(seed, static_cast<uint64_t>(r));
      outcomes[r] = StreamRun(strategy, dist, rng);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  std::vector<double> revenue(n_runs);
  std::vector<double> sold(n_runs);
  for (int r = 0; r < n_runs; ++r) {
    revenue[r] = outcomes[r].revenue();
    sold[r] = outcomes[r].sold ? 1.0 : 0.0;
  }
  McReport report;
  report.n_runs = n_runs;
  report.seed = seed;
  report.mean_revenue = PairwiseSum(revenue) / n_runs;
  std::vector<double> squares(n_runs);
  for (int r = 0; r < n_runs; ++r) {
    const double d = revenue[r] - report.mean_revenue;
    squares[r] = d * d;
  }
  if (n_runs > 1) {
    report.std_error =
        std::sqrt(PairwiseSum(squares) / (n_runs - 1)) / std::sqrt(n_runs);
  }
  report.sell_rate = PairwiseSum(sold) / n_runs;
  report.normalized_mean =
      report.mean_revenue / strategy.params().value_ratio;
  if (options.keep_per_run) report.per_run = std::move(outcomes);
  return report;
}

nlohmann::json McReport::ToJson() const {
  return {{"n_runs", n_runs},
          {"mean_revenue", mean_revenue},
          {"std_error", std_error},
          {"sell_rate", sell_rate},
          {"normalized_mean", normalized_mean},
          {"seed", seed}};
}

void McReport::WriteCsv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "n_runs,mean_revenue,std_error,sell_rate,normalized_mean,seed\n"
      << n_runs << ',' << mean_revenue << ',' << std_error << ','
      << sell_rate << ',' << normalized_mean << ',' << seed << '\n';
  out.precision(old_precision);
}

void McReport::WritePerRunCsv(std::ostream& out) const {
  out << "run_index,revenue,sale_time,buyer_index\n";
  const auto old_precision = out.precision(17);
  for (size_t r = 0; r < per_run.size(); ++r) {
    const RunOutcome& run = per_run[r];
    out << r << ',' << run.revenue() << ',' << OptionalCell(run.sale_time)
        << ',';
    if (run.buyer_index) out << *run.buyer_index;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace postprice
