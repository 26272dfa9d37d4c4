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

#include "postprice/analytics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "postprice/numerics.h"

namespace postprice {
namespace {

constexpr double kTinyDiscount = 1e-12;
constexpr double kMonotoneSlack = 1e-9;
constexpr double kPoissonTail = 1e-12;

void RequireValuation(const PricingStrategy& strategy, double valuation) {
  const double h = strategy.params().value_ratio;
  if (!(valuation >= 1.0 - 1e-12 && valuation <= h * (1.0 + 1e-12))) {
    std::ostringstream msg;
    msg << "valuation " << valuation << " outside [1, " << h << "]";
    throw std::invalid_argument(msg.str());
  }
}

// Sup of {t in [a, b] : v xi(t) >= c}, given v xi(a) >= c.
double LastAffordable(const DiscountFunction& discount, double valuation,
                      double price, double a, double b) {
  if (valuation * discount(b) >= price) return b;
  const RootBracket bracket = BracketRoot(
      [&](double t) {
        return valuation * discount(t) >= price ? 1.0 : -1.0;
      },
      a, b);
  return bracket.lo;
}

double MpcIvRevenue(const PricingStrategy& strategy, double valuation) {
  const MpcMeta& meta = strategy.mpc_meta();
  const double rate = strategy.params().arrival_rate;
  const double horizon = strategy.params().horizon;
  const DiscountFunction& discount = strategy.discount();
  double revenue = 0.0;
  double covered = 0.0;  // measure of buying times seen so far
  for (int i = 1; i <= meta.n_intervals; ++i) {
    const double a = (i - 1) * meta.interval_length;
    if (a >= horizon) break;
    const double b = i == meta.n_intervals
                         ? horizon
                         : std::min(i * meta.interval_length, horizon);
    const double price = meta.schedule[i - 1];
    if (valuation * discount(a) < price) continue;
    const double length =
        LastAffordable(discount, valuation, price, a, b) - a;
    revenue += price * std::exp(-rate * covered) *
               -std::expm1(-rate * length);
    covered += length;
  }
  return revenue;
}

double PoissonTerm(double mean, int j) {
  return std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
}

// P(N >= from). Sums whichever side of the mean is shorter.
double PoissonTail(double mean, int from) {
  if (from <= 0) return 1.0;
  if (from <= mean) {
    double below = 0.0;
    for (int j = from - 1; j >= 0; --j) {
      const double term = PoissonTerm(mean, j);
      below += term;
      if (term < kPoissonTail * kPoissonTail * std::max(below, 1e-300)) break;
    }
    return std::max(0.0, 1.0 - below);
  }
  const double cutoff = from + 40.0 * std::sqrt(mean) + 50.0;
  double sum = 0.0;
  for (int j = from; j <= cutoff; ++j) {
    const double term = PoissonTerm(mean, j);
    sum += term;
    if (term < kPoissonTail * kPoissonTail * sum) break;
  }
  return std::min(sum, 1.0);
}

}  // namespace

double KStar(const MarketParams& params, const DiscountFunction& discount) {
  params.Validate();
  const double rate = params.arrival_rate;
  if (discount.kind() == DiscountKind::kConstantOne) {
    return -std::expm1(-rate * params.horizon);
  }
  return IntegrateDecaying(
      [&](double t) { return discount(t) * rate * std::exp(-rate * t); }, 0.0,
      params.horizon, rate);
}

double UndiscountedIncrease(const PricingStrategy& strategy, int n_grid) {
  if (n_grid < 2) throw std::invalid_argument("n_grid must be >= 2");
  const double horizon = strategy.params().horizon;
  const DiscountFunction& discount = strategy.discount();
  double worst = 0.0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < n_grid; ++j) {
    const double t = horizon * j / (n_grid - 1);
    const double xi = discount(t);
    if (xi <= kTinyDiscount) continue;
    const double u = strategy.PriceAt(t) / xi;
    if (!std::isnan(previous) && u > previous) {
      worst = std::max(worst, (u - previous) / std::max(previous, 1.0));
    }
    previous = u;
  }
  return worst;
}

double FirstAcceptTime(const PricingStrategy& strategy, double valuation) {
  const DiscountFunction& discount = strategy.discount();
  auto gap = [&](double t) {
    return strategy.PriceAt(t) - valuation * discount(t);
  };
  if (gap(0.0) <= 0.0) return 0.0;
  const double hi = strategy.switch_time();
  if (gap(hi) > 0.0) {
    if (hi < strategy.params().horizon &&
        gap(strategy.params().horizon) <= 0.0) {
      return FindRoot(gap, hi, strategy.params().horizon);
    }
    return strategy.params().horizon;
  }
  return BracketRoot(
             [&](double t) { return gap(t) > 0.0 ? 1.0 : -1.0; }, 0.0, hi)
      .hi;
}

double EsoesIvRevenue(const PricingStrategy& strategy, double valuation) {
  if (strategy.kind() != MechanismKind::kEsoesSs) {
    throw std::invalid_argument("EsoesIvRevenue needs an esoes_ss strategy");
  }
  if (strategy.discount().kind() != DiscountKind::kConstantOne) {
    throw UnsupportedError(
        "exact esoes_ss revenue needs a constant-one discount; use Monte Carlo");
  }
  RequireValuation(strategy, valuation);
  const EsoesSsMeta& meta = strategy.esoes_meta();
  // Prices never increase with the index and reach 1 after lambda T, so the
  // first affordable index is the only one that can sell.
  const int last = static_cast<int>(std::floor(meta.expected_arrivals)) + 1;
  for (int i = 1; i <= last; ++i) {
    const double price = strategy.PriceForArrival(i, 0.0);
    if (price <= valuation) {
      return price * PoissonTail(meta.expected_arrivals, i);
    }
  }
  return 0.0;
}

double ExpectedRevenueIv(const PricingStrategy& strategy, double valuation) {
  RequireValuation(strategy, valuation);
  switch (strategy.kind()) {
    case MechanismKind::kEsoesSs:
      return EsoesIvRevenue(strategy, valuation);
    case MechanismKind::kMpc:
      return MpcIvRevenue(strategy, valuation);
    default:
      break;
  }
  const double increase = UndiscountedIncrease(strategy);
  if (increase > kMonotoneSlack) {
    std::ostringstream msg;
    msg << ToString(strategy.kind())
        << " price rises relative to the discount (by " << increase
        << "); exact revenue unavailable, use Monte Carlo";
    throw UnsupportedError(msg.str());
  }
  const double rate = strategy.params().arrival_rate;
  const double horizon = strategy.params().horizon;
  const double start = FirstAcceptTime(strategy, valuation);
  if (start >= horizon) return 0.0;
  auto density = [&](double t) {
    return strategy.PriceAt(t) * rate * std::exp(-rate * (t - start));
  };
  const double split = strategy.switch_time();
  if (split > start && split < horizon) {
    return IntegrateDecaying(density, start, split, rate) +
           std::exp(-rate * (split - start)) *
               IntegrateDecaying(
                   [&](double t) {
                     return strategy.PriceAt(t) * rate *
                            std::exp(-rate * (t - split));
                   },
                   split, horizon, rate);
  }
  return IntegrateDecaying(density, start, horizon, rate);
}

double RatioIv(const PricingStrategy& strategy, double valuation) {
  return ExpectedRevenueIv(strategy, valuation) /
         (valuation * KStar(strategy.params(), strategy.discount()));
}

void RevenueCurve::WriteCsv(std::ostream& out) const {
  out << "v,revenue,ratio\n";
  const auto old_precision = out.precision(17);
  for (size_t i = 0; i < v_grid.size(); ++i) {
    out << v_grid[i] << ',' << revenue[i] << ',' << ratio[i] << '\n';
  }
  out.precision(old_precision);
}

RevenueCurve IvRevenueCurve(const PricingStrategy& strategy,
                            const std::vector<double>& v_grid) {
  const double k_star = KStar(strategy.params(), strategy.discount());
  RevenueCurve curve;
  curve.v_grid = v_grid;
  for (double v : v_grid) {
    const double revenue = ExpectedRevenueIv(strategy, v);
    curve.revenue.push_back(revenue);
    curve.ratio.push_back(revenue / (v * k_star));
  }
  return curve;
}

std::vector<double> ValuationGrid(double h, double step) {
  if (!(h >= 1.0) || !(step > 0.0)) {
    throw std::invalid_argument("ValuationGrid needs h >= 1 and step > 0");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = 1.0 + i * step;
    if (v > h + 1e-9) break;
    grid.push_back(std::min(v, h));
  }
  if (h - grid.back() > 1e-9) grid.push_back(h);
  return grid;
}

LossIndices ComputeLossIndices(const RevenueCurve& a, const RevenueCurve& b,
                               double h) {
  if (a.v_grid != b.v_grid || a.revenue.size() != a.v_grid.size() ||
      b.revenue.size() != b.v_grid.size() || a.v_grid.empty()) {
    throw std::invalid_argument("loss indices need curves on one v grid");
  }
  LossIndices out;
  double best_ab = -std::numeric_limits<double>::infinity();
  double best_ba = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.v_grid.size(); ++i) {
    const double diff = a.revenue[i] - b.revenue[i];
    if (diff > best_ab) {
      best_ab = diff;
      out.argmax_b_vs_a = a.v_grid[i];
    }
    if (-diff > best_ba) {
      best_ba = -diff;
      out.argmax_a_vs_b = a.v_grid[i];
    }
  }
  out.max_loss_b_vs_a = std::max(0.0, best_ab) / h;
  out.max_loss_a_vs_b = std::max(0.0, best_ba) / h;
  return out;
}

}  // namespace postprice
