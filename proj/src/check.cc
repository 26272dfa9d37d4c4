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

#include "postprice/check.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "postprice/analytics.h"
#include "postprice/mechanisms.h"
#include "postprice/numerics.h"
#include "postprice/simulator.h"
#include "postprice/valuation.h"

namespace postprice {
namespace {

using Probe = std::function<bool(std::ostringstream&)>;

void Run(CheckReport* report, const std::string& name, const Probe& probe) {
  std::ostringstream detail;
  detail.precision(10);
  bool passed = false;
  try {
    passed = probe(detail);
  } catch (const std::exception& err) {
    detail << "threw: " << err.what();
  }
  report->results.push_back({name, passed, detail.str()});
}

const MarketParams kLinMarket{10.0, 12.0, 2.8};

}  // namespace

int CheckReport::passed() const {
  return static_cast<int>(std::count_if(
      results.begin(), results.end(),
      [](const CheckResult& r) { return r.passed; }));
}

int CheckReport::failed() const {
  return static_cast<int>(results.size()) - passed();
}

void CheckReport::Print(std::ostream& out) const {
  for (const CheckResult& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << ": " << r.detail;
    out << '\n';
  }
  out << "passed=" << passed() << " failed=" << failed()
      << " total=" << results.size() << '\n';
}

nlohmann::json CheckReport::ToJson() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& r : results) {
    checks.push_back(
        {{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  return {{"checks", checks}, {"passed", passed()}, {"failed", failed()}};
}

CheckReport RunInvariantChecks(const CheckOptions& options) {
  CheckReport report;

  Run(&report, "quadrature_exp_linear", [](std::ostringstream& d) {
    const double value =
        Integrate([](double t) { return (1 - t) * std::exp(-t); }, 0, 1);
    d << "integral=" << value;
    return std::abs(value - std::exp(-1.0)) < 1e-10;
  });

  Run(&report, "linear_discount_shape", [](std::ostringstream& d) {
    const DiscountFunction xi = MakeLinearDiscount(12.0);
    double prev = xi(0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double now = xi(12.0 * i / 1000);
      if (now > prev) return false;
      prev = now;
    }
    d << "xi(0)=" << xi(0.0) << " xi(T)=" << xi(12.0);
    return xi(0.0) == 1.0 && xi(12.0) == 0.0;
  });

  const PricingStrategy lin = BuildMcLin(kLinMarket);

  Run(&report, "switch_time_residual", [&](std::ostringstream& d) {
    const double residual = McLinResidual(kLinMarket, lin.switch_time());
    d << "t0=" << lin.switch_time() << " residual=" << residual;
    return std::abs(residual) < 1e-10;
  });

  Run(&report, "price_boundaries", [&](std::ostringstream& d) {
    const double t0 = lin.switch_time();
    const double front = lin.PriceAt(0.0);
    const double left = lin.PriceAt(std::nextafter(t0, 0.0));
    d << "p(0)=" << front << " p(t0-)=" << left;
    return std::abs(front - 2.8) < 1e-9 &&
           std::abs(left - lin.discount()(t0)) < 1e-9;
  });

  Run(&report, "decreasing_undiscounted_price", [&](std::ostringstream& d) {
    std::vector<PricingStrategy> strategies = {
        lin,
        BuildMcGeneral(kLinMarket, MakeConstantDiscount(12.0)),
        MpcFromNsub(kLinMarket, MakeConstantDiscount(12.0), 4)};
    if (options.inject_perturbation) {
      strategies.push_back(MakeCustomStrategy(
          kLinMarket, MakeConstantDiscount(12.0),
          [](double t) { return 1.0 + std::abs(t - 6.0) / 6.0; }));
    }
    double worst = 0.0;
    for (const PricingStrategy& s : strategies) {
      worst = std::max(worst, UndiscountedIncrease(s));
    }
    d << "strategies=" << strategies.size() << " max_increase=" << worst;
    return worst <= 1e-9;
  });

  Run(&report, "constant_ratio_in_v", [&](std::ostringstream& d) {
    const double k = lin.mc_meta().unit_revenue;
    double spread = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double v = 1.0 + 1.8 * i / 8;
      spread = std::max(spread, std::abs(ExpectedRevenueIv(lin, v) / v - k) / k);
    }
    d << "k=" << k << " max_rel_spread=" << spread;
    return spread < 1e-6;
  });

  Run(&report, "shooting_matches_closed_form", [&](std::ostringstream& d) {
    const PricingStrategy gen =
        BuildMcGeneral(kLinMarket, MakeLinearDiscount(12.0));
    double sup = 0.0;
    for (int i = 0; i < 2048; ++i) {
      const double t = 12.0 * i / 2047;
      sup = std::max(sup, std::abs(gen.PriceAt(t) - lin.PriceAt(t)));
    }
    d << "sup_norm=" << sup;
    return sup < 1e-6;
  });

  Run(&report, "ratio_formula", [&](std::ostringstream& d) {
    const RatioReport ratio = CompetitiveRatioMc(lin.mc_meta(), kLinMarket);
    d << "rho=" << ratio.rho << " closed_form=" << ratio.closed_form.value();
    return std::abs(ratio.rho - *ratio.closed_form) < 1e-9;
  });

  Run(&report, "switch_time_upper_bound", [&](std::ostringstream& d) {
    const double bound = T0UpperBound(kLinMarket);
    d << "t0=" << lin.switch_time() << " bound=" << bound;
    return lin.switch_time() <= bound;
  });

  Run(&report, "benchmark_constant_smaller_discount", [](std::ostringstream& d) {
    const MarketParams p{2.0, 5.0, 3.0};
    const double lin_k = KStar(p, MakeLinearDiscount(5.0));
    const double one_k = KStar(p, MakeConstantDiscount(5.0));
    d << "linear=" << lin_k << " constant=" << one_k;
    return lin_k < one_k && one_k <= 1.0 && lin_k > 0.0;
  });

  Run(&report, "max_order_hazard_monotone", [](std::ostringstream& d) {
    const ValuationDistribution uniform = ValuationDistribution::Uniform(10.0);
    for (double m : {0.5, 2.0, 8.0}) {
      double prev = 0.0;
      for (int i = 0; i < 512; ++i) {
        const double x = 1.0 + 9.0 * (i + 0.5) / 512;
        const double hz = MaxOrderHazard(uniform, m, x);
        if (hz < prev * (1 - 1e-12)) {
          d << "drops at m=" << m << " x=" << x;
          return false;
        }
        prev = hz;
      }
    }
    return true;
  });

  Run(&report, "expected_max_log_ratio", [](std::ostringstream& d) {
    const ValuationDistribution uniform = ValuationDistribution::Uniform(10.0);
    const LnRatioCheck c = LnRatioInequalityCheck(uniform, 2.0, 8.0);
    d << "lhs=" << c.lhs << " rhs=" << c.rhs;
    return c.holds;
  });

  Run(&report, "monte_carlo_thread_invariance", [&](std::ostringstream& d) {
    const ValuationDistribution uniform = ValuationDistribution::Uniform(2.8);
    const McReport one = MonteCarlo(lin, uniform, 2000, 7, {1, false});
    const McReport four = MonteCarlo(lin, uniform, 2000, 7, {4, false});
    d << "mean=" << one.mean_revenue;
    return one.mean_revenue == four.mean_revenue &&
           one.std_error == four.std_error;
  });

  Run(&report, "monte_carlo_matches_exact", [&](std::ostringstream& d) {
    const ValuationDistribution point = ValuationDistribution::Point(2.8, 2.0);
    const McReport mc = MonteCarlo(lin, point, 20000, 11, {0, false});
    const double exact = ExpectedRevenueIv(lin, 2.0);
    d << "mc=" << mc.mean_revenue << " exact=" << exact
      << " se=" << mc.std_error;
    return std::abs(mc.mean_revenue - exact) <= 3 * mc.std_error;
  });

  Run(&report, "arrival_index_exact_matches_mc", [](std::ostringstream& d) {
    const MarketParams p{2.0, 5.0, 10.0};
    const PricingStrategy es = BuildEsoesSs(p);
    const ValuationDistribution point = ValuationDistribution::Point(10.0, 3.0);
    const McReport mc = MonteCarlo(es, point, 20000, 13, {0, false});
    const double exact = EsoesIvRevenue(es, 3.0);
    d << "mc=" << mc.mean_revenue << " exact=" << exact
      << " se=" << mc.std_error;
    return std::abs(mc.mean_revenue - exact) <= 3 * mc.std_error;
  });

  Run(&report, "revenue_at_most_h", [&](std::ostringstream& d) {
    const ValuationDistribution uniform = ValuationDistribution::Uniform(2.8);
    const McReport mc = MonteCarlo(lin, uniform, 2000, 17, {1, true});
    double top = 0.0;
    for (const RunOutcome& r : mc.per_run) top = std::max(top, r.revenue());
    d << "max_revenue=" << top;
    return top <= 2.8;
  });

  return report;
}

}  // namespace postprice
