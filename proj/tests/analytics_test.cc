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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "postprice/simulator.h"
#include "postprice/valuation.h"

namespace postprice {
namespace {

const MarketParams kRef{10.0, 12.0, 2.8};

// Revenue of a time-indexed strategy against a single valuation by a
// midpoint sweep: the first buying instant in the buy set wins, so the
// density at t is p(t) lambda exp(-lambda * |buy set before t|).
double SweepRevenue(const PricingStrategy& s, double v, int cells) {
  const double rate = s.params().arrival_rate;
  const double horizon = s.params().horizon;
  const double w = horizon / cells;
  double covered = 0.0, revenue = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double t = (i + 0.5) * w;
    const double price = s.PriceAt(t);
    if (v * s.discount()(t) >= price) {
      revenue += price * std::exp(-rate * covered) * -std::expm1(-rate * w);
      covered += w;
    }
  }
  return revenue;
}

TEST(KStarTest, ConstantDiscount) {
  for (double lambda : {0.3, 2.0, 7.0}) {
    const MarketParams p{lambda, 4.0, 3.0};
    EXPECT_NEAR(KStar(p, MakeConstantDiscount(4.0)),
                1 - std::exp(-lambda * 4.0), 1e-15);
  }
}

TEST(KStarTest, LinearDiscount) {
  EXPECT_NEAR(KStar({1.0, 1.0, 2.0}, MakeLinearDiscount(1.0)),
              std::exp(-1.0), 1e-12);
  for (double lt : {50.0, 400.0, 10240.0}) {
    const MarketParams p{lt / 10, 10.0, 2.0};
    EXPECT_NEAR(KStar(p, MakeLinearDiscount(10.0)),
                1 - (1 - std::exp(-lt)) / lt, 1e-10);
  }
}

TEST(KStarTest, SmallerDiscountSmallerBenchmark) {
  const MarketParams p{2.0, 6.0, 3.0};
  const double squared = KStar(
      p, MakeCustomDiscount(6.0, [](double t) { return std::pow(1 - t / 6, 2); }));
  const double lin = KStar(p, MakeLinearDiscount(6.0));
  const double one = KStar(p, MakeConstantDiscount(6.0));
  EXPECT_LT(squared, lin);
  EXPECT_LT(lin, one);
}

TEST(IvRevenueTest, BenchmarkEarnsVTimesKStar) {
  const DiscountFunction xi = MakeLinearDiscount(12.0);
  for (double v : {1.0, 1.9, 2.8}) {
    const PricingStrategy b = BuildBenchmarkIv(kRef, xi, v);
    EXPECT_NEAR(ExpectedRevenueIv(b, v), v * KStar(kRef, xi), 1e-10);
    EXPECT_NEAR(RatioIv(b, v), 1.0, 1e-10);
  }
}

TEST(IvRevenueTest, PriceAboveValuationNeverSells) {
  const DiscountFunction xi = MakeLinearDiscount(12.0);
  const PricingStrategy top =
      MakeCustomStrategy(kRef, xi, [xi](double t) { return 2.8 * xi(t); });
  EXPECT_EQ(ExpectedRevenueIv(top, 2.0), 0.0);
  EXPECT_EQ(RatioIv(top, 2.0), 0.0);
}

TEST(IvRevenueTest, ConstantRatioLaw) {
  const PricingStrategy s = BuildMcLin(kRef);
  const double k = s.mc_meta().unit_revenue;
  EXPECT_LT(std::abs(ExpectedRevenueIv(s, 1.7) / 1.7 - k), 1e-6 * k);
  const double rho = CompetitiveRatioMc(s.mc_meta(), kRef).rho;
  for (int i = 0; i < 9; ++i) {
    const double v = 1.0 + 1.8 * i / 8;
    EXPECT_NEAR(RatioIv(s, v), rho, 1e-6 * rho) << "v=" << v;
  }
}

TEST(IvRevenueTest, RevenueNonDecreasingInValuation) {
  const PricingStrategy s = BuildMcGeneral({2.0, 10.0, 10.0}, MakeConstantDiscount(10.0));
  const RevenueCurve c = IvRevenueCurve(s, ValuationGrid(10.0, 0.25));
  for (size_t i = 1; i < c.revenue.size(); ++i) {
    EXPECT_GE(c.revenue[i], c.revenue[i - 1]);
    EXPECT_GE(c.revenue[i], 0.0);
  }
}

TEST(IvRevenueTest, FirstAcceptTime) {
  const PricingStrategy s = BuildMcLin(kRef);
  EXPECT_EQ(FirstAcceptTime(s, 2.8), 0.0);
  const double t = FirstAcceptTime(s, 1.0);
  EXPECT_NEAR(t, s.switch_time(), 1e-9);
  const double mid = FirstAcceptTime(s, 2.0);
  EXPECT_NEAR(s.UndiscountedPriceAt(mid), 2.0, 1e-8);
}

TEST(IvRevenueTest, MpcMatchesSweep) {
  for (const DiscountFunction& xi :
       {MakeLinearDiscount(12.0), MakeConstantDiscount(12.0)}) {
    const PricingStrategy s = MpcFromNsub(kRef, xi, 3);
    for (double v : {1.0, 1.3, 1.9, 2.8}) {
      EXPECT_NEAR(ExpectedRevenueIv(s, v), SweepRevenue(s, v, 2'000'000),
                  2e-5)
          << "v=" << v;
    }
  }
}

TEST(IvRevenueTest, McMatchesSweep) {
  const PricingStrategy s = BuildMcLin(kRef);
  EXPECT_NEAR(ExpectedRevenueIv(s, 2.1), SweepRevenue(s, 2.1, 2'000'000), 2e-5);
}

TEST(IvRevenueTest, RisingUndiscountedPriceUnsupported) {
  const DiscountFunction xi = MakeConstantDiscount(12.0);
  const PricingStrategy bump = MakeCustomStrategy(
      kRef, xi, [](double t) { return 1.0 + std::abs(t - 6.0) / 6.0; });
  EXPECT_GT(UndiscountedIncrease(bump), 0.0);
  EXPECT_THROW(ExpectedRevenueIv(bump, 1.5), UnsupportedError);
}

TEST(IvRevenueTest, ValuationOutsideRangeRejected) {
  const PricingStrategy s = BuildMcLin(kRef);
  EXPECT_THROW(ExpectedRevenueIv(s, 0.5), std::invalid_argument);
  EXPECT_THROW(ExpectedRevenueIv(s, 3.0), std::invalid_argument);
}

// P(N >= i) by summing the pmf from 0 upwards.
double TailByComplement(double mean, int i) {
  double pmf = std::exp(-mean), below = 0.0;
  for (int j = 0; j < i; ++j) {
    below += pmf;
    pmf *= mean / (j + 1);
  }
  return 1.0 - below;
}

TEST(EsoesRevenueTest, MatchesPoissonTail) {
  const MarketParams p{2.0, 5.0, 10.0};
  const PricingStrategy s = BuildEsoesSs(p);
  // Ladder 5, 2.5, 1.25, 1 over blocks of 2.5 agents.
  EXPECT_NEAR(EsoesIvRevenue(s, 10.0), 5.0 * TailByComplement(10.0, 1), 1e-12);
  EXPECT_NEAR(EsoesIvRevenue(s, 3.0), 2.5 * TailByComplement(10.0, 3), 1e-12);
  EXPECT_NEAR(EsoesIvRevenue(s, 1.0), 1.0 * TailByComplement(10.0, 8), 1e-12);
}

TEST(EsoesRevenueTest, NeedsUndiscountedMarket) {
  const MarketParams p{2.0, 5.0, 10.0};
  const PricingStrategy s = BuildEsoesSs(p, 2.0, MakeLinearDiscount(5.0));
  EXPECT_THROW(ExpectedRevenueIv(s, 2.0), UnsupportedError);
}

TEST(EsoesRevenueTest, LargeMarketTail) {
  const MarketParams p{20.0, 50.0, 10.0};
  const PricingStrategy s = BuildEsoesSs(p);
  EXPECT_NEAR(EsoesIvRevenue(s, 10.0), 5.0, 1e-12);
  EXPECT_NEAR(EsoesIvRevenue(s, 1.0), 1.0 * TailByComplement(1000.0, 751), 1e-9);
}

TEST(ValuationGridTest, HalfSteps) {
  const std::vector<double> g = ValuationGrid(10.0);
  ASSERT_EQ(g.size(), 19u);
  for (size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], 1.0 + 0.5 * i);
  const std::vector<double> odd = ValuationGrid(2.8);
  EXPECT_EQ(odd.back(), 2.8);
  EXPECT_EQ(odd.size(), 5u);
}

TEST(LossIndicesTest, IdenticalAndShifted) {
  RevenueCurve a{{1, 2, 3}, {1.0, 1.5, 2.0}, {1, 1, 1}};
  const LossIndices same = ComputeLossIndices(a, a, 10.0);
  EXPECT_EQ(same.max_loss_b_vs_a, 0.0);
  EXPECT_EQ(same.max_loss_a_vs_b, 0.0);
  RevenueCurve b = a;
  for (double& r : a.revenue) r += 0.5;
  const LossIndices shifted = ComputeLossIndices(a, b, 10.0);
  EXPECT_NEAR(shifted.max_loss_b_vs_a, 0.05, 1e-15);
  EXPECT_EQ(shifted.max_loss_a_vs_b, 0.0);
}

TEST(LossIndicesTest, GridMismatch) {
  const RevenueCurve a{{1, 2}, {1, 1}, {1, 1}};
  const RevenueCurve b{{1, 2.5}, {1, 1}, {1, 1}};
  EXPECT_THROW(ComputeLossIndices(a, b, 3.0), std::invalid_argument);
}

TEST(RevenueCurveTest, Csv) {
  const RevenueCurve c{{1, 1.5}, {0.5, 0.75}, {0.9, 0.9}};
  std::ostringstream out;
  c.WriteCsv(out);
  EXPECT_EQ(out.str(), "v,revenue,ratio\n1,0.5,0.90000000000000002\n"
                       "1.5,0.75,0.90000000000000002\n");
}

class MonteCarloAgreementTest
    : public ::testing::TestWithParam<std::tuple<std::string, double>> {};

TEST_P(MonteCarloAgreementTest, ExactWithinThreeStandardErrors) {
  const auto& [name, fraction] = GetParam();
  const DiscountFunction xi = MakeLinearDiscount(12.0);
  const double v = 1.0 + fraction * 1.8;
  const PricingStrategy s = name == "benchmark" ? BuildBenchmarkIv(kRef, xi, v)
                            : name == "mc_lin"  ? BuildMcLin(kRef)
                                                : MpcFromNsub(kRef, xi, 4);
  const McReport mc = MonteCarlo(s, ValuationDistribution::Point(2.8, v),
                                 100000, 1234, {0, false});
  EXPECT_NEAR(mc.mean_revenue, ExpectedRevenueIv(s, v), 3 * mc.std_error);
}

INSTANTIATE_TEST_SUITE_P(
    Strategies, MonteCarloAgreementTest,
    ::testing::Combine(::testing::Values("benchmark", "mc_lin", "mpc"),
                       ::testing::Values(0.0, 0.5, 1.0)));

}  // namespace
}  // namespace postprice
