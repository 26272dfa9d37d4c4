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

#include "postprice/valuation.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace postprice {
namespace {

// Kolmogorov distance between samples and a CDF. Tied samples (the atom at
// 0 for an empty arrival set) are compared against both one-sided limits.
double KsDistance(std::vector<double> samples,
                  const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = samples.size();
  double d = 0.0;
  for (size_t i = 0; i < samples.size();) {
    size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double x = samples[i];
    const double below = cdf(std::nextafter(x, -HUGE_VAL));
    d = std::max({d, std::abs(j / n - cdf(x)), std::abs(i / n - below)});
    i = j;
  }
  return d;
}

// Max of Poisson(mass) draws; 0 when there are none. Uses its own
// std::poisson_distribution so the count path is independent of the
// library's arrival sampler.
double SampleMax(const ValuationDistribution& dist, double mass, Rng& rng) {
  std::poisson_distribution<int> count(mass);
  const int n = count(rng);
  double best = 0.0;
  for (int i = 0; i < n; ++i) best = std::max(best, dist.Sample(rng));
  return best;
}

TEST(DistributionTest, UniformCdfAndPdf) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  EXPECT_EQ(u.Cdf(1.0), 0.0);
  EXPECT_EQ(u.Cdf(10.0), 1.0);
  EXPECT_NEAR(u.Cdf(5.5), 0.5, 1e-15);
  EXPECT_NEAR(u.Pdf(3.0), 1.0 / 9, 1e-15);
  EXPECT_NEAR(u.Quantile(0.25), 3.25, 1e-14);
}

TEST(DistributionTest, PointMass) {
  const ValuationDistribution p = ValuationDistribution::Point(10.0, 2.5);
  EXPECT_EQ(p.Cdf(2.4), 0.0);
  EXPECT_EQ(p.Cdf(2.5), 1.0);
  EXPECT_THROW(p.Pdf(2.5), std::invalid_argument);
  Rng rng = MakeStream(1, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(p.Sample(rng), 2.5);
  EXPECT_THROW(ValuationDistribution::Point(10.0, 11.0), std::invalid_argument);
}

TEST(DistributionTest, TruncatedNormalSupport) {
  const ValuationDistribution n = ValuationDistribution::DefaultTruncatedNormal(10.0);
  EXPECT_EQ(n.mean_param(), 4.5);
  EXPECT_NEAR(n.variance_param(), 2.0, 1e-15);
  EXPECT_EQ(n.Cdf(1.0), 0.0);
  EXPECT_EQ(n.Cdf(10.0), 1.0);
  const double mass = Integrate([&](double x) { return n.Pdf(x); }, 1.0, 10.0);
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(DistributionTest, CdfNonDecreasing) {
  const ValuationDistribution kinds[] = {
      ValuationDistribution::Uniform(6.0),
      ValuationDistribution::Point(6.0, 4.0),
      ValuationDistribution::DefaultTruncatedNormal(6.0)};
  for (const auto& d : kinds) {
    double prev = -1.0;
    for (int i = 0; i <= 600; ++i) {
      const double x = 6.0 * i / 600;
      const double f = d.Cdf(x);
      EXPECT_GE(f, prev);
      prev = f;
      if (i > 0) {
        EXPECT_LE(ProductCdf(d, x - 0.01), ProductCdf(d, x) + 1e-12);
        EXPECT_LE(MaxOrderCdf(d, 3.0, x - 0.01), MaxOrderCdf(d, 3.0, x));
        EXPECT_LE(MaxDiscountedCdf(d, 3.0, x - 0.01),
                  MaxDiscountedCdf(d, 3.0, x) + 1e-12);
      }
    }
  }
}

TEST(DistributionTest, JsonRoundTrip) {
  const nlohmann::json config = {
      {"valuation", {{"kind", "truncated_normal"}, {"h", 8}, {"mu", 3}, {"sigma2", 2}}}};
  const ValuationDistribution d = ValuationDistribution::FromJson(config);
  EXPECT_EQ(d.kind(), ValuationKind::kTruncatedNormal);
  EXPECT_EQ(d.mean_param(), 3.0);
  const ValuationDistribution again = ValuationDistribution::FromJson(d.ToJson());
  EXPECT_EQ(again.h(), 8.0);
  EXPECT_NEAR(again.variance_param(), 2.0, 1e-15);
}

TEST(SampleTest, UniformMean) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  Rng rng = MakeStream(11, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += u.Sample(rng);
  const double se = std::sqrt(81.0 / 12 / n);
  EXPECT_NEAR(sum / n, 5.5, 3 * se);
}

TEST(SampleTest, TruncatedNormalInverseCdf) {
  const ValuationDistribution d = ValuationDistribution::DefaultTruncatedNormal(10.0);
  Rng rng = MakeStream(12, 0);
  std::vector<double> draws(1'000'000);
  for (double& x : draws) x = d.Sample(rng);
  EXPECT_LT(KsDistance(draws, [&](double x) { return d.Cdf(x); }), 0.005);
}

TEST(NormalTest, QuantileInvertsCdf) {
  for (double p : {1e-10, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-12 + 1e-9 * p);
  }
  EXPECT_NEAR(NormalQuantile(0.975), 1.959963984540054, 1e-12);
}

TEST(HazardTest, UniformIsMonotone) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  const HazardReport r = HazardCheck(u, 64);
  EXPECT_TRUE(r.is_monotone_nondecreasing);
  EXPECT_FALSE(r.first_violation.has_value());
  EXPECT_GT(r.grid.front(), 1.0);
  EXPECT_LT(r.grid.back(), 10.0);
  for (size_t i = 0; i < r.grid.size(); ++i) {
    EXPECT_NEAR(r.hazard[i], 1.0 / (10.0 - r.grid[i]), 1e-9 * r.hazard[i]);
  }
}

TEST(HazardTest, UniformPointValue) {
  EXPECT_NEAR(HazardRate(ValuationDistribution::Uniform(2.0), 1.5), 2.0, 1e-12);
}

TEST(HazardTest, TruncatedNormalReported) {
  const HazardReport r =
      HazardCheck(ValuationDistribution::TruncatedNormal(10.0, 4.5, 2.0), 128);
  EXPECT_EQ(r.grid.size(), 128u);
  for (double hz : r.hazard) EXPECT_GE(hz, 0.0);
}

TEST(HazardTest, RejectsPointAndCoarseGrid) {
  EXPECT_THROW(HazardCheck(ValuationDistribution::Point(3.0, 2.0), 32),
               std::invalid_argument);
  EXPECT_THROW(HazardCheck(ValuationDistribution::Uniform(3.0), 8),
               std::invalid_argument);
}

TEST(MaxOrderTest, ClosedFormValues) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  EXPECT_EQ(MaxOrderCdf(u, 4.0, 10.0), 1.0);
  EXPECT_NEAR(MaxOrderCdf(u, 1.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(MaxOrderCdf(u, 2.0, 5.5), std::exp(-1.0), 1e-15);
}

TEST(MaxOrderTest, HazardMonotoneForUniform) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  for (double m : {0.5, 2.0, 8.0, 30.0}) {
    double prev = 0.0;
    for (int i = 0; i < 256; ++i) {
      const double x = 1.0 + 9.0 * (i + 0.5) / 256;
      const double hz = MaxOrderHazard(u, m, x);
      EXPECT_GE(hz, prev - 1e-9) << "m=" << m << " x=" << x;
      prev = hz;
    }
  }
}

TEST(ExpectedMaxTest, PointMassLimit) {
  const ValuationDistribution p = ValuationDistribution::Point(10.0, 3.0);
  EXPECT_NEAR(ExpectedMax(p, 20.0), 3.0 * (1 - std::exp(-20.0)), 1e-8);
}

TEST(ExpectedMaxTest, FewArrivalsNearZero) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  const double value = ExpectedMax(u, 0.01);
  EXPECT_GE(value, 0.0);
  EXPECT_LE(value, 0.1 * 10.0);
  EXPECT_LE(value, 10.0 * -std::expm1(-0.01));
}

TEST(ExpectedMaxTest, MatchesMonteCarlo) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  Rng rng = MakeStream(21, 0);
  const int n = 1'000'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = SampleMax(u, 5.0, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(ExpectedMax(u, 5.0), mean, 3 * se);
}

TEST(ExpectedMaxTest, NonDecreasingAndBounded) {
  const ValuationDistribution u = ValuationDistribution::Uniform(7.0);
  double prev = 0.0;
  for (double m : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
    const double value = ExpectedMax(u, m);
    EXPECT_GE(value, prev);
    EXPECT_LE(value, 7.0);
    prev = value;
  }
}

TEST(MaxOrderTest, EmpiricalCdfMatches) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  Rng rng = MakeStream(22, 0);
  const int n = 100000;
  std::vector<double> draws(n);
  for (double& x : draws) x = SampleMax(u, 3.0, rng);
  EXPECT_LT(KsDistance(draws, [&](double x) { return MaxOrderCdf(u, 3.0, x); }),
            4.0 / std::sqrt(n));
}

TEST(LnRatioTest, EqualArguments) {
  const LnRatioCheck c =
      LnRatioInequalityCheck(ValuationDistribution::Uniform(10.0), 5.0, 5.0);
  EXPECT_NEAR(c.lhs, 1.0, 1e-15);
  EXPECT_NEAR(c.rhs, 1.0, 1e-15);
  EXPECT_TRUE(c.holds);
}

TEST(LnRatioTest, UniformCases) {
  EXPECT_TRUE(
      LnRatioInequalityCheck(ValuationDistribution::Uniform(10.0), 2.0, 8.0).holds);
  EXPECT_TRUE(
      LnRatioInequalityCheck(ValuationDistribution::Uniform(4.0), 1.5, 50.0).holds);
}

TEST(LnRatioTest, RejectsDegenerateMass) {
  EXPECT_THROW(
      LnRatioInequalityCheck(ValuationDistribution::Uniform(4.0), 1.0, 3.0),
      std::invalid_argument);
  EXPECT_THROW(
      LnRatioInequalityCheck(ValuationDistribution::Uniform(4.0), 3.0, 2.0),
      std::invalid_argument);
}

TEST(ProductCdfTest, Values) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  EXPECT_EQ(ProductCdf(u, 0.0), 0.0);
  EXPECT_NEAR(ProductCdf(u, 10.0), 1.0, 1e-12);
  EXPECT_NEAR(ProductCdf(u, 1.0), std::log(10.0) / 9, 1e-10);
  const ValuationDistribution p = ValuationDistribution::Point(10.0, 4.0);
  EXPECT_NEAR(ProductCdf(p, 1.0), 0.25, 1e-15);
  EXPECT_EQ(ProductCdf(p, 5.0), 1.0);
}

TEST(ProductCdfTest, MatchesSampledProduct) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  Rng rng = MakeStream(23, 0);
  const int n = 100000;
  std::vector<double> draws(n);
  for (double& z : draws) z = u.Sample(rng) * Uniform01(rng);
  EXPECT_LT(KsDistance(draws, [&](double x) { return ProductCdf(u, x); }),
            4.0 / std::sqrt(n));
}

TEST(MaxDiscountedTest, Values) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  EXPECT_NEAR(MaxDiscountedCdf(u, 3.0, 10.0), 1.0, 1e-12);
  EXPECT_NEAR(MaxDiscountedCdf(u, 3.0, 0.0), std::exp(-3.0), 1e-15);
  EXPECT_NEAR(MaxDiscountedCdf(u, 5.0, 1.0),
              std::exp(-5.0 * (1 - std::log(10.0) / 9)), 1e-10);
}

TEST(MaxDiscountedTest, ExpectationBelowUndiscounted) {
  const ValuationDistribution u = ValuationDistribution::Uniform(10.0);
  for (double m : {0.5, 5.0, 25.0}) {
    EXPECT_LE(ExpectedMaxDiscounted(u, m), ExpectedMax(u, m));
  }
}

}  // namespace
}  // namespace postprice
