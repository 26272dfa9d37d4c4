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

// Initial-valuation distributions on [1, h] and the order-statistic laws
// built from them:
//
//   X_m  max of Poisson(m) initial valuations    F_X(x) = exp(-m (1 - F(x)))
//   Z    V * U with U ~ Uniform(0, 1)
//   Y_m  max of Poisson(m) linearly discounted   F_Y(x) = exp(-m (1 - F_Z(x)))
//
// The maximum over an empty arrival set is 0, which makes the closed forms
// exact for every x >= 0.

#ifndef POSTPRICE_VALUATION_H_
#define POSTPRICE_VALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "postprice/numerics.h"
#include "postprice/random.h"

namespace postprice {

enum class ValuationKind { kPoint, kUniform, kTruncatedNormal };

std::string ToString(ValuationKind kind);

class ValuationDistribution {
 public:
  static ValuationDistribution Point(double h, double value);
  static ValuationDistribution Uniform(double h);
  // Normal(mean, variance) restricted to [1, h] and renormalized.
  static ValuationDistribution TruncatedNormal(double h, double mean,
                                               double variance);
  // The truncated normal with mean (h - 1) / 2 and variance 2.
  static ValuationDistribution DefaultTruncatedNormal(double h);

  static ValuationDistribution FromJson(const nlohmann::json& config);
  nlohmann::json ToJson() const;

  ValuationKind kind() const { return kind_; }
  double h() const { return h_; }
  bool has_density() const { return kind_ != ValuationKind::kPoint; }
  double point_value() const { return point_value_; }
  double mean_param() const { return mean_; }
  double variance_param() const { return sigma_ * sigma_; }

  double Cdf(double x) const;
  // Throws std::invalid_argument for the point kind.
  double Pdf(double x) const;
  double Quantile(double u) const;
  double Sample(Rng& rng) const;

 private:
  ValuationDistribution(ValuationKind kind, double h) : kind_(kind), h_(h) {}

  double StandardizedCdf(double x) const;

  ValuationKind kind_;
  double h_;
  double point_value_ = 0.0;
  double mean_ = 0.0;
  double sigma_ = 1.0;
  double phi_lo_ = 0.0;
  double phi_mass_ = 1.0;
};

double NormalCdf(double z);
double NormalQuantile(double p);

struct HazardReport {
  std::vector<double> grid;
  std::vector<double> hazard;
  bool is_monotone_nondecreasing = true;
  std::optional<double> first_violation;
};

double HazardRate(const ValuationDistribution& dist, double x);

// Hazard f / (1 - F) on an equispaced interior grid of [1, h]; the end
// margins are (h - 1) / (10 n_grid).
HazardReport HazardCheck(const ValuationDistribution& dist, int n_grid);

// CDF of X_m with m = arrival_mass (expected number of arrivals).
double MaxOrderCdf(const ValuationDistribution& dist, double arrival_mass,
                   double x);
// Hazard rate of X_m, m H(x) (1 - F) / (exp(m (1 - F)) - 1).
double MaxOrderHazard(const ValuationDistribution& dist, double arrival_mass,
                      double x);
double ExpectedMax(const ValuationDistribution& dist, double arrival_mass,
                   const Tolerance& tol = Tolerance::Quadrature());

struct LnRatioCheck {
  double lhs;
  double rhs;
  bool holds;
};

// E[X_m] / E[X_m'] against ln(m) / ln(m') for 1 < m <= m'.
LnRatioCheck LnRatioInequalityCheck(const ValuationDistribution& dist,
                                    double mass, double larger_mass);

// CDF of Z = V U.
double ProductCdf(const ValuationDistribution& dist, double x);
// CDF of Y_m under a linear discount.
double MaxDiscountedCdf(const ValuationDistribution& dist, double arrival_mass,
                        double x);
double ExpectedMaxDiscounted(const ValuationDistribution& dist,
                             double arrival_mass,
                             const Tolerance& tol = Tolerance::Quadrature());

}  // namespace postprice

#endif  // POSTPRICE_VALUATION_H_
