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

// Posted-price mechanisms for one item sold over [0, T] to Poisson(lambda)
// arrivals with valuations in [1, h]:
//
//   benchmark   p(t) = v xi(t), optimal when every agent values v
//   mc          constant-ratio mechanism for a general discount, built by
//               shooting on the switch time t0
//   mc_lin      closed form of mc under a linear discount
//   mpc         piecewise-constant geometric price ladder over [0, t0]
//   esoes_ss    arrival-index price ladder sized for lambda * T agents
//
// After t0 every time-indexed mechanism posts the floor price xi(t).

#ifndef POSTPRICE_MECHANISMS_H_
#define POSTPRICE_MECHANISMS_H_

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "postprice/discount.h"

namespace postprice {

struct MarketParams {
  double arrival_rate = 1.0;  // agents per unit time
  double horizon = 1.0;       // selling period length
  double value_ratio = 1.0;   // v_max / v_min

  void Validate() const;
  double expected_arrivals() const { return arrival_rate * horizon; }
  nlohmann::json ToJson() const;
};

enum class MechanismKind { kBenchmark, kMc, kMcLin, kMpc, kEsoesSs, kCustom };

std::string ToString(MechanismKind kind);

struct BenchmarkMeta {
  double valuation;
};

struct McMeta {
  double switch_time;        // t0
  double unit_revenue;       // k: expected revenue per unit of valuation
  double front_coefficient;  // a = p(0)
  DiscountFunction discount;
};

struct MpcMeta {
  double scale_base;       // delta
  double interval_length;  // tau = t0 / n_sub
  int n_sub;               // ceil(log_delta h)
  int n_intervals;         // ceil(T / tau)
  double switch_time;
  // schedule[i - 1] is the price on I_i = [(i - 1) tau, min(i tau, T)].
  std::vector<double> schedule;
  DiscountFunction discount;
};

struct EsoesSsMeta {
  double expected_arrivals;  // lambda * T
  double scale_base;
  int n_blocks;
  double block_size;
  std::vector<double> block_prices;
};

class PricingStrategy {
 public:
  using Meta = std::variant<std::monostate, BenchmarkMeta, McMeta, MpcMeta,
                            EsoesSsMeta>;

  PricingStrategy(MechanismKind kind, MarketParams params,
                  DiscountFunction discount, Meta meta,
                  std::function<double(double)> price);

  MechanismKind kind() const { return kind_; }
  const MarketParams& params() const { return params_; }
  const DiscountFunction& discount() const { return discount_; }
  const Meta& meta() const { return meta_; }

  bool time_indexed() const { return kind_ != MechanismKind::kEsoesSs; }

  // Throws std::logic_error for arrival-indexed strategies.
  double PriceAt(double t) const;
  // Price offered to the index-th arrival (1-based) at time t.
  double PriceForArrival(int index, double t) const;
  // p(t) / xi(t). Throws where xi(t) <= 1e-12.
  double UndiscountedPriceAt(double t) const;

  // t0 for mc, mc_lin and mpc; T otherwise.
  double switch_time() const;

  const McMeta& mc_meta() const;
  const MpcMeta& mpc_meta() const;
  const EsoesSsMeta& esoes_meta() const;

  // {kind, t0, k, a, delta, tau, nsub, rho}; absent fields are null.
  nlohmann::json MetadataJson() const;

 private:
  MechanismKind kind_;
  MarketParams params_;
  DiscountFunction discount_;
  Meta meta_;
  std::function<double(double)> price_;
};

// ceil / floor that treat values within 1e-9 of an integer as that integer,
// so that delta = h^(1/n) gives exactly n sub-intervals.
int SnappedCeil(double x);
int SnappedFloor(double x);

// Expected revenue per unit valuation when an agent with valuation 1 faces
// the floor price xi from t0 onwards:
//   k(t0) = integral_0^{T - t0} xi(t0 + s) lambda exp(-lambda s) ds.
double SwitchUnitRevenue(const MarketParams& params,
                         const DiscountFunction& discount, double switch_time);

PricingStrategy BuildBenchmarkIv(const MarketParams& params,
                                 const DiscountFunction& discount,
                                 double valuation);

// k from the boundary conditions p(0) = h, p(t0) = xi(t0), linear discount.
double McLinBoundaryUnitRevenue(const MarketParams& params, double switch_time);
// Closed form of SwitchUnitRevenue for the linear discount.
double McLinClosedFormUnitRevenue(const MarketParams& params,
                                  double switch_time);
// Boundary k minus closed-form k; its root is t0.
double McLinResidual(const MarketParams& params, double switch_time);

PricingStrategy BuildMcLin(const MarketParams& params);

struct ShootingOptions {
  int ode_steps = 4096;
};

PricingStrategy BuildMcGeneral(const MarketParams& params,
                               const DiscountFunction& discount,
                               const ShootingOptions& options = {});

struct RatioReport {
  double rho;
  double unit_revenue;
  double benchmark_unit_revenue;
  // Linear discount only.
  std::optional<double> closed_form;
};

// rho = k / k*. For a linear discount the closed form is evaluated too and
// must agree within 1e-9 (std::logic_error otherwise).
RatioReport CompetitiveRatioMc(const McMeta& meta, const MarketParams& params);

// t0 of the constant-ratio mechanism for the given discount.
double DefaultSwitchTime(const MarketParams& params,
                         const DiscountFunction& discount);

PricingStrategy BuildMpc(const MarketParams& params,
                         const DiscountFunction& discount, double scale_base,
                         double switch_time);
PricingStrategy BuildMpc(const MarketParams& params,
                         const DiscountFunction& discount, double scale_base);
// delta = h^(1 / n_sub).
PricingStrategy MpcFromNsub(const MarketParams& params,
                            const DiscountFunction& discount, int n_sub,
                            double switch_time);
PricingStrategy MpcFromNsub(const MarketParams& params,
                            const DiscountFunction& discount, int n_sub);

PricingStrategy BuildEsoesSs(const MarketParams& params,
                             double scale_base = 2.0);
PricingStrategy BuildEsoesSs(const MarketParams& params, double scale_base,
                             const DiscountFunction& discount);

// Arbitrary time-indexed price function, for fixtures and perturbations.
PricingStrategy MakeCustomStrategy(const MarketParams& params,
                                   const DiscountFunction& discount,
                                   std::function<double(double)> price);

// max p(s) / p(s + tau) over n_grid values of s in [0, min(T - tau, t0)].
// Points where p(s + tau) < 1e-12 are skipped. Always >= 1.
double KappaTau(const PricingStrategy& strategy, double tau, int n_grid = 4096);

struct LowerBound {
  double value;
  double tau;          // T^(1 - eps) lambda^(-eps)
  double lambda_tau;   // (lambda T)^(1 - eps)
};

// 1 - ln(e - 1), the smallest expected arrival count per window the
// random-valuation bounds allow.
double MinWindowArrivals();

// Sliding-window length T^(1 - eps) lambda^(-eps).
double WindowLength(const MarketParams& params, double epsilon);

LowerBound LowerBoundMc(const McMeta& meta, const MarketParams& params,
                        double epsilon, double kappa);
LowerBound LowerBoundMpc(const MpcMeta& meta, const MarketParams& params,
                         double epsilon);

// Largest eps on the grid whose window holds at least MinWindowArrivals()
// expected agents; nullopt if none qualifies.
std::optional<double> LargestAdmissibleEpsilon(const MarketParams& params,
                                               const std::vector<double>& grid);
// eps = 0.05, 0.10, ..., 0.95.
std::vector<double> DefaultEpsilonGrid();

// Upper bound on t0 for the linear discount:
//   (-ln h + sqrt(2 lambda T ln h + ln^2 h)) / lambda.
double T0UpperBound(const MarketParams& params);

}  // namespace postprice

#endif  // POSTPRICE_MECHANISMS_H_
