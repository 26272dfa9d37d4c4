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

#include "postprice/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "postprice/analytics.h"
#include "postprice/numerics.h"

namespace postprice {
namespace {

constexpr double kBracketFraction = 1e-9;
constexpr double kPriceFloor = 1e-12;

void RequireScaleBase(double scale_base, double h) {
  if (!(scale_base > 1.0) || scale_base > h * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "scale base delta must lie in (1, h], got delta=" << scale_base
        << " with h=" << h;
    throw std::invalid_argument(msg.str());
  }
}

void RequireMatchingHorizon(const MarketParams& params,
                            const DiscountFunction& discount) {
  if (std::abs(discount.horizon() - params.horizon) >
      1e-12 * params.horizon) {
    std::ostringstream msg;
    msg << "discount horizon " << discount.horizon()
        << " differs from market horizon " << params.horizon;
    throw std::invalid_argument(msg.str());
  }
}

double LogBase(double value, double base) {
  return std::log(value) / std::log(base);
}

// Degenerate h = 1: always post the floor price.
PricingStrategy FloorOnlyStrategy(const MarketParams& params,
                                  const DiscountFunction& discount,
                                  MechanismKind kind) {
  const double k_star = KStar(params, discount);
  McMeta meta{0.0, k_star, 1.0, discount};
  return PricingStrategy(kind, params, discount, meta,
                         [discount](double t) { return discount(t); });
}

}  // namespace

void MarketParams::Validate() const {
  if (!(arrival_rate > 0.0) || !(horizon > 0.0) || !(value_ratio >= 1.0) ||
      !std::isfinite(arrival_rate) || !std::isfinite(horizon) ||
      !std::isfinite(value_ratio)) {
    std::ostringstream msg;
    msg << "market parameters need lambda > 0, T > 0, h >= 1; got lambda="
        << arrival_rate << ", T=" << horizon << ", h=" << value_ratio;
    throw std::invalid_argument(msg.str());
  }
}

nlohmann::json MarketParams::ToJson() const {
  return {{"lambda", arrival_rate}, {"T", horizon}, {"h", value_ratio}};
}

std::string ToString(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kBenchmark:
      return "benchmark";
    case MechanismKind::kMc:
      return "mc";
    case MechanismKind::kMcLin:
      return "mc_lin";
    case MechanismKind::kMpc:
      return "mpc";
    case MechanismKind::kEsoesSs:
      return "esoes_ss";
    case MechanismKind::kCustom:
      return "custom";
  }
  return "unknown";
}

PricingStrategy::PricingStrategy(MechanismKind kind, MarketParams params,
                                 DiscountFunction discount, Meta meta,
                                 std::function<double(double)> price)
    : kind_(kind),
      params_(params),
      discount_(std::move(discount)),
      meta_(std::move(meta)),
      price_(std::move(price)) {}

double PricingStrategy::PriceAt(double t) const {
  if (!time_indexed()) {
    throw std::logic_error(ToString(kind_) + " prices depend on arrival index");
  }
  return price_(std::clamp(t, 0.0, params_.horizon));
}

double PricingStrategy::PriceForArrival(int index, double t) const {
  if (time_indexed()) return PriceAt(t);
  const EsoesSsMeta& meta = std::get<EsoesSsMeta>(meta_);
  if (index < 1) throw std::invalid_argument("arrival index starts at 1");
  if (index > meta.expected_arrivals) return 1.0;
  const int block =
      std::clamp(SnappedCeil(index / meta.block_size), 1, meta.n_blocks);
  return meta.block_prices[block - 1];
}

double PricingStrategy::UndiscountedPriceAt(double t) const {
  const double xi = discount_(t);
  if (!(xi > kPriceFloor)) {
    std::ostringstream msg;
    msg << "undiscounted price undefined where xi(" << t << ")=" << xi;
    throw std::domain_error(msg.str());
  }
  return PriceAt(t) / xi;
}

double PricingStrategy::switch_time() const {
  if (const auto* mc = std::get_if<McMeta>(&meta_)) return mc->switch_time;
  if (const auto* mpc = std::get_if<MpcMeta>(&meta_)) return mpc->switch_time;
  return params_.horizon;
}

const McMeta& PricingStrategy::mc_meta() const {
  return std::get<McMeta>(meta_);
}

const MpcMeta& PricingStrategy::mpc_meta() const {
  return std::get<MpcMeta>(meta_);
}

const EsoesSsMeta& PricingStrategy::esoes_meta() const {
  return std::get<EsoesSsMeta>(meta_);
}

nlohmann::json PricingStrategy::MetadataJson() const {
  nlohmann::json out = {{"kind", ToString(kind_)}, {"t0", nullptr},
                        {"k", nullptr},           {"a", nullptr},
                        {"delta", nullptr},       {"tau", nullptr},
                        {"nsub", nullptr},        {"rho", nullptr}};
  if (const auto* mc = std::get_if<McMeta>(&meta_)) {
    out["t0"] = mc->switch_time;
    out["k"] = mc->unit_revenue;
    out["a"] = mc->front_coefficient;
    out["rho"] = CompetitiveRatioMc(*mc, params_).rho;
  } else if (const auto* mpc = std::get_if<MpcMeta>(&meta_)) {
    out["t0"] = mpc->switch_time;
    out["delta"] = mpc->scale_base;
    out["tau"] = mpc->interval_length;
    out["nsub"] = mpc->n_sub;
  } else if (const auto* esoes = std::get_if<EsoesSsMeta>(&meta_)) {
    out["delta"] = esoes->scale_base;
    out["nsub"] = esoes->n_blocks;
  } else if (const auto* bench = std::get_if<BenchmarkMeta>(&meta_)) {
    out["v"] = bench->valuation;
    out["rho"] = 1.0;
  }
  return out;
}

int SnappedCeil(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(x));
}

int SnappedFloor(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::floor(x));
}

double SwitchUnitRevenue(const MarketParams& params,
                         const DiscountFunction& discount,
                         double switch_time) {
  const double rate = params.arrival_rate;
  const double remaining = params.horizon - switch_time;
  if (remaining <= 0.0) return 0.0;
  return IntegrateDecaying(
      [&](double s) {
        return discount(switch_time + s) * rate * std::exp(-rate * s);
      },
      0.0, remaining, rate);
}

PricingStrategy BuildBenchmarkIv(const MarketParams& params,
                                 const DiscountFunction& discount,
                                 double valuation) {
  params.Validate();
  RequireMatchingHorizon(params, discount);
  if (!(valuation >= 1.0 && valuation <= params.value_ratio)) {
    std::ostringstream msg;
    msg << "benchmark valuation " << valuation << " outside [1, "
        << params.value_ratio << "]";
    throw std::invalid_argument(msg.str());
  }
  return PricingStrategy(
      MechanismKind::kBenchmark, params, discount, BenchmarkMeta{valuation},
      [discount, valuation](double t) { return valuation * discount(t); });
}

double McLinBoundaryUnitRevenue(const MarketParams& params,
                                double switch_time) {
  const double rate = params.arrival_rate;
  const double horizon = params.horizon;
  const double t0 = switch_time;
  return rate * t0 * (2 * horizon - t0) /
         (2 * horizon * (rate * t0 + std::log(params.value_ratio)));
}

double McLinClosedFormUnitRevenue(const MarketParams& params,
                                  double switch_time) {
  const double rate = params.arrival_rate;
  const double horizon = params.horizon;
  return 1.0 - (1.0 + rate * switch_time -
                std::exp(-rate * (horizon - switch_time))) /
                   (rate * horizon);
}

double McLinResidual(const MarketParams& params, double switch_time) {
  return McLinBoundaryUnitRevenue(params, switch_time) -
         McLinClosedFormUnitRevenue(params, switch_time);
}

PricingStrategy BuildMcLin(const MarketParams& params) {
  params.Validate();
  const DiscountFunction discount = MakeLinearDiscount(params.horizon);
  if (params.value_ratio == 1.0) {
    return FloorOnlyStrategy(params, discount, MechanismKind::kMcLin);
  }
  const double horizon = params.horizon;
  const double lo = kBracketFraction * horizon;
  const double hi = horizon - kBracketFraction * horizon;
  double t0;
  try {
    t0 = FindRoot([&](double x) { return McLinResidual(params, x); }, lo, hi);
  } catch (const NumericsError& err) {
    std::ostringstream msg;
    msg << "mc_lin switch time: " << err.what() << " (q(lo)="
        << McLinResidual(params, lo) << ", q(hi)=" << McLinResidual(params, hi)
        << ")";
    throw NumericsError(msg.str(), err.best_estimate());
  }
  const double k = McLinBoundaryUnitRevenue(params, t0);
  const double h = params.value_ratio;
  const double rate = params.arrival_rate;
  McMeta meta{t0, k, h, discount};
  auto price = [=](double t) {
    const double xi = 1.0 - t / horizon;
    if (t >= t0) return xi;
    return h * xi *
           std::exp(rate * (1.0 - 1.0 / k) * t + rate / (2 * k * horizon) * t * t);
  };
  return PricingStrategy(MechanismKind::kMcLin, params, discount, meta, price);
}

namespace {

struct ShotPath {
  double unit_revenue;
  OdePath log_price;  // ln p from t0 back to 0
};

// Integrates d ln p / dt = lambda - lambda xi / k - zeta' / zeta backward
// from ln p(t0) = ln xi(t0).
ShotPath Shoot(const MarketParams& params, const DiscountFunction& discount,
               double switch_time, int steps) {
  const double k = SwitchUnitRevenue(params, discount, switch_time);
  const double rate = params.arrival_rate;
  auto rhs = [&](double t, double) {
    return rate - rate * discount(t) / k - discount.LogZetaSlope(t);
  };
  return {k, IntegrateOde(rhs, switch_time, 0.0,
                          std::log(discount(switch_time)), steps)};
}

}  // namespace

PricingStrategy BuildMcGeneral(const MarketParams& params,
                               const DiscountFunction& discount,
                               const ShootingOptions& options) {
  params.Validate();
  RequireMatchingHorizon(params, discount);
  if (params.value_ratio == 1.0) {
    return FloorOnlyStrategy(params, discount, MechanismKind::kMc);
  }
  const double horizon = params.horizon;
  const double log_h = std::log(params.value_ratio);
  const int steps = options.ode_steps;

  // ln p(0) - ln h as a function of the candidate switch time. A vanishing k
  // sends p(0) to infinity, which is "above h".
  auto shoot = [&](double t0) {
    const ShotPath shot = Shoot(params, discount, t0, steps);
    return shot.log_price.back() - log_h;
  };
  auto safe_shoot = [&](double t0) -> std::optional<double> {
    try {
      if (!(SwitchUnitRevenue(params, discount, t0) > 0.0)) {
        return std::numeric_limits<double>::max();
      }
      const double value = shoot(t0);
      if (std::isnan(value)) return std::nullopt;
      return std::isinf(value) ? std::copysign(
                                     std::numeric_limits<double>::max(), value)
                               : value;
    } catch (const NumericsError&) {
      return std::nullopt;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };

  const double lo = kBracketFraction * horizon;
  const std::optional<double> f_lo = safe_shoot(lo);
  // Back the upper end off the horizon until the shot is computable.
  double hi = horizon - kBracketFraction * horizon;
  std::optional<double> f_hi = safe_shoot(hi);
  for (double gap = 1e-6; !f_hi && gap < 0.5; gap *= 10) {
    hi = horizon - gap * horizon;
    f_hi = safe_shoot(hi);
  }
  if (!f_lo || !f_hi || std::signbit(*f_lo) == std::signbit(*f_hi)) {
    std::ostringstream msg;
    msg << "mc shooting has no sign change: shoot(" << lo << ")="
        << (f_lo ? std::to_string(*f_lo) : "n/a") << ", shoot(" << hi
        << ")=" << (f_hi ? std::to_string(*f_hi) : "n/a");
    throw NumericsError(msg.str(), lo);
  }
  const double t0 = FindRoot(
      [&](double x) {
        const std::optional<double> value = safe_shoot(x);
        if (!value) {
          std::ostringstream msg;
          msg << "mc shot failed at t0=" << x;
          throw NumericsError(msg.str(), x, x);
        }
        return *value;
      },
      lo, hi);

  auto shot = std::make_shared<const ShotPath>(
      Shoot(params, discount, t0, steps));
  McMeta meta{t0, shot->unit_revenue, std::exp(shot->log_price.back()),
              discount};
  auto price = [shot, discount, t0](double t) {
    if (t >= t0) return discount(t);
    return std::exp(shot->log_price.Interpolate(t));
  };
  return PricingStrategy(MechanismKind::kMc, params, discount, meta, price);
}

RatioReport CompetitiveRatioMc(const McMeta& meta, const MarketParams& params) {
  const double k_star = KStar(params, meta.discount);
  const double k = SwitchUnitRevenue(params, meta.discount, meta.switch_time);
  RatioReport report{k / k_star, k, k_star, std::nullopt};
  if (meta.discount.kind() == DiscountKind::kLinear) {
    const double rate = params.arrival_rate;
    const double horizon = params.horizon;
    const double closed =
        McLinClosedFormUnitRevenue(params, meta.switch_time) /
        (1.0 - (1.0 - std::exp(-rate * horizon)) / (rate * horizon));
    report.closed_form = closed;
    if (std::abs(closed - report.rho) > 1e-9) {
      std::ostringstream msg;
      msg << "competitive ratio mismatch: quadrature " << report.rho
          << " vs closed form " << closed;
      throw std::logic_error(msg.str());
    }
  }
  return report;
}

double DefaultSwitchTime(const MarketParams& params,
                         const DiscountFunction& discount) {
  if (discount.kind() == DiscountKind::kLinear) {
    return BuildMcLin(params).switch_time();
  }
  return BuildMcGeneral(params, discount).switch_time();
}

PricingStrategy BuildMpc(const MarketParams& params,
                         const DiscountFunction& discount, double scale_base,
                         double switch_time) {
  params.Validate();
  RequireMatchingHorizon(params, discount);
  const double h = params.value_ratio;
  const double horizon = params.horizon;
  RequireScaleBase(scale_base, h);
  if (!(switch_time > 0.0 && switch_time < horizon)) {
    std::ostringstream msg;
    msg << "mpc switch time must lie in (0, T), got " << switch_time;
    throw std::invalid_argument(msg.str());
  }
  const double levels = LogBase(h, scale_base);
  const int n_sub = std::max(1, SnappedCeil(levels));
  const int full_levels = SnappedFloor(levels);
  const double tau = switch_time / n_sub;
  const int n_intervals = std::max(n_sub + 1, SnappedCeil(horizon / tau));

  std::vector<double> schedule(n_intervals);
  for (int i = 1; i <= n_intervals; ++i) {
    double price;
    if (i <= full_levels && i < n_sub) {
      price = h / std::pow(scale_base, i) * discount(i * tau);
    } else if (i < n_intervals) {
      price = discount(i * tau);
    } else {
      price = discount((i - 1) * tau);
    }
    schedule[i - 1] = price;
  }

  MpcMeta meta{scale_base, tau,      n_sub,   n_intervals,
               switch_time, schedule, discount};
  auto table = std::make_shared<const std::vector<double>>(schedule);
  auto price = [table, tau, n_intervals](double t) {
    const int i = std::clamp(static_cast<int>(std::floor(t / tau)) + 1, 1,
                             n_intervals);
    return (*table)[i - 1];
  };
  return PricingStrategy(MechanismKind::kMpc, params, discount, meta, price);
}

PricingStrategy BuildMpc(const MarketParams& params,
                         const DiscountFunction& discount, double scale_base) {
  return BuildMpc(params, discount, scale_base,
                  DefaultSwitchTime(params, discount));
}

PricingStrategy MpcFromNsub(const MarketParams& params,
                            const DiscountFunction& discount, int n_sub,
                            double switch_time) {
  if (n_sub < 1) throw std::invalid_argument("n_sub must be >= 1");
  const double scale_base = std::pow(params.value_ratio, 1.0 / n_sub);
  return BuildMpc(params, discount, scale_base, switch_time);
}

PricingStrategy MpcFromNsub(const MarketParams& params,
                            const DiscountFunction& discount, int n_sub) {
  return MpcFromNsub(params, discount, n_sub,
                     DefaultSwitchTime(params, discount));
}

PricingStrategy BuildEsoesSs(const MarketParams& params, double scale_base) {
  return BuildEsoesSs(params, scale_base, MakeConstantDiscount(params.horizon));
}

PricingStrategy BuildEsoesSs(const MarketParams& params, double scale_base,
                             const DiscountFunction& discount) {
  params.Validate();
  RequireMatchingHorizon(params, discount);
  const double h = params.value_ratio;
  RequireScaleBase(scale_base, h);
  const double expected = params.expected_arrivals();
  const int n_blocks = std::max(1, SnappedCeil(LogBase(h, scale_base)));
  std::vector<double> prices(n_blocks);
  for (int j = 1; j <= n_blocks; ++j) {
    prices[j - 1] = std::max(h / std::pow(scale_base, j), 1.0);
  }
  EsoesSsMeta meta{expected, scale_base, n_blocks, expected / n_blocks,
                   prices};
  return PricingStrategy(MechanismKind::kEsoesSs, params, discount, meta,
                         nullptr);
}

PricingStrategy MakeCustomStrategy(const MarketParams& params,
                                   const DiscountFunction& discount,
                                   std::function<double(double)> price) {
  params.Validate();
  RequireMatchingHorizon(params, discount);
  return PricingStrategy(MechanismKind::kCustom, params, discount,
                         std::monostate{}, std::move(price));
}

double KappaTau(const PricingStrategy& strategy, double tau, int n_grid) {
  const double horizon = strategy.params().horizon;
  if (!(tau > 0.0 && tau <= horizon)) {
    throw std::invalid_argument("KappaTau needs tau in (0, T]");
  }
  if (n_grid < 2) throw std::invalid_argument("KappaTau needs n_grid >= 2");
  const double s_max = std::min(horizon - tau, strategy.switch_time());
  double kappa = 1.0;
  for (int j = 0; j < n_grid; ++j) {
    const double s = s_max * j / (n_grid - 1);
    const double later = strategy.PriceAt(s + tau);
    if (later < kPriceFloor) continue;
    kappa = std::max(kappa, strategy.PriceAt(s) / later);
  }
  return kappa;
}

double MinWindowArrivals() { return 1.0 - std::log(std::numbers::e - 1.0); }

double WindowLength(const MarketParams& params, double epsilon) {
  return std::pow(params.horizon, 1.0 - epsilon) *
         std::pow(params.arrival_rate, -epsilon);
}

namespace {

LowerBound WindowFor(const MarketParams& params, double epsilon) {
  params.Validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    std::ostringstream msg;
    msg << "epsilon must lie in (0, 1), got " << epsilon;
    throw std::invalid_argument(msg.str());
  }
  const double lambda_tau = std::pow(params.expected_arrivals(), 1.0 - epsilon);
  if (lambda_tau < MinWindowArrivals()) {
    std::ostringstream msg;
    msg << "window holds lambda*tau=" << lambda_tau
        << " expected arrivals, below the threshold 1 - ln(e - 1)="
        << MinWindowArrivals();
    throw std::invalid_argument(msg.str());
  }
  return {0.0, WindowLength(params, epsilon), lambda_tau};
}

}  // namespace

LowerBound LowerBoundMc(const McMeta& meta, const MarketParams& params,
                        double epsilon, double kappa) {
  LowerBound bound = WindowFor(params, epsilon);
  if (!(kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
  bound.value = meta.discount(meta.switch_time + bound.tau) * (1.0 - epsilon) /
                (kappa * std::numbers::e);
  return bound;
}

LowerBound LowerBoundMpc(const MpcMeta& meta, const MarketParams& params,
                         double epsilon) {
  LowerBound bound = WindowFor(params, epsilon);
  bound.value = meta.discount((meta.n_sub + 1) * bound.tau) * (1.0 - epsilon) /
                (meta.scale_base * std::numbers::e);
  return bound;
}

std::optional<double> LargestAdmissibleEpsilon(
    const MarketParams& params, const std::vector<double>& grid) {
  std::optional<double> best;
  for (double eps : grid) {
    if (!(eps > 0.0 && eps < 1.0)) continue;
    if (std::pow(params.expected_arrivals(), 1.0 - eps) < MinWindowArrivals()) {
      continue;
    }
    if (!best || eps > *best) best = eps;
  }
  return best;
}

std::vector<double> DefaultEpsilonGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

double T0UpperBound(const MarketParams& params) {
  params.Validate();
  const double log_h = std::log(params.value_ratio);
  return (-log_h + std::sqrt(2 * params.expected_arrivals() * log_h +
                             log_h * log_h)) /
         params.arrival_rate;
}

}  // namespace postprice
