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
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace postprice {
namespace {

constexpr double kMonotoneSlack = 1e-9;

void RequireRange(double h) {
  if (!(h >= 1.0) || !std::isfinite(h)) {
    std::ostringstream msg;
    msg << "valuation range ratio h must be finite and >= 1, got " << h;
    throw std::invalid_argument(msg.str());
  }
}

void RequireDensity(const ValuationDistribution& dist, const char* op) {
  if (!dist.has_density()) {
    throw std::invalid_argument(std::string(op) +
                                ": unsupported for point distributions");
  }
}

void RequireMass(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    std::ostringstream msg;
    msg << "expected arrival count must be positive, got " << mass;
    throw std::invalid_argument(msg.str());
  }
}

// Breakpoints of the valuation law on [lo, hi], in order.
std::vector<double> Breakpoints(const ValuationDistribution& dist, double lo,
                                double hi) {
  std::vector<double> points = {lo};
  auto add = [&](double x) {
    if (x > points.back() && x < hi) points.push_back(x);
  };
  add(1.0);
  if (dist.kind() == ValuationKind::kPoint) add(dist.point_value());
  points.push_back(hi);
  return points;
}

double IntegratePiecewise(const ScalarFunction& f,
                          const std::vector<double>& points,
                          const Tolerance& tol) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    total += Integrate(f, points[i], points[i + 1], tol);
  }
  return total;
}

}  // namespace

std::string ToString(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::kPoint:
      return "point";
    case ValuationKind::kUniform:
      return "uniform";
    case ValuationKind::kTruncatedNormal:
      return "truncated_normal";
  }
  return "unknown";
}

double NormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("NormalQuantile requires p in [0, 1]");
  }
  // Acklam's rational approximation, then one Halley step on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = NormalCdf(x) - p;
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1 + 0.5 * x * u);
}

ValuationDistribution ValuationDistribution::Point(double h, double value) {
  RequireRange(h);
  if (!(value >= 1.0 && value <= h)) {
    std::ostringstream msg;
    msg << "point valuation " << value << " outside [1, " << h << "]";
    throw std::invalid_argument(msg.str());
  }
  ValuationDistribution dist(ValuationKind::kPoint, h);
  dist.point_value_ = value;
  return dist;
}

ValuationDistribution ValuationDistribution::Uniform(double h) {
  RequireRange(h);
  if (h == 1.0) throw std::invalid_argument("uniform valuations need h > 1");
  return ValuationDistribution(ValuationKind::kUniform, h);
}

ValuationDistribution ValuationDistribution::TruncatedNormal(double h,
                                                             double mean,
                                                             double variance) {
  RequireRange(h);
  if (h == 1.0 || !(variance > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument(
        "truncated normal needs h > 1, finite mean and positive variance");
  }
  ValuationDistribution dist(ValuationKind::kTruncatedNormal, h);
  dist.mean_ = mean;
  dist.sigma_ = std::sqrt(variance);
  dist.phi_lo_ = NormalCdf((1.0 - mean) / dist.sigma_);
  dist.phi_mass_ = NormalCdf((h - mean) / dist.sigma_) - dist.phi_lo_;
  if (!(dist.phi_mass_ > 0.0)) {
    throw std::invalid_argument("truncated normal has no mass on [1, h]");
  }
  return dist;
}

ValuationDistribution ValuationDistribution::DefaultTruncatedNormal(double h) {
  return TruncatedNormal(h, 0.5 * (h - 1.0), 2.0);
}

ValuationDistribution ValuationDistribution::FromJson(
    const nlohmann::json& config) {
  const nlohmann::json& body =
      config.contains("valuation") ? config.at("valuation") : config;
  const std::string kind = body.at("kind").get<std::string>();
  const double h = body.at("h").get<double>();
  if (kind == "point") return Point(h, body.value("v", 1.0));
  if (kind == "uniform") return Uniform(h);
  if (kind == "truncated_normal") {
    return TruncatedNormal(h, body.value("mu", 0.5 * (h - 1.0)),
                           body.value("sigma2", 2.0));
  }
  throw std::invalid_argument("unknown valuation kind '" + kind + "'");
}

nlohmann::json ValuationDistribution::ToJson() const {
  nlohmann::json out = {{"kind", ToString(kind_)}, {"h", h_}};
  if (kind_ == ValuationKind::kPoint) out["v"] = point_value_;
  if (kind_ == ValuationKind::kTruncatedNormal) {
    out["mu"] = mean_;
    out["sigma2"] = sigma_ * sigma_;
  }
  return out;
}

double ValuationDistribution::StandardizedCdf(double x) const {
  return NormalCdf((x - mean_) / sigma_);
}

double ValuationDistribution::Cdf(double x) const {
  switch (kind_) {
    case ValuationKind::kPoint:
      return x < point_value_ ? 0.0 : 1.0;
    case ValuationKind::kUniform:
      if (x <= 1.0) return 0.0;
      if (x >= h_) return 1.0;
      return (x - 1.0) / (h_ - 1.0);
    case ValuationKind::kTruncatedNormal:
      if (x <= 1.0) return 0.0;
      if (x >= h_) return 1.0;
      return std::clamp((StandardizedCdf(x) - phi_lo_) / phi_mass_, 0.0, 1.0);
  }
  return 0.0;
}

double ValuationDistribution::Pdf(double x) const {
  RequireDensity(*this, "Pdf");
  if (x < 1.0 || x > h_) return 0.0;
  if (kind_ == ValuationKind::kUniform) return 1.0 / (h_ - 1.0);
  const double z = (x - mean_) / sigma_;
  return std::exp(-0.5 * z * z) /
         (sigma_ * std::sqrt(2 * std::numbers::pi) * phi_mass_);
}

double ValuationDistribution::Quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  switch (kind_) {
    case ValuationKind::kPoint:
      return point_value_;
    case ValuationKind::kUniform:
      return 1.0 + u * (h_ - 1.0);
    case ValuationKind::kTruncatedNormal: {
      const double p = phi_lo_ + u * phi_mass_;
      if (p <= 0.0) return 1.0;
      if (p >= 1.0) return h_;
      return std::clamp(mean_ + sigma_ * NormalQuantile(p), 1.0, h_);
    }
  }
  return 1.0;
}

double ValuationDistribution::Sample(Rng& rng) const {
  if (kind_ == ValuationKind::kPoint) return point_value_;
  return Quantile(Uniform01(rng));
}

double HazardRate(const ValuationDistribution& dist, double x) {
  RequireDensity(dist, "HazardRate");
  const double survival = 1.0 - dist.Cdf(x);
  if (!(survival > 0.0)) return std::numeric_limits<double>::infinity();
  return dist.Pdf(x) / survival;
}

HazardReport HazardCheck(const ValuationDistribution& dist, int n_grid) {
  RequireDensity(dist, "HazardCheck");
  if (n_grid < 16) throw std::invalid_argument("HazardCheck needs n_grid >= 16");
  const double h = dist.h();
  const double margin = (h - 1.0) / (10.0 * n_grid);
  const double lo = 1.0 + margin;
  const double hi = h - margin;

  HazardReport report;
  report.grid.reserve(n_grid);
  report.hazard.reserve(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double x = lo + (hi - lo) * i / (n_grid - 1);
    const double rate = HazardRate(dist, x);
    if (!report.hazard.empty() && report.is_monotone_nondecreasing &&
        rate < report.hazard.back() - kMonotoneSlack) {
      report.is_monotone_nondecreasing = false;
      report.first_violation = x;
    }
    report.grid.push_back(x);
    report.hazard.push_back(rate);
  }
  return report;
}

double MaxOrderCdf(const ValuationDistribution& dist, double arrival_mass,
                   double x) {
  RequireMass(arrival_mass);
  if (x < 0.0) return 0.0;
  return std::exp(-arrival_mass * (1.0 - dist.Cdf(x)));
}

double MaxOrderHazard(const ValuationDistribution& dist, double arrival_mass,
                      double x) {
  RequireMass(arrival_mass);
  const double survival = 1.0 - dist.Cdf(x);
  const double scaled = arrival_mass * survival;
  if (scaled <= 0.0) return std::numeric_limits<double>::infinity();
  // expm1 keeps precision where the survival is small.
  return arrival_mass * dist.Pdf(x) / std::expm1(scaled);
}

double ExpectedMax(const ValuationDistribution& dist, double arrival_mass,
                   const Tolerance& tol) {
  RequireMass(arrival_mass);
  auto tail = [&](double x) { return 1.0 - MaxOrderCdf(dist, arrival_mass, x); };
  const double value =
      IntegratePiecewise(tail, Breakpoints(dist, 0.0, dist.h()), tol);
  return std::clamp(value, 0.0, dist.h());
}

LnRatioCheck LnRatioInequalityCheck(const ValuationDistribution& dist,
                                    double mass, double larger_mass) {
  if (!(mass > 1.0) || !(larger_mass >= mass)) {
    std::ostringstream msg;
    msg << "ln-ratio check needs 1 < m <= m', got m=" << mass
        << ", m'=" << larger_mass;
    throw std::invalid_argument(msg.str());
  }
  RequireDensity(dist, "LnRatioInequalityCheck");
  const double lhs = ExpectedMax(dist, mass) / ExpectedMax(dist, larger_mass);
  const double rhs = std::log(mass) / std::log(larger_mass);
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

double ProductCdf(const ValuationDistribution& dist, double x) {
  const double h = dist.h();
  if (x <= 0.0) return 0.0;
  if (x >= h) return 1.0;
  if (dist.kind() == ValuationKind::kPoint) {
    return std::min(x / dist.point_value(), 1.0);
  }
  auto weighted = [&](double v) { return dist.Pdf(v) / v; };
  if (x < 1.0) return x * Integrate(weighted, 1.0, h);
  return std::min(1.0, dist.Cdf(x) + x * Integrate(weighted, x, h));
}

double MaxDiscountedCdf(const ValuationDistribution& dist, double arrival_mass,
                        double x) {
  RequireMass(arrival_mass);
  if (x < 0.0) return 0.0;
  return std::exp(-arrival_mass * (1.0 - ProductCdf(dist, x)));
}

double ExpectedMaxDiscounted(const ValuationDistribution& dist,
                             double arrival_mass, const Tolerance& tol) {
  RequireMass(arrival_mass);
  auto tail = [&](double x) {
    return 1.0 - MaxDiscountedCdf(dist, arrival_mass, x);
  };
  // The outer integral does not need the inner quadrature's precision.
  Tolerance outer = tol;
  outer.rel_tol = std::max(tol.rel_tol, 1e-9);
  outer.abs_tol = std::max(tol.abs_tol, 1e-10);
  const double value =
      IntegratePiecewise(tail, Breakpoints(dist, 0.0, dist.h()), outer);
  return std::clamp(value, 0.0, dist.h());
}

}  // namespace postprice
