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

#include "postprice/discount.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace postprice {
namespace {

constexpr double kZetaFloor = 1e-12;
constexpr int kCustomGrid = 1024;
constexpr double kCustomSlack = 1e-9;

void RequireHorizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    std::ostringstream msg;
    msg << "discount horizon must be positive, got " << horizon;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

std::string ToString(DiscountKind kind) {
  switch (kind) {
    case DiscountKind::kLinear:
      return "linear";
    case DiscountKind::kConstantOne:
      return "constant_one";
    case DiscountKind::kCustom:
      return "custom";
  }
  return "unknown";
}

DiscountKind DiscountKindFromString(const std::string& name) {
  if (name == "linear") return DiscountKind::kLinear;
  if (name == "constant_one") return DiscountKind::kConstantOne;
  if (name == "custom") return DiscountKind::kCustom;
  throw std::invalid_argument("unknown discount kind '" + name + "'");
}

double DiscountFunction::Clamp(double t) const {
  return std::clamp(t, 0.0, horizon_);
}

double DiscountFunction::Eval(double t) const {
  t = Clamp(t);
  switch (kind_) {
    case DiscountKind::kLinear:
      return 1.0 - t / horizon_;
    case DiscountKind::kConstantOne:
      return 1.0;
    case DiscountKind::kCustom:
      return (*custom_)(t);
  }
  return 0.0;
}

void DiscountFunction::RequirePositive(double t, double xi) const {
  if (!(xi > kZetaFloor)) {
    std::ostringstream msg;
    msg << "zeta undefined: xi(" << t << ")=" << xi << " <= " << kZetaFloor;
    throw std::domain_error(msg.str());
  }
}

double DiscountFunction::Zeta(double t) const {
  const double xi = Eval(t);
  RequirePositive(t, xi);
  return 1.0 / xi;
}

double DiscountFunction::FiniteDifferenceStep() const {
  return std::max(1e-6 * horizon_, 1e-9);
}

double DiscountFunction::ZetaPrime(double t) const {
  switch (kind_) {
    case DiscountKind::kLinear: {
      const double xi = Eval(t);
      RequirePositive(t, xi);
      const double gap = horizon_ - Clamp(t);
      return horizon_ / (gap * gap);
    }
    case DiscountKind::kConstantOne:
      return 0.0;
    case DiscountKind::kCustom: {
      RequirePositive(t, Eval(t));
      const double step = FiniteDifferenceStep();
      // One-sided at the ends of the horizon.
      const double lo = std::max(0.0, t - step);
      const double hi = std::min(horizon_, t + step);
      return (Zeta(hi) - Zeta(lo)) / (hi - lo);
    }
  }
  return 0.0;
}

double DiscountFunction::LogZetaSlope(double t) const {
  switch (kind_) {
    case DiscountKind::kLinear: {
      RequirePositive(t, Eval(t));
      return 1.0 / (horizon_ - Clamp(t));
    }
    case DiscountKind::kConstantOne:
      return 0.0;
    case DiscountKind::kCustom:
      return ZetaPrime(t) / Zeta(t);
  }
  return 0.0;
}

nlohmann::json DiscountFunction::ToJson() const {
  if (kind_ == DiscountKind::kCustom) {
    throw std::invalid_argument("custom discounts have no config form");
  }
  return {{"kind", ToString(kind_)}, {"T", horizon_}};
}

DiscountFunction DiscountFunction::FromJson(const nlohmann::json& config) {
  const nlohmann::json& body =
      config.contains("discount") ? config.at("discount") : config;
  const DiscountKind kind =
      DiscountKindFromString(body.at("kind").get<std::string>());
  const double horizon = body.at("T").get<double>();
  switch (kind) {
    case DiscountKind::kLinear:
      return MakeLinearDiscount(horizon);
    case DiscountKind::kConstantOne:
      return MakeConstantDiscount(horizon);
    case DiscountKind::kCustom:
      break;
  }
  throw std::invalid_argument("custom discounts cannot be read from config");
}

DiscountFunction MakeLinearDiscount(double horizon) {
  RequireHorizon(horizon);
  return DiscountFunction(DiscountKind::kLinear, horizon, nullptr);
}

DiscountFunction MakeConstantDiscount(double horizon) {
  RequireHorizon(horizon);
  return DiscountFunction(DiscountKind::kConstantOne, horizon, nullptr);
}

DiscountFunction MakeCustomDiscount(double horizon,
                                    std::function<double(double)> xi) {
  RequireHorizon(horizon);
  if (!xi) throw std::invalid_argument("custom discount needs a function");
  const double at_zero = xi(0.0);
  if (!(std::abs(at_zero - 1.0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "custom discount must satisfy xi(0) = 1, got xi(0)=" << at_zero;
    throw std::invalid_argument(msg.str());
  }
  double previous = at_zero;
  for (int i = 1; i < kCustomGrid; ++i) {
    const double t = horizon * i / (kCustomGrid - 1);
    const double value = xi(t);
    if (!std::isfinite(value) || value < -kCustomSlack ||
        value > 1.0 + kCustomSlack || value > previous + kCustomSlack) {
      std::ostringstream msg;
      msg << "custom discount invalid at grid point " << i << " (t=" << t
          << "): xi=" << value << ", previous=" << previous;
      throw std::invalid_argument(msg.str());
    }
    previous = value;
  }
  return DiscountFunction(
      DiscountKind::kCustom, horizon,
      std::make_shared<const std::function<double(double)>>(std::move(xi)));
}

}  // namespace postprice
