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

#ifndef POSTPRICE_DISCOUNT_H_
#define POSTPRICE_DISCOUNT_H_

#include <functional>
#include <memory>
#include <string>

#include "json.hpp"

namespace postprice {

enum class DiscountKind { kLinear, kConstantOne, kCustom };

std::string ToString(DiscountKind kind);
DiscountKind DiscountKindFromString(const std::string& name);

// Time discount xi: [0, T] -> [0, 1], non-increasing with xi(0) = 1. An agent
// arriving at t with initial valuation V values the item at V * xi(t).
//
// Arguments outside [0, T] are clamped to the horizon.
class DiscountFunction {
 public:
  DiscountKind kind() const { return kind_; }
  double horizon() const { return horizon_; }

  double operator()(double t) const { return Eval(t); }
  double Eval(double t) const;

  // zeta = 1 / xi. Throws std::domain_error where xi(t) <= 1e-12.
  double Zeta(double t) const;
  double ZetaPrime(double t) const;
  // zeta'(t) / zeta(t) = -xi'(t) / xi(t).
  double LogZetaSlope(double t) const;

  nlohmann::json ToJson() const;
  static DiscountFunction FromJson(const nlohmann::json& config);

 private:
  friend DiscountFunction MakeLinearDiscount(double horizon);
  friend DiscountFunction MakeConstantDiscount(double horizon);
  friend DiscountFunction MakeCustomDiscount(double horizon,
                                             std::function<double(double)> xi);

  DiscountFunction(DiscountKind kind, double horizon,
                   std::shared_ptr<const std::function<double(double)>> xi)
      : kind_(kind), horizon_(horizon), custom_(std::move(xi)) {}

  double Clamp(double t) const;
  double FiniteDifferenceStep() const;
  void RequirePositive(double t, double xi) const;

  DiscountKind kind_;
  double horizon_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

// xi(t) = 1 - t / T.
DiscountFunction MakeLinearDiscount(double horizon);
// xi = 1: no time discounting.
DiscountFunction MakeConstantDiscount(double horizon);
// Validates xi(0) = 1 and monotonicity on a 1024-point grid; zeta' comes from
// a central finite difference.
DiscountFunction MakeCustomDiscount(double horizon,
                                    std::function<double(double)> xi);

}  // namespace postprice

#endif  // POSTPRICE_DISCOUNT_H_
