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

// Deterministic scalar quadrature, bracketed root finding and fixed-step
// RK4 integration. Every analytic quantity in the library goes through
// these three routines.

#ifndef POSTPRICE_NUMERICS_H_
#define POSTPRICE_NUMERICS_H_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace postprice {

using ScalarFunction = std::function<double(double)>;
using OdeRhs = std::function<double(double t, double y)>;

struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  // Throws std::invalid_argument unless all fields are positive.
  void Validate() const;

  // Defaults for FindRoot.
  static Tolerance Root() { return {1e-12, 1e-10, 200}; }
  // Defaults for Integrate; max_iter counts interval bisections.
  static Tolerance Quadrature() { return {1e-12, 1e-10, 2000}; }

  double Bound(double magnitude) const;
};

// Raised when an iterative routine cannot meet its tolerance. Carries the
// best available estimate and, for ODE failures, the offending time.
class NumericsError : public std::runtime_error {
 public:
  NumericsError(const std::string& what, double best_estimate,
                double location = 0.0)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        location_(location) {}

  double best_estimate() const { return best_estimate_; }
  double location() const { return location_; }

 private:
  double best_estimate_;
  double location_;
};

// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]. The interval
// with the largest error estimate is bisected until the summed estimate is
// below tol.Bound(|I|).
double Integrate(const ScalarFunction& f, double a, double b,
                 const Tolerance& tol = Tolerance::Quadrature());

// Integrate for integrands carrying an exp(-rate (t - a)) factor. Splits
// [a, b] at a + 4^j / rate so a sharp decay near a is not missed when
// rate (b - a) is large.
double IntegrateDecaying(const ScalarFunction& f, double a, double b,
                         double rate,
                         const Tolerance& tol = Tolerance::Quadrature());

struct RootBracket {
  double root;
  double lo;
  double hi;
  int iterations;
};

// Bisection on [lo, hi]; requires f(lo) * f(hi) <= 0. Stops when the
// bracket is narrower than tol.Bound(|x|).
RootBracket BracketRoot(const ScalarFunction& f, double lo, double hi,
                        const Tolerance& tol = Tolerance::Root());

double FindRoot(const ScalarFunction& f, double lo, double hi,
                const Tolerance& tol = Tolerance::Root());

// Sampled solution of y' = rhs(t, y). Nodes are stored in integration
// order, so t is decreasing for backward integration.
struct OdePath {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> dydt;

  double front() const { return y.front(); }
  double back() const { return y.back(); }

  // Cubic Hermite interpolation between nodes; t must lie in the span.
  double Interpolate(double at) const;
};

// Classical RK4 with `steps` equal steps from t_from to t_to.
OdePath IntegrateOde(const OdeRhs& rhs, double t_from, double t_to, double y0,
                     int steps);

}  // namespace postprice

#endif  // POSTPRICE_NUMERICS_H_
