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

#include "postprice/numerics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace postprice {
namespace {

// Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct PanelOrder {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;
  }
};

double CheckedEval(const ScalarFunction& f, double x) {
  const double fx = f(x);
  if (!std::isfinite(fx)) {
    std::ostringstream msg;
    msg << "integrand is not finite at x=" << x;
    throw NumericsError(msg.str(), 0.0, x);
  }
  return fx;
}

Panel KronrodPanel(const ScalarFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = CheckedEval(f, center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = CheckedEval(f, center - dx) + CheckedEval(f, center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

void Tolerance::Validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
    throw std::invalid_argument(
        "Tolerance requires abs_tol > 0, rel_tol > 0, max_iter >= 1");
  }
}

double Tolerance::Bound(double magnitude) const {
  return std::max(abs_tol, rel_tol * std::abs(magnitude));
}

double Integrate(const ScalarFunction& f, double a, double b,
                 const Tolerance& tol) {
  tol.Validate();
  if (!(a <= b)) {
    std::ostringstream msg;
    msg << "Integrate requires a <= b, got [" << a << ", " << b << "]";
    throw std::invalid_argument(msg.str());
  }
  if (a == b) return 0.0;

  std::vector<Panel> panels;
  panels.push_back(KronrodPanel(f, a, b));
  double value = panels.front().value;
  double error = panels.front().error;

  int bisections = 0;
  while (error > tol.Bound(value)) {
    if (bisections >= tol.max_iter) {
      std::ostringstream msg;
      msg << "quadrature on [" << a << ", " << b << "] did not converge after "
          << bisections << " bisections (error estimate " << error << ")";
      throw NumericsError(msg.str(), value);
    }
    std::pop_heap(panels.begin(), panels.end(), PanelOrder());
    const Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    panels.push_back(KronrodPanel(f, worst.a, mid));
    std::push_heap(panels.begin(), panels.end(), PanelOrder());
    panels.push_back(KronrodPanel(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end(), PanelOrder());
    ++bisections;

    // Resum from scratch to keep cancellation from accumulating.
    value = 0.0;
    error = 0.0;
    for (const Panel& panel : panels) {
      value += panel.value;
      error += panel.error;
    }
  }
  return value;
}

double IntegrateDecaying(const ScalarFunction& f, double a, double b,
                         double rate, const Tolerance& tol) {
  if (!(rate > 0.0) || !(rate * (b - a) > 4.0)) return Integrate(f, a, b, tol);
  double total = 0.0;
  double left = a;
  for (double scale = 1.0 / rate; left < b; scale *= 4.0) {
    const double right = std::min(b, a + scale);
    total += Integrate(f, left, right, tol);
    left = right;
  }
  return total;
}

RootBracket BracketRoot(const ScalarFunction& f, double lo, double hi,
                        const Tolerance& tol) {
  tol.Validate();
  if (lo > hi) std::swap(lo, hi);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
    std::ostringstream msg;
    msg << "root bracket endpoints not finite: f(" << lo << ")=" << f_lo
        << ", f(" << hi << ")=" << f_hi;
    throw NumericsError(msg.str(), 0.5 * (lo + hi));
  }
  if (f_lo == 0.0) return {lo, lo, lo, 0};
  if (f_hi == 0.0) return {hi, hi, hi, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    std::ostringstream msg;
    msg << "no sign change in bracket: f(" << lo << ")=" << f_lo << ", f("
        << hi << ")=" << f_hi;
    throw NumericsError(msg.str(), std::abs(f_lo) < std::abs(f_hi) ? lo : hi);
  }

  int iter = 0;
  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (hi - lo <= tol.Bound(mid) || mid <= lo || mid >= hi) {
      return {mid, lo, hi, iter};
    }
    if (iter >= tol.max_iter) {
      std::ostringstream msg;
      msg << "bisection did not converge in " << iter
          << " iterations; bracket [" << lo << ", " << hi << "]";
      throw NumericsError(msg.str(), mid);
    }
    const double f_mid = f(mid);
    ++iter;
    if (!std::isfinite(f_mid)) {
      std::ostringstream msg;
      msg << "function not finite at x=" << mid << " during bisection";
      throw NumericsError(msg.str(), mid, mid);
    }
    if (f_mid == 0.0) return {mid, mid, mid, iter};
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
}

double FindRoot(const ScalarFunction& f, double lo, double hi,
                const Tolerance& tol) {
  return BracketRoot(f, lo, hi, tol).root;
}

double OdePath::Interpolate(double at) const {
  if (t.empty()) throw std::logic_error("empty ODE path");
  if (t.size() == 1) return y.front();
  const bool forward = t.back() >= t.front();
  const double t_min = forward ? t.front() : t.back();
  const double t_max = forward ? t.back() : t.front();
  if (at < t_min || at > t_max) {
    std::ostringstream msg;
    msg << "interpolation point " << at << " outside [" << t_min << ", "
        << t_max << "]";
    throw std::out_of_range(msg.str());
  }
  // Index of the node segment [j, j+1] that contains `at`.
  size_t j;
  if (forward) {
    auto it = std::upper_bound(t.begin(), t.end(), at);
    j = static_cast<size_t>(std::max<std::ptrdiff_t>(it - t.begin() - 1, 0));
  } else {
    auto it = std::upper_bound(t.begin(), t.end(), at, std::greater<double>());
    j = static_cast<size_t>(std::max<std::ptrdiff_t>(it - t.begin() - 1, 0));
  }
  j = std::min(j, t.size() - 2);
  const double h = t[j + 1] - t[j];
  const double s = (at - t[j]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y[j] + h10 * h * dydt[j] + h01 * y[j + 1] +
         h11 * h * dydt[j + 1];
}

OdePath IntegrateOde(const OdeRhs& rhs, double t_from, double t_to, double y0,
                     int steps) {
  if (steps < 1) throw std::invalid_argument("IntegrateOde requires steps >= 1");
  auto checked = [&rhs](double t, double y) {
    const double d = rhs(t, y);
    if (!std::isfinite(d) || !std::isfinite(y)) {
      std::ostringstream msg;
      msg << "ODE state not finite at t=" << t << " (y=" << y << ")";
      throw NumericsError(msg.str(), y, t);
    }
    return d;
  };

  OdePath path;
  path.t.reserve(steps + 1);
  path.y.reserve(steps + 1);
  path.dydt.reserve(steps + 1);
  const double h = (t_to - t_from) / steps;
  double y = y0;
  double k1 = checked(t_from, y);
  path.t.push_back(t_from);
  path.y.push_back(y);
  path.dydt.push_back(k1);
  for (int i = 0; i < steps; ++i) {
    const double t = t_from + i * h;
    const double k2 = checked(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = checked(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = checked(t + h, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    const double t_next = (i + 1 == steps) ? t_to : t_from + (i + 1) * h;
    k1 = checked(t_next, y);
    path.t.push_back(t_next);
    path.y.push_back(y);
    path.dydt.push_back(k1);
  }
  return path;
}

}  // namespace postprice
