#pragma once

/// The four one-dimensional heat-kernel integrals behind both flows,
///
///   K0(x; t, s)    = (t-s)^{-1/2} integral exp(-(x-y)^2 / 4(t-s)) exp(-y^2 / 4t) dy
///   K1(x; t, s)    = (t-s)^{-3/2} integral (x-y) exp(-(x-y)^2 / 4(t-s)) exp(-y^2 / 4t) dy
///   D0(x; t, j, k) = t^{-1/2} integral exp(-(x-y)^2 / 4t) exp(-(2^j y - k)^2) dy
///   D1(x; t, j, k) = t^{-1/2} integral exp(-(x-y)^2 / 4t) (2^j y - k) exp(-(2^j y - k)^2) dy
///
/// each evaluated two ways: through the closed-form engine (heat_evolve is
/// the normalized kernel, so every integral is sqrt(4 pi tau) times an
/// evolved term) and through the explicit formula with its constant.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nsblowup/errors.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/quadrature.hpp"

namespace nsblowup {

namespace detail {
inline void check_pair_times(double t, double s) {
  require(std::isfinite(t) && std::isfinite(s) && 0.0 <= s && s < t, "heat integrals: need 0 <= s < t");
}
}  // namespace detail

inline double kernel_pair_integral(double x, double t, double s, int order) {
  detail::check_pair_times(t, s);
  require(order == 0 || order == 1, "kernel_pair_integral: order must be 0 or 1");
  const double tau = t - s;
  const double norm = std::sqrt(4.0 * std::numbers::pi * tau);
  const PolyGauss1D evolved = heat_evolve(PolyGauss1D::gaussian(1.0 / (4.0 * t)), tau);
  if (order == 0) return std::pow(tau, -0.5) * norm * evolved(x);
  // integral (x-y) K(x-y) g(y) dy = -2 tau d/dx (K * g)
  return std::pow(tau, -1.5) * (-2.0 * tau) * norm * differentiate(evolved)(x);
}

inline double dyadic_kernel_integral(double x, double t, int j, double k, int order) {
  require(std::isfinite(t) && t > 0.0, "dyadic_kernel_integral: need t > 0");
  require(order == 0 || order == 1, "dyadic_kernel_integral: order must be 0 or 1");
  const PolyGauss1D proto = order == 0 ? PolyGauss1D::gaussian(1.0) : PolyGauss1D(1.0, 0.0, 1.0, {0.0, 1.0});
  const PolyGauss1D evolved = heat_evolve(scale_shift(proto, std::ldexp(1.0, j), k), t);
  return std::pow(t, -0.5) * std::sqrt(4.0 * std::numbers::pi * t) * evolved(x);
}

/// 2 sqrt(pi t) x^order (2t - s)^{-1/2 - order} exp(-x^2 / 4(2t - s)).
inline double kernel_pair_formula(double x, double t, double s, int order) {
  detail::check_pair_times(t, s);
  require(order == 0 || order == 1, "kernel_pair_formula: order must be 0 or 1");
  const double T = 2.0 * t - s;
  const double c = 2.0 * std::sqrt(std::numbers::pi * t);
  return c * (order == 1 ? x : 1.0) * std::pow(T, -0.5 - order) * std::exp(-x * x / (4.0 * T));
}

/// 2 sqrt(pi) (2^j x - k)^order w^{-1/2 - order} exp(-(2^j x - k)^2 / w),  w = 1 + 4^{j+1} t.
inline double dyadic_kernel_formula(double x, double t, int j, double k, int order) {
  require(std::isfinite(t) && t > 0.0, "dyadic_kernel_formula: need t > 0");
  require(order == 0 || order == 1, "dyadic_kernel_formula: order must be 0 or 1");
  const double w = 1.0 + std::ldexp(1.0, 2 * (j + 1)) * t;
  const double u = std::ldexp(x, j) - k;
  return 2.0 * std::sqrt(std::numbers::pi) * (order == 1 ? u : 1.0) * std::pow(w, -0.5 - order) * std::exp(-u * u / w);
}

struct HeatIntegralRow {
  std::string name;  // K0, K1, D0, D1
  double t = 0.0;
  double s = 0.0;  // K rows only
  int j = 0;       // D rows only
  double k = 0.0;  // D rows only
  double x = 0.0;
  double engine = 0.0;
  double formula = 0.0;
  double quadrature = 0.0;
  double rel_error = 0.0;  // worst of engine and formula against quadrature
  bool converged = true;
};

/// Defining integral of one identity by adaptive quadrature, with no use of
/// the engine. Returns {value, integral of |integrand|}.
inline std::pair<QuadratureResult, double> heat_integral_quadrature(const std::string& name, double x, double t,
                                                                    double s, int j, double k) {
  const bool pair = name[0] == 'K';
  const int order = name[1] - '0';
  auto f = [&](double y) {
    if (pair) {
      const double tau = t - s, d = x - y;
      return std::pow(tau, -0.5 - order) * (order ? d : 1.0) * std::exp(-d * d / (4 * tau) - y * y / (4 * t));
    }
    const double u = std::ldexp(y, j) - k, d = x - y;
    return std::pow(t, -0.5) * std::exp(-d * d / (4 * t)) * (order ? u : 1.0) * std::exp(-u * u);
  };
  const double c = pair ? 0.0 : k / std::ldexp(1.0, j);
  const double lo = std::min(x, c) - 40.0, hi = std::max(x, c) + 40.0;
  // only a scale; the kink at the zero of the integrand makes tight tolerances costly
  const auto l1 = integrate_1d([&](double y) { return std::abs(f(y)); }, lo, hi, {1e-300, 1e-6, 64, 20000});
  // the absolute floor keeps cancelling (odd) integrands from chasing rounding noise
  const auto q = integrate_1d(f, lo, hi, {1e-12 * l1.value, 1e-12, 64, 20000});
  return {q, l1.value};
}

/// Engine, explicit formula and quadrature for every identity on the grid
/// (t, s) in {(0.5, 0.25), (1, 0.5), (0.25, 0.1)}, j in {0, 1, 2},
/// k in {0, 3}, x in {-1, 0, 1, 2}. The D identities use each grid t.
/// Errors are relative to |value|, or to the integral of |integrand| when
/// the value is exactly zero.
inline std::vector<HeatIntegralRow> heat_integral_suite() {
  const std::pair<double, double> ts[] = {{0.5, 0.25}, {1.0, 0.5}, {0.25, 0.1}};
  const double xs[] = {-1.0, 0.0, 1.0, 2.0};
  std::vector<HeatIntegralRow> rows;
  auto finish = [&](HeatIntegralRow r, const std::pair<QuadratureResult, double>& q) {
    r.quadrature = q.first.value;
    r.converged = q.first.converged;
    const double scale = r.formula != 0.0 ? std::abs(r.formula) : q.second;
    r.rel_error = std::max(std::abs(r.engine - r.quadrature), std::abs(r.formula - r.quadrature)) / scale;
    rows.push_back(std::move(r));
  };
  for (const auto& [t, s] : ts)
    for (double x : xs)
      for (int order : {0, 1}) {
        HeatIntegralRow r{order ? "K1" : "K0", t, s, 0, 0.0, x};
        r.engine = kernel_pair_integral(x, t, s, order);
        r.formula = kernel_pair_formula(x, t, s, order);
        const auto q = heat_integral_quadrature(r.name, x, t, s, 0, 0.0);
        finish(std::move(r), q);
      }
  for (const auto& [t, s] : ts)
    for (int j : {0, 1, 2})
      for (double k : {0.0, 3.0})
        for (double x : xs)
          for (int order : {0, 1}) {
            HeatIntegralRow r{order ? "D1" : "D0", t, 0.0, j, k, x};
            r.engine = dyadic_kernel_integral(x, t, j, k, order);
            r.formula = dyadic_kernel_formula(x, t, j, k, order);
            const auto q = heat_integral_quadrature(r.name, x, t, 0.0, j, k);
            finish(std::move(r), q);
          }
  return rows;
}

}  // namespace nsblowup
