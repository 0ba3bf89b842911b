#pragma once

/// Numerical-integration oracles used to check the closed-form engine.
///
/// Nothing here includes or calls the polynomial-Gaussian algebra; the
/// oracle only ever sees integrands as black-box callables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nsblowup/errors.hpp"
#include "nsblowup/reduce.hpp"

namespace nsblowup {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int initial_panels = 8;
  int max_panels = 20000;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel kronrod_panel(F& f, double a, double b) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]. The panel
/// with the largest error estimate is bisected until the summed estimate
/// drops below max(abs_tol, rel_tol * |value|) or the panel budget is spent.
/// An exhausted budget is reported through `converged`, with the best
/// estimate still returned.
template <class F>
QuadratureResult integrate_1d(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b, "integrate_1d: need finite a <= b");
  require(opts.abs_tol > 0.0 || opts.rel_tol > 0.0, "integrate_1d: tolerance must be > 0");
  QuadratureResult res;
  if (a == b) return res;
  long evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return static_cast<double>(f(x));
  };
  std::priority_queue<detail::Panel> heap;
  const int n0 = std::max(1, opts.initial_panels);
  double total = 0.0, total_err = 0.0;
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    auto p = detail::kronrod_panel(counted, lo, hi);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int panels = n0;
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (total_err > target() && panels < opts.max_panels) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto l = detail::kronrod_panel(counted, worst.a, mid);
    auto r = detail::kronrod_panel(counted, mid, worst.b);
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  std::vector<detail::Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  std::vector<double> vals, errs;
  for (const auto& p : all) {
    vals.push_back(p.value);
    errs.push_back(p.error);
  }
  res.value = pairwise_sum(vals);
  res.error_estimate = pairwise_sum(errs);
  res.evaluations = evals;
  res.converged = res.error_estimate <= std::max(opts.abs_tol, opts.rel_tol * std::abs(res.value));
  return res;
}

/// Breakpoint-aware variant: integrates each [breaks[i], breaks[i+1]]
/// separately with an equal share of the absolute tolerance.
template <class F>
QuadratureResult integrate_1d_pieces(F&& f, std::span<const double> breaks, const QuadratureOptions& opts = {}) {
  require(breaks.size() >= 2, "integrate_1d_pieces: need at least two breakpoints");
  QuadratureOptions piece = opts;
  piece.abs_tol = opts.abs_tol / static_cast<double>(breaks.size() - 1);
  QuadratureResult out;
  std::vector<double> vals;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto r = integrate_1d(f, breaks[i], breaks[i + 1], piece);
    vals.push_back(r.value);
    out.error_estimate += r.error_estimate;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  out.value = pairwise_sum(vals);
  return out;
}

using Box = std::vector<std::pair<double, double>>;

/// Nested (iterated) adaptive quadrature over a finite box. Each inner
/// integral is itself adaptive; the outer error estimate adds the largest
/// inner estimate times the outer length.
template <class F>
QuadratureResult integrate_nd(F&& f, const Box& box, const QuadratureOptions& opts = {}) {
  require(!box.empty(), "integrate_nd: empty box");
  for (const auto& [lo, hi] : box) require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "integrate_nd: bad box");
  const std::size_t n = box.size();
  std::vector<double> point(n, 0.0);
  long evals = 0;
  bool converged = true;

  std::function<QuadratureResult(std::size_t, const QuadratureOptions&)> level =
      [&](std::size_t axis, const QuadratureOptions& o) -> QuadratureResult {
    const auto [lo, hi] = box[axis];
    if (axis + 1 == n) {
      auto r = integrate_1d(
          [&](double x) {
            point[axis] = x;
            return static_cast<double>(f(std::span<const double>(point)));
          },
          lo, hi, o);
      evals += r.evaluations;
      converged = converged && r.converged;
      return r;
    }
    QuadratureOptions inner = o;
    inner.abs_tol = o.abs_tol / std::max(1.0, hi - lo);
    double worst_inner = 0.0;
    auto r = integrate_1d(
        [&](double x) {
          point[axis] = x;
          auto ir = level(axis + 1, inner);
          worst_inner = std::max(worst_inner, ir.error_estimate);
          return ir.value;
        },
        lo, hi, o);
    converged = converged && r.converged;
    r.error_estimate += worst_inner * (hi - lo);
    return r;
  };
  auto r = level(0, opts);
  r.evaluations = evals;
  r.converged = converged;
  return r;
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_m).
inline QuadratureRule gauss_legendre_rule(std::size_t m) {
  require(m >= 1, "gauss_legendre_rule: m >= 1");
  QuadratureRule r{std::vector<double>(m), std::vector<double>(m)};
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(m) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at converged root
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
    }
    dp = static_cast<double>(m) * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = -z;
    r.nodes[m - 1 - i] = z;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  return r;
}

/// m-point Gauss-Hermite rule for the weight e^{-x^2}.
inline QuadratureRule gauss_hermite_rule(std::size_t m) {
  require(m >= 1 && m <= 200, "gauss_hermite_rule: 1 <= m <= 200");
  QuadratureRule r{std::vector<double>(m), std::vector<double>(m)};
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const double md = static_cast<double>(m);
  double z = 0.0;
  // orthonormal Hermite recurrence; initial guesses as in the classic gauher
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * md + 1.0) - 1.85575 * std::pow(2.0 * md + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(md, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * r.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * r.nodes[1];
    else
      z = 2.0 * z - r.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * md) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    r.nodes[i] = z;
    r.weights[i] = 2.0 / (pp * pp);
  }
  // the loop filled descending positive roots in the first half
  std::vector<double> x(m), w(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    x[i] = -r.nodes[i];
    w[i] = r.weights[i];
    x[m - 1 - i] = r.nodes[i];
    w[m - 1 - i] = r.weights[i];
  }
  return {x, w};
}

/// Gauss-Hermite approximation of integral f(x) e^{-x^2} dx.
template <class F>
double gauss_hermite_integrate(F&& f, std::size_t m) {
  const auto rule = gauss_hermite_rule(m);
  std::vector<double> parts(m);
  for (std::size_t i = 0; i < m; ++i) parts[i] = rule.weights[i] * f(rule.nodes[i]);
  return pairwise_sum(parts);
}

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double composite_gauss_legendre(F&& f, double a, double b, std::size_t panels, const QuadratureRule& rule) {
  std::vector<double> parts;
  parts.reserve(panels * rule.nodes.size());
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      parts.push_back(0.5 * h * rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]));
  }
  return pairwise_sum(parts);
}

}  // namespace nsblowup
