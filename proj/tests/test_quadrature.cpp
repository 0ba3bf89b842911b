#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nsblowup/correlation.hpp"
#include "nsblowup/heat_integrals.hpp"
#include "nsblowup/quadrature.hpp"

using namespace nsblowup;

TEST(Quadrature, OneDimensionalBasics) {
  const auto a = integrate_1d([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_NEAR(a.value, 1.0 / 3.0, 1e-12);
  EXPECT_GE(a.error_estimate, 0.0);
  const auto b = integrate_1d([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  EXPECT_NEAR(b.value, std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_TRUE(b.converged);
}

TEST(Quadrature, DyadicIntegrandOrderOne) {
  const double t = 0.1, x = 0.5, k = 3.0;
  const int j = 1;
  auto f = [&](double y) {
    const double u = std::ldexp(y, j) - k;
    return std::pow(t, -0.5) * std::exp(-(x - y) * (x - y) / (4 * t)) * u * std::exp(-u * u);
  };
  const auto q = integrate_1d(f, -20.0, 20.0, {1e-15, 1e-13, 16, 4000});
  const double exact = dyadic_kernel_formula(x, t, j, k, 1);
  EXPECT_LT(std::abs(q.value - exact) / std::abs(exact), 1e-10);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 0.0;
  o.initial_panels = 1;
  o.max_panels = 3;
  const auto r = integrate_1d([](double x) { return std::sin(50 * x); }, 0.0, 10.0, o);
  EXPECT_FALSE(r.converged);
}

TEST(Quadrature, NestedBoxIntegrals) {
  Box box{{-5, 5}, {-5, 5}, {-5, 5}};
  const auto g = integrate_nd(
      [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); }, box,
      {1e-12, 1e-12, 8, 2000});
  EXPECT_NEAR(g.value, std::pow(std::numbers::pi, 1.5), 1e-8);
  const auto odd = integrate_nd([](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); },
                                Box{{-4, 4}, {-4, 4}}, {1e-12, 0.0, 8, 2000});
  EXPECT_NEAR(odd.value, 0.0, 1e-10);
}

TEST(Quadrature, SelfConvergence) {
  auto f = [](double x) { return std::exp(-3 * (x - 0.4) * (x - 0.4)) * std::cos(4 * x); };
  QuadratureOptions o{1e-6, 0.0, 2, 20000};
  auto prev = integrate_1d(f, -8.0, 8.0, o);
  for (int i = 0; i < 5; ++i) {
    o.abs_tol /= 2;
    const auto cur = integrate_1d(f, -8.0, 8.0, o);
    EXPECT_LE(std::abs(cur.value - prev.value), prev.error_estimate + 1e-15);
    prev = cur;
  }
}

TEST(Quadrature, GaussHermiteExactness) {
  for (std::size_t m : {4u, 10u, 20u}) {
    for (std::size_t d = 0; d <= 2 * m - 1; ++d) {
      const double got = gauss_hermite_integrate([&](double x) { return std::pow(x, static_cast<double>(d)); }, m);
      const double exact = d % 2 ? 0.0 : std::tgamma((static_cast<double>(d) + 1) / 2);
      // odd moments cancel between terms of size ~ Gamma((d + 2) / 2)
      const double scale = std::max(1.0, std::tgamma((static_cast<double>(d) + 2) / 2));
      EXPECT_NEAR(got, exact, 1e-13 * scale) << "m=" << m << " d=" << d;
    }
  }
}

TEST(Quadrature, GaussLegendreExactness) {
  const auto r = gauss_legendre_rule(8);
  for (int d = 0; d <= 15; ++d) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
    EXPECT_NEAR(s, d % 2 ? 0.0 : 2.0 / (d + 1), 1e-14);
  }
}

TEST(Quadrature, CorrelationIntegrandAgainstClosedForm) {
  const auto spec = FlowSpec::up_to(1);
  const auto q = h_st_quadrature(spec, 0.25, 0.5, default_correlation_box(3), 1e-9);
  const auto c = h_st_closed(spec, 0.25, 0.5, 8);
  EXPECT_LE(std::abs(q.value - c.value), q.error_bound + c.error_bound);
}
