#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nsblowup/heat_integrals.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/quadrature.hpp"

using namespace nsblowup;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

PolyGauss1D random_term(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-2.0, 2.0), cen(-3.0, 3.0), wid(0.2, 4.0), coef(-1.5, 1.5);
  std::uniform_int_distribution<int> deg(0, 3);
  std::vector<double> p(static_cast<std::size_t>(deg(rng)) + 1);
  for (auto& c : p) c = coef(rng);
  p.back() = p.back() == 0.0 ? 1.0 : p.back();
  return {amp(rng), cen(rng), wid(rng), p};
}

}  // namespace

TEST(PolyGauss, RejectsNonPositiveWidth) {
  EXPECT_THROW(PolyGauss1D(1.0, 0.0, 0.0), contract_error);
  EXPECT_THROW(PolyGauss1D(1.0, 0.0, -1.0), contract_error);
}

TEST(PolyGauss, TrimsTrailingZeros) {
  PolyGauss1D f(1.0, 0.0, 1.0, {1.0, 2.0, 0.0, 0.0});
  EXPECT_EQ(f.poly().size(), 2u);
  PolyGauss1D g(1.0, 0.0, 1.0, {});
  EXPECT_EQ(g.poly().size(), 1u);
  EXPECT_EQ(g(0.3), 0.0);
}

TEST(PolyGauss, RejectsDegreeAboveCap) {
  EXPECT_THROW(PolyGauss1D(1.0, 0.0, 1.0, std::vector<double>(kMaxPolyDegree + 2, 1.0)), contract_error);
}

TEST(PolyGauss, MultiplyCompletesTheSquare) {
  const auto f = multiply(PolyGauss1D::gaussian(1.0, 1.0), PolyGauss1D::gaussian(1.0, -1.0));
  EXPECT_DOUBLE_EQ(f.width(), 2.0);
  EXPECT_NEAR(f.center(), 0.0, 1e-15);
  EXPECT_NEAR(f.amplitude(), std::exp(-2.0), 1e-15);
}

TEST(PolyGauss, MultiplyMatchesPointwiseProduct) {
  const PolyGauss1D x_gauss(1.0, 0.0, 1.0, {0.0, 1.0});
  const auto f = multiply(x_gauss, x_gauss);
  for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) EXPECT_NEAR(f(x), x * x * std::exp(-2 * x * x), 1e-12);
}

TEST(PolyGauss, MultiplyIsCommutativeAndAssociative) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_term(rng), b = random_term(rng), c = random_term(rng);
    const auto ab = multiply(a, b), ba = multiply(b, a);
    const auto abc = multiply(ab, c), a_bc = multiply(a, multiply(b, c));
    for (int i = 0; i < 20; ++i) {
      const double x = -3.0 + 6.0 * i / 19.0;
      const double scale = std::abs(a(x) * b(x)) + 1e-3;
      EXPECT_NEAR(ab(x), ba(x), 1e-12 * scale);
      EXPECT_NEAR(abc(x), a_bc(x), 1e-12 * (std::abs(abc(x)) + 1e-3));
    }
  }
}

TEST(PolyGauss, DifferentiateBasicCases) {
  const auto d1 = differentiate(PolyGauss1D::gaussian(1.0));
  const auto d2 = differentiate(PolyGauss1D(1.0, 0.0, 1.0, {0.0, 1.0}));
  for (double x : {-1.3, 0.0, 0.4, 2.0}) {
    EXPECT_NEAR(d1(x), -2 * x * std::exp(-x * x), 1e-14);
    EXPECT_NEAR(d2(x), (1 - 2 * x * x) * std::exp(-x * x), 1e-14);
  }
}

TEST(PolyGauss, DerivativeHasNoMass) {
  // (x^3 + 2x) about 0 re-expanded at center 0.3
  const auto p = detail::shift_poly(std::vector<double>{0.0, 2.0, 0.0, 1.0}, 0.3);
  const PolyGauss1D f(1.0, 0.3, 0.7, p);
  EXPECT_NEAR(moment_integral(differentiate(f)), 0.0, 1e-12);
}

TEST(PolyGauss, HeatEvolveUnitGaussian) {
  const auto g = heat_evolve(PolyGauss1D::gaussian(1.0), 0.25);
  for (double x : {-1.0, 0.0, 0.7, 2.0}) EXPECT_NEAR(g(x), std::exp(-x * x / 2) / std::sqrt(2.0), 1e-15);
}

TEST(PolyGauss, HeatEvolveZeroIsIdentity) {
  const PolyGauss1D f(1.3, 0.2, 0.8, {0.5, -1.0, 2.0});
  const auto g = heat_evolve(f, 0.0);
  EXPECT_EQ(g.width(), f.width());
  EXPECT_EQ(g.center(), f.center());
  EXPECT_EQ(g.amplitude(), f.amplitude());
  EXPECT_EQ(g.poly(), f.poly());
  EXPECT_THROW(heat_evolve(f, -0.1), contract_error);
}

TEST(PolyGauss, HeatEvolveMatchesConvolutionQuadrature) {
  const double t = 0.5, s = 0.25, tau = t - s;
  const auto g = heat_evolve(PolyGauss1D::gaussian(1.0 / (4 * t)), tau);
  for (double x : {0.0, 0.5, 1.0}) {
    auto integrand = [&](double y) {
      return std::exp(-(x - y) * (x - y) / (4 * tau)) / std::sqrt(4 * std::numbers::pi * tau) *
             std::exp(-y * y / (4 * t));
    };
    const auto q = integrate_1d(integrand, x - 40.0, x + 40.0, {1e-15, 1e-14, 16, 4000});
    EXPECT_LT(rel(g(x), q.value), 1e-10);
    EXPECT_LT(rel(g(x), std::sqrt(t / (2 * t - s)) * std::exp(-x * x / (4 * (2 * t - s)))), 1e-14);
  }
}

TEST(PolyGauss, MomentIntegralBasics) {
  EXPECT_NEAR(moment_integral(PolyGauss1D::gaussian(1.0)), std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_EQ(moment_integral(PolyGauss1D(1.0, 0.0, 1.0, {0.0, 1.0})), 0.0);
}

TEST(PolyGauss, MomentIntegralMatchesGaussHermite) {
  // x^2 e^{-3 (x - 5)^2}: substitute x = 5 + y / sqrt(3)
  const auto f = times_monomial(PolyGauss1D::gaussian(3.0, 5.0), 2);
  const double gh = gauss_hermite_integrate([](double y) { return std::pow(5 + y / std::sqrt(3.0), 2); }, 20) /
                    std::sqrt(3.0);
  EXPECT_LT(rel(moment_integral(f), gh), 1e-12);
}

TEST(PolyGauss, ScaleShift) {
  const auto f = scale_shift(PolyGauss1D::gaussian(1.0), 2.0, 3.0);
  EXPECT_DOUBLE_EQ(f.width(), 4.0);
  EXPECT_DOUBLE_EQ(f.center(), 1.5);
  EXPECT_THROW(scale_shift(f, 0.0, 1.0), contract_error);
  const PolyGauss1D g(0.7, 0.1, 1.2, {1.0, -0.4, 0.3});
  const auto id = scale_shift(g, 1.0, 0.0);
  for (double x : {-1.0, 0.3, 2.2}) EXPECT_NEAR(id(x), g(x), 1e-15);
  const auto h = scale_shift(g, 8.0, 5.0);
  for (double u : {0.0, 0.5}) EXPECT_NEAR(h((5.0 + u) / 8.0), g(u), 1e-14);
}

class PolyGaussInvariants : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240601};
};

TEST_F(PolyGaussInvariants, SemigroupMassAndDerivativeOnRandomTerms) {
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = random_term(rng);
    const double t1 = 0.05 + 0.3 * (rep % 7) / 7.0, t2 = 0.02 + 0.2 * (rep % 5) / 5.0;
    const auto a = heat_evolve(heat_evolve(f, t1), t2), b = heat_evolve(f, t1 + t2);
    EXPECT_LT(rel(a.width(), b.width()), 1e-12);
    EXPECT_LT(rel(a.amplitude(), b.amplitude()), 1e-12);
    ASSERT_EQ(a.poly().size(), b.poly().size());
    for (std::size_t m = 0; m < a.poly().size(); ++m)
      EXPECT_NEAR(a.poly()[m], b.poly()[m], 1e-12 * (std::abs(b.poly()[m]) + 1.0));
    const double mass = moment_integral(f);
    for (double tau : {0.01, 0.1, 1.0}) EXPECT_NEAR(moment_integral(heat_evolve(f, tau)), mass, 1e-12 * (std::abs(mass) + 1.0));
    EXPECT_NEAR(moment_integral(differentiate(f)), 0.0, 1e-12 * (std::abs(f.amplitude()) + 1.0));
  }
}

TEST(HeatIntegrals, EngineMatchesFormula) {
  for (auto [t, s] : {std::pair{0.5, 0.25}, std::pair{1.0, 0.5}, std::pair{0.25, 0.1}})
    for (double x : {-1.0, 0.0, 1.0, 2.0})
      for (int order : {0, 1})
        EXPECT_NEAR(kernel_pair_integral(x, t, s, order), kernel_pair_formula(x, t, s, order), 1e-13);
  for (int j : {0, 1, 2})
    for (double k : {0.0, 3.0})
      for (double x : {-1.0, 0.0, 1.0, 2.0})
        for (int order : {0, 1})
          EXPECT_NEAR(dyadic_kernel_integral(x, 0.1, j, k, order), dyadic_kernel_formula(x, 0.1, j, k, order), 1e-13);
}

TEST(HeatIntegrals, SuiteCoversGridAndMatchesQuadrature) {
  const auto rows = heat_integral_suite();
  // K rows: 3 (t, s) x 4 x x 2 orders; D rows: 3 t x 3 j x 2 k x 4 x x 2 orders
  ASSERT_EQ(rows.size(), 24u + 144u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.converged) << r.name << " x=" << r.x;
    EXPECT_LE(r.rel_error, 1e-12) << r.name << " x=" << r.x << " t=" << r.t;
  }
}
