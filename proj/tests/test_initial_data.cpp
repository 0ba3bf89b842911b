#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nsblowup/initial_data.hpp"

using namespace nsblowup;

TEST(Vaguelettes, PrototypeShapes) {
  const auto v = make_vaguelettes(3);
  const std::vector<double> x{0.3, -0.7, 1.1};
  const double g = std::exp(-(0.09 + 0.49 + 1.21));
  EXPECT_NEAR(v.psi1(x), x[1] * x[2] * g, 1e-15);
  EXPECT_NEAR(v.psi2(x), -x[0] * x[2] * g, 1e-15);
  EXPECT_THROW(make_vaguelettes(2), contract_error);
}

TEST(Vaguelettes, VanishingMoments) {
  for (std::size_t n : {3u, 4u}) {
    const auto rep = vanishing_moments_check(make_vaguelettes(n));
    EXPECT_EQ(rep.rows.size(), 2 * (n + 1));
    EXPECT_LE(rep.max_abs, 1e-15);
  }
  const auto rep = vanishing_moments_check(make_vaguelettes(3));
  EXPECT_NEAR(rep.second_moment_23, std::pow(std::numbers::pi, 1.5) / 4, 1e-14);
}

TEST(InitialData, BuildAndTermCounts) {
  const auto d = build_u0(0.5, 3, 3);
  EXPECT_EQ(d.levels, (std::vector<int>{1, 2, 3}));
  for (int j = 1; j <= 3; ++j) EXPECT_EQ(d.term_count(1, j), static_cast<std::size_t>(std::pow((1 << j) + 1, 3)));
  EXPECT_THROW(build_u0(1.0, 2, 2), contract_error);
  EXPECT_THROW(build_u0(0.0, 2, 3), contract_error);
  EXPECT_THROW(build_u0(1.0, 0, 3), contract_error);
}

TEST(InitialData, FirstComponentIsDeltaTimesV1) {
  const double delta = 0.7;
  const auto d = build_u0(delta, {1}, 3);
  const auto lf = flow_v1_level(FlowSpec::up_to(1), 1, 0.0);
  for (const auto& x : random_points(20, 3, 0.0, 3.0, 4)) EXPECT_NEAR(d.eval(1, x), delta * lf(x), 1e-14);
  const auto e = build_u0(delta, 3, 3);
  const auto v = flow_v1(FlowSpec::up_to(3), 0.25);
  const auto ev = heat_evolve_data(e, 0.25);
  for (const auto& x : random_points(10, 3, 0.0, 3.0, 5))
    EXPECT_NEAR(ev.eval(1, x), delta * v(x), 1e-12 * std::max(1.0, std::abs(v(x))));
}

TEST(InitialData, ZeroAtCenter) {
  const auto d = build_u0(1.0, 4, 3);
  EXPECT_NEAR(d.eval(1, std::vector<double>{1.5, 1.5, 1.5}), 0.0, 1e-14);
  EXPECT_NEAR(d.eval(2, std::vector<double>{1.5, 1.5, 1.5}), 0.0, 1e-14);
}

TEST(InitialData, PrototypeDivergenceCancels) {
  const auto v = make_vaguelettes(3);
  for (const auto& x : random_points(20, 3, -2.0, 2.0, 8)) {
    const double d = differentiate_axis(v.psi1, 0)(x) + differentiate_axis(v.psi2, 1)(x);
    EXPECT_NEAR(d, 0.0, 1e-15);
  }
}

TEST(InitialData, DivergenceFree) {
  const auto pts = random_points(50, 3, 0.0, 3.0, 21);
  for (int J : {1, 3, 5}) {
    const auto d = build_u0(1.0, J, 3);
    EXPECT_LE(divergence_check(d, pts), 1e-12) << J;
    EXPECT_LE(divergence_check(heat_evolve_data(d, 0.05), pts), 1e-12) << J;
  }
  EXPECT_LE(divergence_check(build_u0(1.0, 2, 4), random_points(50, 4, 0.0, 3.0, 22)), 1e-12);
}

TEST(InitialData, DerivativeMatchesFiniteDifference) {
  const auto d = build_u0(1.0, 2, 3);
  const std::vector<int> beta{0, 1, 0};
  const std::vector<double> x{1.2, 1.4, 1.9};
  const double h = 1e-5;
  std::vector<double> xp = x, xm = x;
  xp[1] += h;
  xm[1] -= h;
  const double fd = (d.eval(2, xp) - d.eval(2, xm)) / (2 * h);
  EXPECT_NEAR(d.eval_derivative(2, beta, x), fd, 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST(Cutoff, PlateauAndSupport) {
  EXPECT_EQ(cutoff_phi(std::vector<double>{0.0, 0.0, 0.0}), 1.0);
  EXPECT_EQ(cutoff_phi(std::vector<double>{2 * std::sqrt(3.0) - 1e-9, 0.0, 0.0}), 1.0);
  EXPECT_EQ(cutoff_phi(std::vector<double>{6.0, 0.0, 0.0}), 0.0);
  const double mid = cutoff_phi(std::vector<double>{4.5, 0.0, 0.0});
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
}

TEST(SchwartzTail, FiniteAndUniformInTruncation) {
  const auto rep = schwartz_tail_check(1.0, 4, 3, 3, 2);
  EXPECT_TRUE(rep.all_finite);
  EXPECT_LE(rep.max_ratio, 1.1);
  // 2 components x 10 multi-indices (|beta| <= 2 in 3 variables) x 4 values of N
  EXPECT_EQ(rep.rows.size(), 2u * 10u * 4u);
  for (const auto& r : rep.rows) {
    EXPECT_GT(r.sup_J, 0.0);
    EXPECT_LE(r.sup_cut_J, r.sup_J);
  }
}

TEST(SchwartzTail, GridStaysOutsidePlateau) {
  TailGrid g;
  const auto pts = tail_points(3, g);
  EXPECT_EQ(pts.size(), g.shells * (g.directions + 2));
  for (const auto& p : pts) {
    double r2 = 0.0;
    for (double c : p) r2 += (c - 1.5) * (c - 1.5);
    EXPECT_GE(std::sqrt(r2), 2 * std::sqrt(3.0) - 1e-12);
    EXPECT_LE(std::sqrt(r2), g.r_max + 1e-12);
  }
}

TEST(InitialData, CoefficientFieldAndDeltaSelection) {
  const auto d = build_u0(1.0, 6, 3);
  const auto f = vaguelette_coeff_field(d);
  const auto h = coeff_field_of_h(6, 3);
  ASSERT_EQ(f.blocks().size(), h.blocks().size());
  for (std::size_t i = 0; i < f.blocks().size(); ++i) EXPECT_EQ(f.blocks()[i].a, h.blocks()[i].a);
  const std::vector<NormSpec> norms{{NormSpace::besov_inf, {2, 3, -1, 0}}, {NormSpace::besov_morrey, {2, 3, -1, 0}}};
  const double delta = delta_for_target(0.01, h, norms);
  for (const auto& s : norms) EXPECT_LE(evaluate_norm(h.scaled(delta), s), 0.01 * (1 + 1e-14));
}

TEST(InitialData, JsonExport) {
  const auto j = to_json(build_u0(0.25, 2, 3));
  EXPECT_EQ(j.at("delta").get<double>(), 0.25);
  EXPECT_EQ(j.at("u1").size(), 2u);
  EXPECT_EQ(j.at("u1")[1].at("axes")[0].at("terms").get<int>(), 5);
}

TEST(MultiIndices, Counts) {
  EXPECT_EQ(multi_indices(3, 0).size(), 1u);
  EXPECT_EQ(multi_indices(3, 1).size(), 4u);
  EXPECT_EQ(multi_indices(3, 2).size(), 10u);
  EXPECT_EQ(multi_indices(4, 2).size(), 15u);
}
