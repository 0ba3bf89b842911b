// Acceptance run: one line per criterion with the measured value, the pinned
// tolerance and the wall-clock budget. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nsblowup/nsblowup.hpp"

using namespace nsblowup;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Outcome heat_integrals() {
  double worst = 0.0;
  bool converged = true;
  for (const auto& r : heat_integral_suite()) {
    worst = std::max(worst, r.rel_error);
    converged = converged && r.converged;
  }
  return {converged && worst <= 1e-10,
          "max rel error " + fmt("%.3g", worst) + " <= 1e-10" + (converged ? "" : ", quadrature unconverged")};
}

Outcome poly_gauss_invariants() {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> amp(-2.0, 2.0), cen(-3.0, 3.0), wid(0.2, 4.0), coef(-1.5, 1.5),
      tau(0.01, 0.5), xs(-4.0, 4.0);
  std::uniform_int_distribution<int> deg(0, 4);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& c : p) c = coef(rng);
    const PolyGauss1D f(amp(rng), cen(rng), wid(rng), p);
    const double t1 = tau(rng), t2 = tau(rng);
    // semigroup: e^{t2 L} e^{t1 L} f = e^{(t1 + t2) L} f, pointwise against the sup scale
    const auto a = heat_evolve(heat_evolve(f, t1), t2), b = heat_evolve(f, t1 + t2);
    const double scale = std::abs(b.amplitude()) * (1.0 + std::abs(b.poly()[0]));
    for (int k = 0; k < 5; ++k) {
      const double x = xs(rng);
      worst = std::max(worst, std::abs(a(x) - b(x)) / std::max(scale, std::abs(b(x))));
    }
    // mass is conserved by the heat flow
    const double mass = moment_integral(f);
    const double m_scale = std::abs(f.amplitude()) * std::sqrt(std::numbers::pi / f.width()) + std::abs(mass);
    worst = std::max(worst, std::abs(moment_integral(b) - mass) / m_scale);
    // derivatives carry no mass and commute with the flow
    const auto d = differentiate(f);
    worst = std::max(worst, std::abs(moment_integral(d)) / m_scale);
    const auto dh = differentiate(b), hd = heat_evolve(differentiate(heat_evolve(f, t1)), t2);
    for (int k = 0; k < 5; ++k) {
      const double x = xs(rng);
      worst = std::max(worst, std::abs(dh(x) - hd(x)) / std::max(1.0, std::abs(dh(x))) /
                                  std::max(1.0, std::abs(b.amplitude()) * std::sqrt(b.width())));
    }
  }
  return {worst <= 1e-12, "200 terms, max scaled deviation " + fmt("%.3g", worst) + " <= 1e-12"};
}

Outcome flow_symmetries() {
  const auto rows = flow_symmetry_suite(FlowSpec::with_levels({1, 2, 3}));
  double worst = 0.0;
  std::string failed;
  for (const auto& r : rows) {
    worst = std::max(worst, r.max_error);
    if (!r.passed && failed.empty()) failed = r.name;
  }
  return {failed.empty(), std::to_string(rows.size()) + " identities x 100 points, max error " + fmt("%.3g", worst) +
                              " <= 1e-12" + (failed.empty() ? "" : ", failed: " + failed)};
}

Outcome positivity() {
  const auto spec = FlowSpec::up_to(5);
  double worst = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const double t = (a + 0.5) / 10.0, s = t * (b + 0.5) / 10.0;
      const auto c = h_st_closed(spec, s, t, 6);
      worst = std::min(worst, c.value + c.error_bound);
    }
  return {worst >= 0.0, "100 grid points, min h + bound " + fmt("%.4g", worst) + " >= 0"};
}

Outcome dyadic_bound() {
  const auto rep = dyadic_lower_bound(FlowSpec::up_to(6), 0.25, {2, 3, 4, 5, 6});
  bool positive = true;
  for (const auto& r : rep.rows) positive = positive && r.ratio > 0.0;
  const double q = rep.min_ratio / rep.median_ratio;
  return {positive && q >= 0.2,
          "r_j > 0: " + std::string(positive ? "yes" : "no") + ", min/median " + fmt("%.4f", q) + " >= 0.2"};
}

Outcome divergence_mechanism() {
  const auto rep = partial_blowup_integral(FlowSpec::up_to(6), 0.25, 6, 2);
  bool strict = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].J > 2) strict = strict && rep.rows[i].I > rep.rows[i - 1].I;
  const bool ok = rep.fit.slope > 0.0 && rep.fit.r_squared >= 0.99 && strict;
  return {ok, "slope " + fmt("%.4g", rep.fit.slope) + " > 0, R^2 " + fmt("%.4f", rep.fit.r_squared) +
                  " >= 0.99, strictly increasing: " + (strict ? "yes" : "no")};
}

Outcome besov_dichotomy() {
  auto norm = [](int J, double q) { return norm_besov_inf(coeff_field_of_h(J, 3), -1.0, q); };
  const double n12 = norm(12, 3.0), n24 = norm(24, 3.0);
  const double change = std::abs(n24 - n12) / n24;
  double worst_growth = 0.0;
  for (int J : {6, 12}) {
    const double g = std::pow(norm(2 * J, 2.0), 2) - std::pow(norm(J, 2.0), 2);
    worst_growth = std::max(worst_growth, std::abs(g / std::log(2.0) - 1.0));
  }
  return {change <= 0.01 && worst_growth <= 0.1, "q=3 change " + fmt("%.4f", change) +
                                                     " <= 0.01, q=2 doubling growth off ln 2 by " +
                                                     fmt("%.4f", worst_growth) + " <= 0.10"};
}

Outcome scaling_invariance() {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<NormSpec> specs{{NormSpace::besov_inf, {2, 2, -1, 0}},      {NormSpace::besov_inf, {2, 3, -1, 0}},
                                    {NormSpace::besov_inf, {2, inf, -1, 0}},    {NormSpace::besov_morrey, {2, 3, -1, 0}},
                                    {NormSpace::besov_morrey, {2, 2, 0.5, 1.5}}, {NormSpace::besov_morrey, {1, 3, 1, 2}},
                                    {NormSpace::besov_morrey, {3, inf, -0.5, 0.5}}};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto f = random_sparse_field(3, 20, -2, 4, 10, seed);
    for (const auto& s : specs) {
      const double base = evaluate_norm(f, s);
      for (int m = -2; m <= 2; ++m) worst = std::max(worst, rel(evaluate_norm(scaling_reindex(f, m), s), base));
    }
  }
  return {worst <= 1e-12, "50 fields x 7 norms x 5 shifts, max rel change " + fmt("%.3g", worst) + " <= 1e-12"};
}

Outcome initial_data() {
  const auto d = build_u0(1.0, 6, 3);
  const double div = divergence_check(d, random_points(50, 3, 0.0, 3.0, 11));
  const auto tail = schwartz_tail_check(1.0, 4, 3, 3, 2);
  return {div <= 1e-12 && tail.all_finite && tail.max_ratio <= 1.1,
          "max |div u0| " + fmt("%.3g", div) + " <= 1e-12, tail sup ratio " + fmt("%.4f", tail.max_ratio) +
              " <= 1.1" + (tail.all_finite ? "" : ", non-finite sup")};
}

Outcome duhamel() {
  const double t = 0.25;
  const auto rep = duhamel_pairing_check(FlowSpec::up_to(2), t, {t / 4, t / 2, 3 * t / 4});
  return {rep.max_discrepancy <= 1e-8, "3 times, max rel discrepancy " + fmt("%.3g", rep.max_discrepancy) + " <= 1e-8"};
}

Outcome meyer_suite() {
  using meyer::kPi;
  double support = 0.0, partition = 0.0;
  for (int i = -4000; i <= 4000; ++i) {
    const double xi = i * 0.0025;
    if (std::abs(xi) >= 4 * kPi / 3) support = std::max(support, std::abs(meyer::psi0(xi)));
    if (std::abs(xi) <= 2 * kPi / 3 || std::abs(xi) >= 8 * kPi / 3) support = std::max(support, std::abs(meyer::omega(xi)));
    if (std::abs(xi) >= 2 * kPi / 3 && std::abs(xi) <= 4 * kPi / 3)
      partition = std::max(partition, std::abs(std::norm(meyer::omega(xi)) + std::norm(meyer::omega(2 * xi)) - 1.0));
  }
  partition = std::max(partition, fourier_partition_deviation(50));

  const MeyerTable tab;
  std::vector<std::pair<WaveletIndex, WaveletIndex>> pairs;
  for (int j = 0; j <= 2; ++j)
    for (int jp = std::max(0, j - 1); jp <= j + 1; ++jp)
      for (long k = -1; k <= 1; ++k)
        for (long kp = k - 3; kp <= k + 3; ++kp) pairs.push_back({{{1}, j, {k}}, {{1}, jp, {kp}}});
  pairs.push_back({{{1, 0, 1}, 1, {0, 1, 2}}, {{1, 0, 1}, 1, {0, 1, 2}}});
  pairs.push_back({{{1, 1, 0}, 0, {0, 0, 0}}, {{0, 1, 1}, 0, {0, 0, 0}}});
  const auto ortho = orthonormality_check(tab, pairs);
  const double fourier = std::max({support, partition, ortho.fourier_partition_dev});
  return {fourier <= 1e-10 && ortho.spatial_dev <= 1e-6,
          "Fourier-side " + fmt("%.3g", fourier) + " <= 1e-10, spatial " + fmt("%.3g", ortho.spatial_dev) + " <= 1e-6 (" +
              std::to_string(ortho.pairs) + " pairs)"};
}

Outcome oracle_independence() {
  const auto spec = FlowSpec::up_to(2);
  const std::pair<double, double> samples[] = {{0.05, 0.25}, {0.1, 0.25}, {0.2, 0.3}, {0.1, 0.5}, {0.25, 0.5},
                                               {0.4, 0.5},   {0.3, 0.7},  {0.6, 0.7}, {0.2, 0.9}, {0.8, 0.9}};
  double worst = 0.0;  // |closed - quadrature| / combined bound
  bool converged = true;
  for (const auto& [s, t] : samples) {
    const auto c = h_st_closed(spec, s, t, 6);
    const auto q = h_st_quadrature(spec, s, t, default_correlation_box(3), 1e-8);
    converged = converged && q.converged;
    worst = std::max(worst, std::abs(c.value - q.value) / (c.error_bound + q.error_bound));
  }
  return {converged && worst <= 1.0, "10 samples, max |closed - quadrature| / combined bound " + fmt("%.3g", worst) +
                                         " <= 1" + (converged ? "" : ", quadrature unconverged")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form heat integrals vs quadrature", 5, heat_integrals},
      {2, "Gaussian-polynomial semigroup, mass, derivative", 5, poly_gauss_invariants},
      {3, "flow symmetry suite, levels {1,2,3}", 10, flow_symmetries},
      {4, "positivity of h on a 10x10 (s,t) grid", 120, positivity},
      {5, "dyadic lower bound ratios, j = 2..6", 120, dyadic_bound},
      {6, "I(J) against H(J), J = 2..6", 300, divergence_mechanism},
      {7, "Besov q = 3 vs q = 2 dichotomy", 1, besov_dichotomy},
      {8, "critical scaling invariance of the norms", 5, scaling_invariance},
      {9, "divergence and Schwartz tails of u0", 30, initial_data},
      {10, "Duhamel transpose identity", 60, duhamel},
      {11, "Meyer support, partition, orthonormality", 30, meyer_suite},
      {12, "closed-form vs quadrature correlation", 300, oracle_independence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s; %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                secs, c.budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
