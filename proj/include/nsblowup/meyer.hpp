#pragma once

/// One-dimensional Meyer scaling function and wavelet, built on the
/// frequency side, with spatial evaluation and orthonormality checks.
///
/// Fourier convention: f_hat(xi) = integral f(x) e^{-i x xi} dx, inverse
/// with 1/(2 pi). Under it
///
///   phi0(x) = (1/pi) integral_0^{4pi/3} Psi0(xi) cos(x xi) dxi,
///   phi1(x) = (1/pi) integral_0^{8pi/3} Omega(xi) cos((x - 1/2) xi) dxi.
///
/// Inner products and moments use the fact that both functions are band
/// limited: a trapezoid sum with step h is exact for an integrand whose
/// spectrum lies in |xi| < 2 pi / h, so the only error is truncation of
/// the spatial range.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nsblowup/errors.hpp"
#include "nsblowup/quadrature.hpp"
#include "nsblowup/reduce.hpp"
#include "nsblowup/wavelet_index.hpp"

namespace nsblowup {

namespace meyer {

inline constexpr double kPi = std::numbers::pi;

inline double smooth_f(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1, nu(t) + nu(1 - t) = 1.
inline double nu(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = smooth_f(t), b = smooth_f(1.0 - t);
  return a / (a + b);
}

/// Psi0: 1 on |xi| <= 2pi/3, 0 on |xi| >= 4pi/3.
inline double psi0(double xi) {
  const double a = std::abs(xi);
  if (a <= 2.0 * kPi / 3.0) return 1.0;
  if (a >= 4.0 * kPi / 3.0) return 0.0;
  return std::cos(0.5 * kPi * nu(3.0 * a / (2.0 * kPi) - 1.0));
}

/// Omega = sqrt(Psi0(xi/2)^2 - Psi0(xi)^2), supported in 2pi/3 <= |xi| <= 8pi/3.
inline double omega(double xi) {
  const double a = std::abs(xi);
  if (a <= 2.0 * kPi / 3.0 || a >= 8.0 * kPi / 3.0) return 0.0;
  if (a <= 4.0 * kPi / 3.0) return std::sin(0.5 * kPi * nu(3.0 * a / (2.0 * kPi) - 1.0));
  return std::cos(0.5 * kPi * nu(3.0 * a / (4.0 * kPi) - 1.0));
}

}  // namespace meyer

/// kind 0: Psi0 (real); kind 1: Omega(xi) e^{-i xi / 2}.
inline std::complex<double> psi_hat(int kind, double xi) {
  require(kind == 0 || kind == 1, "psi_hat: kind must be 0 or 1");
  if (kind == 0) return {meyer::psi0(xi), 0.0};
  return meyer::omega(xi) * std::polar(1.0, -0.5 * xi);
}

/// Largest |xi| in the support of the given kind.
inline double band_limit(int kind) { return kind == 0 ? 4.0 * meyer::kPi / 3.0 : 8.0 * meyer::kPi / 3.0; }

/// Spatial value by adaptive quadrature of the inverse transform, split at
/// the profile breakpoints. `converged` is false if the panel budget ran out.
/// For large |x| the two pieces cancel to many digits, so tolerances much
/// below 1e-10 sit under the roundoff floor of the panel sums.
inline QuadratureResult phi_spatial(int kind, double x, double tol = 1e-10, int max_panels = 20000) {
  require(kind == 0 || kind == 1, "phi_spatial: kind must be 0 or 1");
  require(tol > 0.0, "phi_spatial: tol must be > 0");
  constexpr double p = meyer::kPi;
  QuadratureOptions o;
  o.abs_tol = tol * p;
  o.rel_tol = 0.0;
  // keep panels shorter than about one oscillation period
  const double freq = std::abs(kind == 0 ? x : x - 0.5);
  o.initial_panels = std::max(2, static_cast<int>(std::ceil(freq * band_limit(kind) / (2.0 * p))) + 1);
  o.max_panels = max_panels;
  QuadratureResult r;
  if (kind == 0) {
    const std::array<double, 3> br{0.0, 2.0 * p / 3.0, 4.0 * p / 3.0};
    r = integrate_1d_pieces([&](double xi) { return meyer::psi0(xi) * std::cos(x * xi); }, br, o);
  } else {
    const std::array<double, 3> br{2.0 * p / 3.0, 4.0 * p / 3.0, 8.0 * p / 3.0};
    r = integrate_1d_pieces([&](double xi) { return meyer::omega(xi) * std::cos((x - 0.5) * xi); }, br, o);
  }
  r.value /= p;
  r.error_estimate /= p;
  return r;
}

/// Fixed composite Gauss-Legendre form of the inverse transform:
/// phi(x) = sum_q w_q profile(xi_q) cos((x - shift) xi_q). Panels are sized so
/// that |x| up to `max_abs_x` stays well resolved; the adaptive phi_spatial
/// is the independent check on it.
class MeyerRule {
 public:
  MeyerRule(int kind, double max_abs_x, std::size_t order = 16) : kind_(kind) {
    require(kind == 0 || kind == 1, "MeyerRule: kind must be 0 or 1");
    constexpr double p = meyer::kPi;
    const auto gl = gauss_legendre_rule(order);
    std::vector<double> br = kind == 0 ? std::vector<double>{0.0, 2.0 * p / 3.0, 4.0 * p / 3.0}
                                       : std::vector<double>{2.0 * p / 3.0, 4.0 * p / 3.0, 8.0 * p / 3.0};
    for (std::size_t piece = 0; piece + 1 < br.size(); ++piece) {
      const double a = br[piece], b = br[piece + 1];
      // about two radians of phase per panel at the largest |x|, never fewer than 64 panels
      const auto panels = static_cast<std::size_t>(std::max(64.0, std::ceil((max_abs_x + 1.0) * (b - a) / 2.0)));
      const double h = (b - a) / static_cast<double>(panels);
      for (std::size_t q = 0; q < panels; ++q) {
        const double mid = a + (static_cast<double>(q) + 0.5) * h;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
          const double xi = mid + 0.5 * h * gl.nodes[i];
          const double prof = kind == 0 ? meyer::psi0(xi) : meyer::omega(xi);
          nodes_.push_back(xi);
          weights_.push_back(0.5 * h * gl.weights[i] * prof / p);
        }
      }
    }
  }

  double operator()(double x) const {
    const double u = kind_ == 0 ? x : x - 0.5;
    std::vector<double> parts(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) parts[i] = weights_[i] * std::cos(u * nodes_[i]);
    return pairwise_sum(parts);
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  int kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Samples of phi0 and phi1 on the grid n * step, |n * step| <= half_width.
class MeyerTable {
 public:
  MeyerTable(double step = 0.125, double half_width = 256.0, unsigned workers = 1)
      : step_(step), count_(static_cast<long>(std::floor(half_width / step))) {
    require(step > 0.0 && half_width > 0.0, "MeyerTable: step and half_width must be > 0");
    const std::size_t total = static_cast<std::size_t>(2 * count_ + 1);
    for (int kind = 0; kind < 2; ++kind) {
      const MeyerRule rule(kind, half_width);
      values_[kind] = parallel_map(total, workers, [&](std::size_t i) {
        return rule((static_cast<long>(i) - count_) * step_);
      });
    }
  }

  double step() const { return step_; }
  long half_count() const { return count_; }
  double half_width() const { return count_ * step_; }

  /// phi_kind(n * step); zero outside the tabulated range.
  double at(int kind, long n) const {
    if (n < -count_ || n > count_) return 0.0;
    return values_[kind][static_cast<std::size_t>(n + count_)];
  }

 private:
  double step_;
  long count_;
  std::array<std::vector<double>, 2> values_;
};

/// integral phi_kind(x) x^m dx by the band-limited trapezoid rule.
inline double meyer_moment(const MeyerTable& tab, int kind, int m) {
  require(m >= 0, "meyer_moment: m >= 0");
  // spectrum of x^m phi is that of phi, so any step < 2pi / band works
  require(tab.step() < 2.0 * meyer::kPi / band_limit(kind), "meyer_moment: step too coarse");
  std::vector<double> parts;
  for (long n = -tab.half_count(); n <= tab.half_count(); ++n) {
    const double x = n * tab.step();
    parts.push_back(tab.step() * std::pow(x, m) * tab.at(kind, n));
  }
  return pairwise_sum(parts);
}

/// 1-D inner product < phi^a_{j,k}, phi^b_{j',k'} >, phi_{j,k} = 2^{j/2} phi(2^j x - k),
/// for |j - j'| <= 1. Dilation invariance reduces it to j = 0 on the coarser side.
inline double meyer_inner_1d(const MeyerTable& tab, int kind_a, int j_a, long k_a, int kind_b, int j_b, long k_b) {
  require(std::abs(j_a - j_b) <= 1, "meyer_inner_1d: need |j - j'| <= 1");
  if (j_a > j_b) return meyer_inner_1d(tab, kind_b, j_b, k_b, kind_a, j_a, k_a);
  const int d = j_b - j_a;
  const double bw = band_limit(kind_a) + std::ldexp(band_limit(kind_b), d);
  require(tab.step() < 2.0 * meyer::kPi / bw, "meyer_inner_1d: table step too coarse for this pair");
  // x on the step grid; phi_a(x - k_a) and phi_b(2^d x - k_b) are then on it too
  const long per_unit = std::lround(1.0 / tab.step());
  require(std::abs(per_unit * tab.step() - 1.0) < 1e-15, "meyer_inner_1d: step must be 1/integer");
  const long range = tab.half_count() / (1L << d);
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>(2 * range + 1));
  for (long n = -range; n <= range; ++n) {
    const double a = tab.at(kind_a, n - k_a * per_unit);
    const double b = tab.at(kind_b, (n << d) - k_b * per_unit);
    parts.push_back(tab.step() * a * b);
  }
  return pairwise_sum(parts) * std::sqrt(std::ldexp(1.0, d));
}

/// < Phi^eps_{j,k}, Phi^eps'_{j',k'} > as a product of 1-D inner products.
inline double meyer_inner(const MeyerTable& tab, const WaveletIndex& a, const WaveletIndex& b) {
  require(a.epsilon.size() == b.epsilon.size() && a.k.size() == a.epsilon.size() && b.k.size() == b.epsilon.size(),
          "meyer_inner: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < a.epsilon.size(); ++i)
    v *= meyer_inner_1d(tab, a.epsilon[i], a.j, a.k[i], b.epsilon[i], b.j, b.k[i]);
  return v;
}

struct OrthonormalityReport {
  double fourier_partition_dev = 0.0;  // max |sum_m |Psi^kind(xi + 2 pi m)|^2 - 1|
  double spatial_dev = 0.0;            // max |<., .> - delta|
  std::size_t pairs = 0;
};

/// Fourier-side partition over |m| <= 3 on a uniform grid of `grid_points`
/// in [0, 2 pi], both kinds.
inline double fourier_partition_deviation(std::size_t grid_points = 50) {
  double dev = 0.0;
  for (int kind = 0; kind < 2; ++kind)
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double xi = 2.0 * meyer::kPi * static_cast<double>(i) / static_cast<double>(grid_points);
      double s = 0.0;
      for (int m = -3; m <= 3; ++m) s += std::norm(psi_hat(kind, xi + 2.0 * meyer::kPi * m));
      dev = std::max(dev, std::abs(s - 1.0));
    }
  return dev;
}

inline OrthonormalityReport orthonormality_check(const MeyerTable& tab,
                                                 const std::vector<std::pair<WaveletIndex, WaveletIndex>>& pairs,
                                                 std::size_t grid_points = 50) {
  OrthonormalityReport r;
  r.fourier_partition_dev = fourier_partition_deviation(grid_points);
  for (const auto& [a, b] : pairs) {
    require(a.is_wavelet() && b.is_wavelet(), "orthonormality_check: epsilon must be nonzero");
    const bool same = a.epsilon == b.epsilon && a.j == b.j && a.k == b.k;
    r.spatial_dev = std::max(r.spatial_dev, std::abs(meyer_inner(tab, a, b) - (same ? 1.0 : 0.0)));
    ++r.pairs;
  }
  return r;
}

/// max over the grid of |phi1(x)| (1 + |x|)^power, split into the inner and
/// outer halves of [0, radius]; a decaying function has outer <= inner.
struct DecayReport {
  double inner_sup = 0.0;
  double outer_sup = 0.0;
};

inline DecayReport phi1_decay(const MeyerTable& tab, double radius = 50.0, double power = 4.0) {
  require(radius <= tab.half_width(), "phi1_decay: radius exceeds the table");
  DecayReport d;
  const long nmax = static_cast<long>(std::floor(radius / tab.step()));
  for (long n = -nmax; n <= nmax; ++n) {
    const double x = n * tab.step();
    const double v = std::abs(tab.at(1, n)) * std::pow(1.0 + std::abs(x), power);
    if (std::abs(x) <= 0.5 * radius)
      d.inner_sup = std::max(d.inner_sup, v);
    else
      d.outer_sup = std::max(d.outer_sup, v);
  }
  return d;
}

}  // namespace nsblowup
