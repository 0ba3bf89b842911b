#pragma once

/// Exact algebra on one-dimensional polynomial x Gaussian terms.
///
/// A term is  amplitude * P(x - center) * exp(-width * (x - center)^2)
/// with P stored by its coefficients in powers of (x - center). Products,
/// derivatives, heat evolution and full-line integrals of such terms are
/// again closed form, which is all the flow and correlation machinery
/// needs.
///
/// Heat evolution uses the kernel (4 pi tau)^{-1/2} exp(-(x-y)^2 / (4 tau)).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsblowup/errors.hpp"
#include "nsblowup/reduce.hpp"

namespace nsblowup {

inline constexpr std::size_t kMaxPolyDegree = 16;

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// (m - 1)!! for even m >= 0, i.e. 1, 1, 3, 15, 105, ...
inline double odd_double_factorial(std::size_t m) {
  double r = 1.0;
  for (std::size_t i = 1; i + 1 <= m; i += 2) r *= static_cast<double>(i);
  return r;
}

inline double horner(std::span<const double> c, double u) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
  return r;
}

/// Coefficients of Q(u) = P(u + d).
inline std::vector<double> shift_poly(std::span<const double> p, double d) {
  if (d == 0.0) return {p.begin(), p.end()};
  std::vector<double> q(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    double dp = 1.0;  // d^(i-m), m running down from i
    for (std::size_t m = i + 1; m-- > 0;) {
      q[m] += p[i] * binomial(i, m) * dp;
      dp *= d;
    }
  }
  return q;
}

inline std::vector<double> poly_product(std::span<const double> a, std::span<const double> b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

}  // namespace detail

class PolyGauss1D {
 public:
  PolyGauss1D(double amplitude, double center, double width, std::vector<double> poly = {1.0})
      : amplitude_(amplitude), center_(center), width_(width), poly_(std::move(poly)) {
    require(std::isfinite(width_) && width_ > 0.0, "PolyGauss1D: width must be finite and > 0");
    require(std::isfinite(center_), "PolyGauss1D: center must be finite");
    if (poly_.empty()) poly_.push_back(0.0);
    while (poly_.size() > 1 && poly_.back() == 0.0) poly_.pop_back();
    require(poly_.size() - 1 <= kMaxPolyDegree,
            "PolyGauss1D: polynomial degree " + std::to_string(poly_.size() - 1) + " exceeds cap");
  }

  static PolyGauss1D gaussian(double width, double center = 0.0, double amplitude = 1.0) {
    return {amplitude, center, width, {1.0}};
  }

  double amplitude() const { return amplitude_; }
  double center() const { return center_; }
  double width() const { return width_; }
  const std::vector<double>& poly() const { return poly_; }
  std::size_t degree() const { return poly_.size() - 1; }

  double operator()(double x) const {
    const double u = x - center_;
    return amplitude_ * detail::horner(poly_, u) * std::exp(-width_ * u * u);
  }

 private:
  double amplitude_;
  double center_;
  double width_;
  std::vector<double> poly_;
};

/// Unaggregated finite sum of PolyGauss1D terms.
struct GaussSum1D {
  std::vector<PolyGauss1D> terms;

  double operator()(double x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t(x);
    return s;
  }
  std::size_t size() const { return terms.size(); }
};

inline PolyGauss1D multiply(const PolyGauss1D& f, const PolyGauss1D& g) {
  const double a = f.width() + g.width();
  const double mu = (f.width() * f.center() + g.width() * g.center()) / a;
  const double dmu = f.center() - g.center();
  const double amp = f.amplitude() * g.amplitude() * std::exp(-f.width() * g.width() / a * dmu * dmu);
  require(f.degree() + g.degree() <= kMaxPolyDegree, "multiply: product degree exceeds cap");
  const auto pf = detail::shift_poly(f.poly(), mu - f.center());
  const auto pg = detail::shift_poly(g.poly(), mu - g.center());
  return {amp, mu, a, detail::poly_product(pf, pg)};
}

/// d/dx of f; always a single term (P' - 2 a u P) e^{-a u^2}.
inline GaussSum1D differentiate(const PolyGauss1D& f) {
  const auto& p = f.poly();
  std::vector<double> q(p.size() + 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) q[i - 1] += static_cast<double>(i) * p[i];
  for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] -= 2.0 * f.width() * p[i];
  return GaussSum1D{{PolyGauss1D(f.amplitude(), f.center(), f.width(), std::move(q))}};
}

/// e^{tau d^2/dx^2} f. The Gaussian width a becomes a / (1 + 4 a tau); the
/// polynomial is pushed through the Gaussian moments of the kernel product.
inline PolyGauss1D heat_evolve(const PolyGauss1D& f, double tau) {
  require(std::isfinite(tau) && tau >= 0.0, "heat_evolve: tau must be >= 0");
  if (tau == 0.0) return f;
  const double a = f.width();
  const double rho = 1.0 / (1.0 + 4.0 * a * tau);
  const double var2 = 2.0 * tau * rho;  // 1 / (2 b), b = a + 1/(4 tau)
  const auto& p = f.poly();
  std::vector<double> r(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t l = 0; l <= i; l += 2) {
      r[i - l] += p[i] * detail::binomial(i, l) * std::pow(rho, static_cast<double>(i - l)) *
                  detail::odd_double_factorial(l) * std::pow(var2, static_cast<double>(l / 2));
    }
  }
  return {f.amplitude() * std::sqrt(rho), f.center(), a * rho, std::move(r)};
}

/// Exact integral over the real line.
inline double moment_integral(const PolyGauss1D& f) {
  const double a = f.width();
  const auto& p = f.poly();
  double s = 0.0;
  double inv2a_pow = 1.0;
  for (std::size_t m = 0; m < p.size(); m += 2) {
    s += p[m] * detail::odd_double_factorial(m) * inv2a_pow;
    inv2a_pow /= 2.0 * a;
  }
  return f.amplitude() * std::sqrt(std::numbers::pi / a) * s;
}

/// Representation of x -> f(lambda * x - shift).
inline PolyGauss1D scale_shift(const PolyGauss1D& f, double lambda, double shift) {
  require(std::isfinite(lambda) && lambda != 0.0, "scale_shift: lambda must be nonzero");
  std::vector<double> q(f.poly());
  double lp = 1.0;
  for (double& c : q) {
    c *= lp;
    lp *= lambda;
  }
  return {f.amplitude(), (shift + f.center()) / lambda, f.width() * lambda * lambda, std::move(q)};
}

inline GaussSum1D differentiate(const GaussSum1D& f) {
  GaussSum1D out;
  out.terms.reserve(f.size());
  for (const auto& t : f.terms) out.terms.push_back(differentiate(t).terms.front());
  return out;
}

inline GaussSum1D heat_evolve(const GaussSum1D& f, double tau) {
  GaussSum1D out;
  out.terms.reserve(f.size());
  for (const auto& t : f.terms) out.terms.push_back(heat_evolve(t, tau));
  return out;
}

inline double moment_integral(const GaussSum1D& f) {
  std::vector<double> parts;
  parts.reserve(f.size());
  for (const auto& t : f.terms) parts.push_back(moment_integral(t));
  return pairwise_sum(parts);
}

inline GaussSum1D multiply(const GaussSum1D& f, const GaussSum1D& g) {
  GaussSum1D out;
  out.terms.reserve(f.size() * g.size());
  for (const auto& a : f.terms)
    for (const auto& b : g.terms) out.terms.push_back(multiply(a, b));
  return out;
}

inline PolyGauss1D scaled(const PolyGauss1D& f, double factor) {
  return {f.amplitude() * factor, f.center(), f.width(), f.poly()};
}

/// Multiplies the polynomial part by (x - center)^power.
inline PolyGauss1D times_centered_monomial(const PolyGauss1D& f, std::size_t power) {
  std::vector<double> q(power, 0.0);
  q.insert(q.end(), f.poly().begin(), f.poly().end());
  return {f.amplitude(), f.center(), f.width(), std::move(q)};
}

/// Multiplies by the plain monomial x^power (re-expanded about the center).
inline PolyGauss1D times_monomial(const PolyGauss1D& f, std::size_t power) {
  // x = u + center
  std::vector<double> mono(power + 1, 0.0);
  mono[power] = 1.0;
  const auto shifted = detail::shift_poly(mono, f.center());
  return {f.amplitude(), f.center(), f.width(), detail::poly_product(f.poly(), shifted)};
}

}  // namespace nsblowup
