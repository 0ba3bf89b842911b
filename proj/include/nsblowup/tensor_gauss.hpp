#pragma once

/// n-dimensional closed forms built as sums of tensor products of
/// PolyGauss1D factors.

#include <cstddef>
#include <span>
#include <vector>

#include "nsblowup/errors.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/reduce.hpp"

namespace nsblowup {

struct TensorTerm {
  double amplitude = 1.0;
  std::vector<PolyGauss1D> factors;

  std::size_t dim() const { return factors.size(); }

  double operator()(std::span<const double> x) const {
    require(x.size() == factors.size(), "TensorTerm: point dimension mismatch");
    double v = amplitude;
    for (std::size_t i = 0; i < factors.size(); ++i) v *= factors[i](x[i]);
    return v;
  }
};

/// Terms are kept unaggregated; no like-term merging is attempted.
class GaussSumNd {
 public:
  explicit GaussSumNd(std::size_t dim) : dim_(dim) { require(dim > 0, "GaussSumNd: dim must be > 0"); }

  void add(TensorTerm t) {
    require(t.dim() == dim_, "GaussSumNd: term dimension mismatch");
    terms_.push_back(std::move(t));
  }
  void reserve(std::size_t n) { terms_.reserve(n); }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<TensorTerm>& terms() const { return terms_; }

  double operator()(std::span<const double> x) const {
    std::vector<double> parts;
    parts.reserve(terms_.size());
    for (const auto& t : terms_) parts.push_back(t(x));
    return pairwise_sum(parts);
  }

 private:
  std::size_t dim_;
  std::vector<TensorTerm> terms_;
};

inline TensorTerm isotropic_gaussian(std::size_t dim, double width, double amplitude = 1.0) {
  TensorTerm t{amplitude, {}};
  t.factors.assign(dim, PolyGauss1D::gaussian(width));
  return t;
}

inline double integrate_full(const TensorTerm& f) {
  double v = f.amplitude;
  for (const auto& g : f.factors) v *= moment_integral(g);
  return v;
}

inline double integrate_full(const GaussSumNd& f) {
  std::vector<double> parts;
  parts.reserve(f.size());
  for (const auto& t : f.terms()) parts.push_back(integrate_full(t));
  return pairwise_sum(parts);
}

inline TensorTerm multiply_nd(const TensorTerm& f, const TensorTerm& g) {
  require(f.dim() == g.dim(), "multiply_nd: dimension mismatch");
  TensorTerm out{f.amplitude * g.amplitude, {}};
  out.factors.reserve(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) out.factors.push_back(multiply(f.factors[i], g.factors[i]));
  return out;
}

inline GaussSumNd multiply_nd(const GaussSumNd& f, const TensorTerm& g) {
  require(f.dim() == g.dim(), "multiply_nd: dimension mismatch");
  GaussSumNd out(f.dim());
  out.reserve(f.size());
  for (const auto& t : f.terms()) out.add(multiply_nd(t, g));
  return out;
}

inline GaussSumNd multiply_nd(const GaussSumNd& f, const GaussSumNd& g) {
  require(f.dim() == g.dim(), "multiply_nd: dimension mismatch");
  GaussSumNd out(f.dim());
  out.reserve(f.size() * g.size());
  for (const auto& a : f.terms())
    for (const auto& b : g.terms()) out.add(multiply_nd(a, b));
  return out;
}

inline TensorTerm heat_evolve_nd(const TensorTerm& f, double tau) {
  require(tau >= 0.0, "heat_evolve_nd: tau must be >= 0");
  TensorTerm out{f.amplitude, {}};
  out.factors.reserve(f.dim());
  for (const auto& g : f.factors) out.factors.push_back(heat_evolve(g, tau));
  return out;
}

inline GaussSumNd heat_evolve_nd(const GaussSumNd& f, double tau) {
  require(tau >= 0.0, "heat_evolve_nd: tau must be >= 0");
  GaussSumNd out(f.dim());
  out.reserve(f.size());
  for (const auto& t : f.terms()) out.add(heat_evolve_nd(t, tau));
  return out;
}

/// Partial derivative along `axis` (0-based).
inline TensorTerm differentiate_axis(const TensorTerm& f, std::size_t axis) {
  require(axis < f.dim(), "differentiate_axis: axis out of range");
  TensorTerm out = f;
  out.factors[axis] = differentiate(f.factors[axis]).terms.front();
  return out;
}

inline GaussSumNd differentiate_axis(const GaussSumNd& f, std::size_t axis) {
  GaussSumNd out(f.dim());
  out.reserve(f.size());
  for (const auto& t : f.terms()) out.add(differentiate_axis(t, axis));
  return out;
}

inline TensorTerm scaled(const TensorTerm& f, double factor) {
  TensorTerm out = f;
  out.amplitude *= factor;
  return out;
}

}  // namespace nsblowup
