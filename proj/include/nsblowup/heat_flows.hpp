#pragma once

/// The two heat flows entering the correlation function:
///
///  * the heat-evolved initial velocity  e^{s Lap} v1,  v1 = sum_j v1_j with
///      v1_j(x) = 2^j j^{-1/2} sum_{k in [2^j, 2^{j+1}]^n} psi(2^j x - k),
///      psi(y) = y_2 y_3 exp(-|y|^2);
///  * the test flow  -d/dx_1 e^{(t-s) Lap} g(t, .),  g(t, x) = exp(-|x|^2 / 4t).
///
/// Because the index box is a product of intervals, every level of the
/// first flow factors into one 1-D sum per axis (AxisFactorSum). Pointwise
/// evaluation and pair integrals both work on these factors and never
/// touch the (2^j + 1)^n-term expansion.
///
/// Sign convention: with the standard kernel, d/dx_1 e^{tau Lap} g is
/// negative for x_1 > 0. flow_Ag returns its negative, i.e.
///   kappa * x_1 * (2t - s)^{-(n+2)/2} * exp(-|x|^2 / (4 (2t - s))),
///   kappa = t^{n/2} / 2 > 0,
/// so that the correlation pairing is nonnegative.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nsblowup/errors.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/tensor_gauss.hpp"

namespace nsblowup {

struct FlowSpec {
  std::size_t dim = 3;
  std::vector<int> levels;  // sorted, unique, all >= 1
  double delta = 1.0;

  static FlowSpec up_to(int max_level, std::size_t dim = 3, double delta = 1.0) {
    FlowSpec s{dim, {}, delta};
    for (int j = 1; j <= max_level; ++j) s.levels.push_back(j);
    s.validate();
    return s;
  }

  static FlowSpec with_levels(std::vector<int> levels, std::size_t dim = 3, double delta = 1.0) {
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    FlowSpec s{dim, std::move(levels), delta};
    s.validate();
    return s;
  }

  void validate() const {
    require(dim >= 3, "FlowSpec: dimension must be >= 3");
    require(!levels.empty(), "FlowSpec: levels must be non-empty");
    require(std::is_sorted(levels.begin(), levels.end()), "FlowSpec: levels must be sorted");
    require(levels.front() >= 1, "FlowSpec: levels must be >= 1");
    require(levels.back() <= 24, "FlowSpec: levels above 24 are not supported");
    require(std::isfinite(delta) && delta > 0.0, "FlowSpec: delta must be > 0");
  }

  bool has_level(int j) const { return std::binary_search(levels.begin(), levels.end(), j); }
  int max_level() const { return levels.back(); }
};

/// Per-level amplitude 2^j j^{-1/2}.
inline double level_weight(int j) { return std::ldexp(1.0, j) / std::sqrt(static_cast<double>(j)); }

/// Number of lattice indices per axis at level j (inclusive box).
inline long level_box_size(int j) { return (1L << j) + 1; }

/// S_i^{(j)}(x, s) = sum over k_i in [2^j, 2^{j+1}] of the evolved 1-D factor.
struct AxisFactorSum {
  int level = 0;
  std::size_t axis = 0;
  GaussSum1D terms;

  double operator()(double x) const { return terms(x); }
};

/// One level of e^{s Lap} v1 in factored form: weight * prod_i axes[i](x_i).
struct LevelFlow {
  int level = 0;
  double weight = 0.0;
  std::vector<AxisFactorSum> axes;

  double operator()(std::span<const double> x) const {
    double v = weight;
    for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i](x[i]);
    return v;
  }
};

/// e^{s Lap} v1 truncated to the levels of a FlowSpec.
struct V1Flow {
  double s = 0.0;
  std::size_t dim = 0;
  std::vector<LevelFlow> levels;

  double operator()(std::span<const double> x) const {
    require(x.size() == dim, "V1Flow: point dimension mismatch");
    double v = 0.0;
    for (const auto& l : levels) v += l(x);
    return v;
  }
};

/// 1-D factor of psi along `axis`: y e^{-y^2} on axes 2 and 3 (0-based 1, 2),
/// e^{-y^2} elsewhere.
inline PolyGauss1D psi1_axis_factor(std::size_t axis) {
  if (axis == 1 || axis == 2) return {1.0, 0.0, 1.0, {0.0, 1.0}};
  return PolyGauss1D::gaussian(1.0);
}

/// Builds sum_k f(2^j x - k) over the level-j index range, evolved by s.
inline GaussSum1D dyadic_axis_sum(const PolyGauss1D& prototype, int j, double s) {
  const double scale = std::ldexp(1.0, j);
  const long lo = 1L << j, hi = 1L << (j + 1);
  GaussSum1D out;
  out.terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long k = lo; k <= hi; ++k)
    out.terms.push_back(heat_evolve(scale_shift(prototype, scale, static_cast<double>(k)), s));
  return out;
}

inline LevelFlow flow_v1_level(const FlowSpec& spec, int j, double s) {
  spec.validate();
  require(spec.has_level(j), "flow_v1_level: level " + std::to_string(j) + " not in spec");
  require(std::isfinite(s) && s >= 0.0, "flow_v1_level: s must be >= 0");
  LevelFlow lf{j, level_weight(j), {}};
  lf.axes.reserve(spec.dim);
  for (std::size_t i = 0; i < spec.dim; ++i) {
    // axes sharing a prototype share the sum; reuse instead of rebuilding
    if (i >= 3) {
      lf.axes.push_back(AxisFactorSum{j, i, lf.axes[0].terms});
      continue;
    }
    if (i == 2) {
      lf.axes.push_back(AxisFactorSum{j, i, lf.axes[1].terms});
      continue;
    }
    lf.axes.push_back(AxisFactorSum{j, i, dyadic_axis_sum(psi1_axis_factor(i), j, s)});
  }
  return lf;
}

inline V1Flow flow_v1(const FlowSpec& spec, double s) {
  spec.validate();
  V1Flow f{s, spec.dim, {}};
  for (int j : spec.levels) f.levels.push_back(flow_v1_level(spec, j, s));
  return f;
}

inline double eval_V(const V1Flow& flow, std::span<const double> x) {
  const double v = flow(x);
  return v * v;
}

inline double eval_V(const FlowSpec& spec, double s, std::span<const double> x) {
  return eval_V(flow_v1(spec, s), x);
}

/// Expands one level into its (2^j + 1)^n tensor terms.
inline GaussSumNd expand(const LevelFlow& lf) {
  const std::size_t n = lf.axes.size();
  GaussSumNd out(n);
  std::vector<std::size_t> idx(n, 0);
  std::size_t total = 1;
  for (const auto& a : lf.axes) total *= a.terms.size();
  out.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    TensorTerm t{lf.weight, {}};
    t.factors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.factors.push_back(lf.axes[i].terms.terms[idx[i]]);
    out.add(std::move(t));
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < lf.axes[i].terms.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

inline GaussSumNd expand(const V1Flow& f) {
  GaussSumNd out(f.dim);
  for (const auto& l : f.levels) {
    const GaussSumNd level = expand(l);
    for (const auto& t : level.terms()) out.add(t);
  }
  return out;
}

/// g(t, .) = exp(-|x|^2 / 4t) as a tensor term.
inline TensorTerm gaussian_test_function(double t, std::size_t dim) {
  require(t > 0.0, "gaussian_test_function: t must be > 0");
  return isotropic_gaussian(dim, 1.0 / (4.0 * t));
}

/// -d/dx_1 e^{(t-s) Lap} g(t, .), computed through the closed-form engine.
inline TensorTerm flow_Ag(double t, double s, std::size_t dim) {
  require(dim >= 1, "flow_Ag: dim must be >= 1");
  require(std::isfinite(s) && std::isfinite(t) && s > 0.0 && s < t, "flow_Ag: need 0 < s < t");
  auto evolved = heat_evolve_nd(gaussian_test_function(t, dim), t - s);
  return scaled(differentiate_axis(evolved, 0), -1.0);
}

/// The positive constant in front of x_1 (2t - s)^{-(n+2)/2} exp(...).
inline double flow_Ag_constant(double t, std::size_t dim) {
  return 0.5 * std::pow(t, 0.5 * static_cast<double>(dim));
}

struct SymmetryRow {
  std::string name;
  std::size_t points = 0;
  double max_error = 0.0;  // |lhs - rhs| / max(1, |lhs|), or a violation count for sign checks
  bool passed = true;
};

struct SymmetryOptions {
  double s = 0.1;
  double t = 0.5;
  std::size_t points = 100;
  double tol = 1e-12;
  unsigned long seed = 1;
};

/// Pointwise symmetry, zero-set, sign and monotonicity identities of the two
/// flows, each checked at `points` random points.
inline std::vector<SymmetryRow> flow_symmetry_suite(const FlowSpec& spec, const SymmetryOptions& o = {}) {
  spec.validate();
  require(o.points > 0, "flow_symmetry_suite: need at least one point");
  const std::size_t n = spec.dim;
  const V1Flow v = flow_v1(spec, o.s);
  const TensorTerm A = flow_Ag(o.t, o.s, n);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> box(-1.0, 4.0), pos(0.05, 4.0);
  std::vector<SymmetryRow> rows;

  using Map = std::function<void(std::vector<double>&)>;
  auto draw = [&](std::vector<double>& x) {
    for (auto& c : x) c = box(rng);
  };
  auto relation = [&](std::string name, const std::function<double(std::span<const double>)>& f, double sign,
                      const Map& map, const Map& sample) {
    SymmetryRow r{std::move(name), o.points, 0.0, true};
    std::vector<double> x(n), y(n);
    for (std::size_t p = 0; p < o.points; ++p) {
      sample(x);
      y = x;
      map(y);
      const double a = f(x), b = f(y);
      r.max_error = std::max(r.max_error, std::abs(a - sign * b) / std::max(1.0, std::abs(a)));
    }
    r.passed = r.max_error <= o.tol;
    rows.push_back(std::move(r));
  };
  auto flow_a = [&](std::span<const double> x) { return A(x); };
  auto flow_v = [&](std::span<const double> x) { return v(x); };

  relation("A odd in x1", flow_a, -1.0, [](auto& x) { x[0] = -x[0]; }, draw);
  for (std::size_t i = 1; i < n; ++i)
    relation("A even in x" + std::to_string(i + 1), flow_a, 1.0, [i](auto& x) { x[i] = -x[i]; }, draw);
  for (std::size_t i = 0; i < n; ++i) {
    const bool anti = i == 1 || i == 2;
    relation(std::string("v ") + (anti ? "antisymmetric" : "symmetric") + " under x" + std::to_string(i + 1) +
                 " -> 3 - x" + std::to_string(i + 1),
             flow_v, anti ? -1.0 : 1.0, [i](auto& x) { x[i] = 3.0 - x[i]; }, draw);
  }
  for (std::size_t i : {std::size_t{1}, std::size_t{2}}) {
    SymmetryRow r{"v vanishes on x" + std::to_string(i + 1) + " = 3/2", o.points, 0.0, true};
    std::vector<double> x(n);
    for (std::size_t p = 0; p < o.points; ++p) {
      draw(x);
      x[i] = 1.5;
      r.max_error = std::max(r.max_error, std::abs(v(x)));
    }
    r.passed = r.max_error <= o.tol;
    rows.push_back(std::move(r));
  }
  {
    // sign of v equals sign of (x2 - 3/2)(x3 - 3/2); max_error counts violations
    SymmetryRow r{"v sign pattern", o.points, 0.0, true};
    std::vector<double> x(n);
    for (std::size_t p = 0; p < o.points; ++p) {
      do draw(x);
      while (std::abs(x[1] - 1.5) < 1e-3 || std::abs(x[2] - 1.5) < 1e-3);
      const double want = (x[1] - 1.5) * (x[2] - 1.5);
      if (v(x) * want <= 0.0) r.max_error += 1.0;
    }
    r.passed = r.max_error == 0.0;
    rows.push_back(std::move(r));
  }
  {
    // per-level |v_j(x)| >= |v_j(x1 + 3, x')| for x1 > 0; max_error is the worst excess
    SymmetryRow r{"per-level monotonicity under x1 -> x1 + 3", o.points, 0.0, true};
    std::vector<double> x(n), y(n);
    for (std::size_t p = 0; p < o.points; ++p) {
      draw(x);
      x[0] = pos(rng);
      y = x;
      y[0] += 3.0;
      for (const auto& lf : v.levels) {
        const double a = std::abs(lf(x)), b = std::abs(lf(y));
        r.max_error = std::max(r.max_error, (b - a) / std::max(1.0, a));
      }
    }
    r.passed = r.max_error <= o.tol;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace nsblowup
