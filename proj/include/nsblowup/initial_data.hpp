#pragma once

/// The initial velocity u0 = (delta T1 h, delta T2 h, 0, ..., 0) in closed
/// Gaussian form, with the checks that can be carried out at finite
/// truncation: divergence, vanishing moments, Schwartz-type tail sups.
///
/// T_i sends each normalized tensor wavelet with epsilon = (1, ..., 1) to
/// the vaguelette built on
///   psi1(x) =  x2 x3 exp(-|x|^2),   psi2(x) = -x1 x3 exp(-|x|^2),
/// so u_i = delta sum_j 2^j j^{-1/2} sum_l psi_i(2^j x - l), and the
/// vaguelette coefficient sequence of u_i / delta is that of h.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nsblowup/besov_morrey.hpp"
#include "nsblowup/errors.hpp"
#include "nsblowup/heat_flows.hpp"
#include "nsblowup/meyer.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/tensor_gauss.hpp"

namespace nsblowup {

struct VagueletteSystem {
  std::size_t dim = 3;
  TensorTerm psi1;
  TensorTerm psi2;
};

inline VagueletteSystem make_vaguelettes(std::size_t dim) {
  require(dim >= 3, "make_vaguelettes: dimension must be >= 3");
  VagueletteSystem v{dim, isotropic_gaussian(dim, 1.0), isotropic_gaussian(dim, 1.0, -1.0)};
  const PolyGauss1D linear(1.0, 0.0, 1.0, {0.0, 1.0});
  v.psi1.factors[1] = linear;
  v.psi1.factors[2] = linear;
  v.psi2.factors[0] = linear;
  v.psi2.factors[2] = linear;
  return v;
}

/// One level of sum_l 2^j j^{-1/2} proto(2^j x - l), heat-evolved by s.
inline LevelFlow vaguelette_level(const TensorTerm& proto, int j, double s) {
  require(j >= 1, "vaguelette_level: j must be >= 1");
  LevelFlow lf{j, proto.amplitude * level_weight(j), {}};
  for (std::size_t i = 0; i < proto.dim(); ++i)
    lf.axes.push_back(AxisFactorSum{j, i, dyadic_axis_sum(proto.factors[i], j, s)});
  return lf;
}

/// Differentiates a level beta_i times along each axis i.
inline LevelFlow differentiate_level(const LevelFlow& lf, std::span<const int> beta) {
  require(beta.size() == lf.axes.size(), "differentiate_level: multi-index dimension");
  LevelFlow out = lf;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    require(beta[i] >= 0, "differentiate_level: negative order");
    for (int r = 0; r < beta[i]; ++r) out.axes[i].terms = differentiate(out.axes[i].terms);
  }
  return out;
}

struct InitialData {
  double delta = 1.0;
  std::size_t dim = 3;
  std::vector<int> levels;
  double time = 0.0;  // heat-evolution time already applied
  std::vector<LevelFlow> u1;
  std::vector<LevelFlow> u2;

  double eval(int component, std::span<const double> x) const {
    require(component == 1 || component == 2, "InitialData: component must be 1 or 2");
    require(x.size() == dim, "InitialData: point dimension");
    const auto& c = component == 1 ? u1 : u2;
    double v = 0.0;
    for (const auto& l : c) v += l(x);
    return delta * v;
  }

  /// Levels of d^beta u_i (without the delta factor).
  std::vector<LevelFlow> derivative(int component, std::span<const int> beta) const {
    require(component == 1 || component == 2, "InitialData: component must be 1 or 2");
    std::vector<LevelFlow> out;
    for (const auto& l : component == 1 ? u1 : u2) out.push_back(differentiate_level(l, beta));
    return out;
  }

  double eval_levels(const std::vector<LevelFlow>& lv, std::span<const double> x) const {
    require(x.size() == dim, "InitialData: point dimension");
    double v = 0.0;
    for (const auto& l : lv) v += l(x);
    return delta * v;
  }

  /// Partial derivative d^beta of component 1 or 2 at x.
  double eval_derivative(int component, std::span<const int> beta, std::span<const double> x) const {
    return eval_levels(derivative(component, beta), x);
  }

  std::size_t term_count(int component, int j) const {
    const auto& c = component == 1 ? u1 : u2;
    for (const auto& l : c)
      if (l.level == j) {
        std::size_t t = 1;
        for (const auto& a : l.axes) t *= a.terms.size();
        return t;
      }
    return 0;
  }
};

inline InitialData build_u0(double delta, const std::vector<int>& levels, std::size_t dim, double s = 0.0) {
  require(dim >= 3, "build_u0: dimension must be >= 3");
  require(std::isfinite(delta) && delta > 0.0, "build_u0: delta must be > 0");
  require(s >= 0.0, "build_u0: evolution time must be >= 0");
  const FlowSpec spec = FlowSpec::with_levels(levels, dim, delta);
  const auto v = make_vaguelettes(dim);
  InitialData d{delta, dim, spec.levels, s, {}, {}};
  for (int j : spec.levels) {
    d.u1.push_back(vaguelette_level(v.psi1, j, s));
    d.u2.push_back(vaguelette_level(v.psi2, j, s));
  }
  return d;
}

inline InitialData build_u0(double delta, int J, std::size_t dim) {
  require(J >= 1, "build_u0: J must be >= 1");
  std::vector<int> levels;
  for (int j = 1; j <= J; ++j) levels.push_back(j);
  return build_u0(delta, levels, dim);
}

/// Applies e^{tau Lap} to both components.
inline InitialData heat_evolve_data(const InitialData& d, double tau) {
  require(tau >= 0.0, "heat_evolve_data: tau must be >= 0");
  InitialData out = d;
  out.time += tau;
  for (auto* comp : {&out.u1, &out.u2})
    for (auto& l : *comp)
      for (auto& a : l.axes) a.terms = heat_evolve(a.terms, tau);
  return out;
}

/// max over points of |d1 u1 + d2 u2|.
inline double divergence_check(const InitialData& d, const std::vector<std::vector<double>>& points) {
  std::vector<int> b1(d.dim, 0), b2(d.dim, 0);
  b1[0] = 1;
  b2[1] = 1;
  const auto d1u1 = d.derivative(1, b1), d2u2 = d.derivative(2, b2);
  double m = 0.0;
  for (const auto& x : points) m = std::max(m, std::abs(d.eval_levels(d1u1, x) + d.eval_levels(d2u2, x)));
  return m;
}

/// Points uniform in [lo, hi]^n from a seeded generator.
inline std::vector<std::vector<double>> random_points(std::size_t count, std::size_t dim, double lo, double hi,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = u(rng);
  return pts;
}

/// Smooth radial cutoff: 1 on |y| <= 2 sqrt(n), 0 on |y| >= 2n.
inline double cutoff_phi(std::span<const double> y) {
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  const double n = static_cast<double>(y.size());
  const double inner = 2.0 * std::sqrt(n), outer = 2.0 * n;
  return 1.0 - meyer::nu((std::sqrt(r2) - inner) / (outer - inner));
}

struct TailGrid {
  double r_min = 0.0;
  double r_max = 20.0;
  std::size_t shells = 24;      // logarithmically spaced radii
  std::size_t directions = 48;  // seeded unit vectors
  std::uint64_t seed = 1;
};

/// Points 1.5 e + r w on the shell grid.
inline std::vector<std::vector<double>> tail_points(std::size_t dim, const TailGrid& g) {
  const double r_min = g.r_min > 0.0 ? g.r_min : 2.0 * std::sqrt(static_cast<double>(dim));
  require(g.r_max > r_min && g.shells >= 2 && g.directions >= 1, "tail_points: bad grid");
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::vector<double>> dirs(g.directions, std::vector<double>(dim));
  for (auto& d : dirs) {
    double r2 = 0.0;
    do {
      r2 = 0.0;
      for (auto& c : d) {
        c = nd(rng);
        r2 += c * c;
      }
    } while (r2 < 1e-12);
    for (auto& c : d) c /= std::sqrt(r2);
  }
  // the diagonal directions toward the support are the most demanding
  for (double sgn : {1.0, -1.0}) dirs.push_back(std::vector<double>(dim, sgn / std::sqrt(static_cast<double>(dim))));
  std::vector<std::vector<double>> pts;
  for (std::size_t s = 0; s < g.shells; ++s) {
    const double r = r_min * std::pow(g.r_max / r_min, static_cast<double>(s) / static_cast<double>(g.shells - 1));
    for (const auto& d : dirs) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = 1.5 + r * d[i];
      pts.push_back(std::move(x));
    }
  }
  return pts;
}

struct TailRow {
  int component = 1;
  int N = 0;
  std::vector<int> beta;
  double sup_J = 0.0;
  double sup_2J = 0.0;
  double ratio = 0.0;         // sup_2J / sup_J
  double sup_cut_J = 0.0;     // same sups with the (1 - phi(x - 1.5 e)) factor
  double sup_cut_2J = 0.0;
};

struct TailReport {
  int J = 0;
  std::vector<TailRow> rows;
  double max_ratio = 0.0;
  bool all_finite = true;
};

/// All multi-indices with |beta| <= order in `dim` variables, graded order.
inline std::vector<std::vector<int>> multi_indices(std::size_t dim, int order) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= order; ++total) {
    std::vector<int> b(dim, 0);
    // enumerate compositions of `total` into dim parts
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
      if (i + 1 == dim) {
        b[i] = left;
        out.push_back(b);
        return;
      }
      for (int v = left; v >= 0; --v) {
        b[i] = v;
        self(self, i + 1, left - v);
      }
    };
    rec(rec, 0, total);
  }
  return out;
}

/// sup over the grid of |x - 1.5 e|^{2N} |d^beta u_i(x)|, for truncations
/// {1..J} and {1..2J}, every N <= N_max and |beta| <= beta_max.
inline TailReport schwartz_tail_check(double delta, int J, std::size_t dim, int N_max, int beta_max,
                                      const TailGrid& grid = {}) {
  require(N_max >= 0 && beta_max >= 0, "schwartz_tail_check: orders must be >= 0");
  const InitialData dJ = build_u0(delta, J, dim);
  const InitialData d2J = build_u0(delta, 2 * J, dim);
  const auto pts = tail_points(dim, grid);
  const auto betas = multi_indices(dim, beta_max);
  TailReport rep;
  rep.J = J;
  for (int comp = 1; comp <= 2; ++comp) {
    for (const auto& beta : betas) {
      // derivative values once per point; the weight only depends on N
      const auto lvJ = dJ.derivative(comp, beta), lv2J = d2J.derivative(comp, beta);
      std::vector<double> vJ(pts.size()), v2J(pts.size()), r2(pts.size()), cut(pts.size());
      for (std::size_t p = 0; p < pts.size(); ++p) {
        vJ[p] = std::abs(dJ.eval_levels(lvJ, pts[p]));
        v2J[p] = std::abs(d2J.eval_levels(lv2J, pts[p]));
        std::vector<double> y(dim);
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          y[i] = pts[p][i] - 1.5;
          s += y[i] * y[i];
        }
        r2[p] = s;
        cut[p] = 1.0 - cutoff_phi(y);
      }
      for (int N = 0; N <= N_max; ++N) {
        TailRow row{comp, N, beta};
        for (std::size_t p = 0; p < pts.size(); ++p) {
          const double w = std::pow(r2[p], N);
          row.sup_J = std::max(row.sup_J, w * vJ[p]);
          row.sup_2J = std::max(row.sup_2J, w * v2J[p]);
          row.sup_cut_J = std::max(row.sup_cut_J, w * cut[p] * vJ[p]);
          row.sup_cut_2J = std::max(row.sup_cut_2J, w * cut[p] * v2J[p]);
        }
        row.ratio = row.sup_J > 0.0 ? row.sup_2J / row.sup_J : (row.sup_2J == 0.0 ? 1.0 : INFINITY);
        rep.all_finite = rep.all_finite && std::isfinite(row.sup_J) && std::isfinite(row.sup_2J);
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

struct MomentRow {
  int component = 1;
  std::vector<int> alpha;
  double value = 0.0;
};

struct MomentReport {
  std::vector<MomentRow> rows;  // all |alpha| <= 1
  double max_abs = 0.0;
  double second_moment_23 = 0.0;  // integral x2 x3 psi1, nonzero
};

inline double tensor_moment(const TensorTerm& f, std::span<const int> alpha) {
  TensorTerm g = f;
  for (std::size_t i = 0; i < alpha.size(); ++i) g.factors[i] = times_monomial(g.factors[i], static_cast<std::size_t>(alpha[i]));
  return integrate_full(g);
}

inline MomentReport vanishing_moments_check(const VagueletteSystem& v) {
  MomentReport rep;
  for (int comp = 1; comp <= 2; ++comp)
    for (const auto& alpha : multi_indices(v.dim, 1)) {
      const double m = tensor_moment(comp == 1 ? v.psi1 : v.psi2, alpha);
      rep.rows.push_back({comp, alpha, m});
      rep.max_abs = std::max(rep.max_abs, std::abs(m));
    }
  std::vector<int> a(v.dim, 0);
  a[1] = a[2] = 1;
  rep.second_moment_23 = tensor_moment(v.psi1, a);
  return rep;
}

/// Vaguelette coefficient field of u_i / delta; identical to that of h.
inline CoeffField vaguelette_coeff_field(const InitialData& d) {
  CoeffField f(d.dim);
  const double nd = static_cast<double>(d.dim);
  for (int j : d.levels) {
    const double a = std::exp2(-0.5 * nd * j + j) / std::sqrt(static_cast<double>(j));
    f.add_block({std::vector<int>(d.dim, 1), j, std::vector<long>(d.dim, 1L << j),
                 std::vector<long>(d.dim, 1L << (j + 1)), a});
  }
  return f;
}

/// delta making the largest of the given coefficient-side norms of u0 equal `target`.
inline double delta_for_target(double target, const CoeffField& h_field, const std::vector<NormSpec>& norms) {
  require(target > 0.0 && !norms.empty(), "delta_for_target: need target > 0 and at least one norm");
  double m = 0.0;
  for (const auto& s : norms) m = std::max(m, evaluate_norm(h_field, s));
  require(m > 0.0, "delta_for_target: field has zero norm");
  return target / m;
}

inline nlohmann::json to_json(const InitialData& d) {
  nlohmann::json j;
  j["delta"] = d.delta;
  j["dim"] = d.dim;
  j["levels"] = d.levels;
  j["time"] = d.time;
  for (int comp = 1; comp <= 2; ++comp) {
    auto& arr = j[comp == 1 ? "u1" : "u2"];
    arr = nlohmann::json::array();
    for (const auto& l : comp == 1 ? d.u1 : d.u2) {
      nlohmann::json row{{"j", l.level}, {"weight", l.weight}};
      for (const auto& a : l.axes) {
        const auto& t0 = a.terms.terms.front();
        row["axes"].push_back({{"terms", a.terms.size()}, {"width", t0.width()}, {"degree", t0.degree()}});
      }
      arr.push_back(row);
    }
  }
  return j;
}

}  // namespace nsblowup
