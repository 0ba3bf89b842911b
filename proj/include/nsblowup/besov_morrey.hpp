#pragma once

/// Sparse wavelet-coefficient fields and the coefficient-side expressions
/// for the homogeneous Besov and Besov-Morrey norms.
///
/// A field is a list of blocks. A block is an axis-aligned box of
/// translation indices at one level and one epsilon, all carrying the same
/// coefficient; a single entry is a block with lo == hi. Blocks let the
/// coefficient field of h be stored at 24 levels without materializing
/// (2^24 + 1)^n entries.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "nsblowup/errors.hpp"
#include "nsblowup/reduce.hpp"
#include "nsblowup/wavelet_index.hpp"

namespace nsblowup {

struct CoeffBlock {
  std::vector<int> epsilon;
  int j = 0;
  std::vector<long> lo;  // inclusive
  std::vector<long> hi;  // inclusive
  double a = 0.0;

  double count() const {
    double c = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) c *= static_cast<double>(hi[i] - lo[i] + 1);
    return c;
  }
};

class CoeffField {
 public:
  explicit CoeffField(std::size_t dim) : dim_(dim) { require(dim >= 1, "CoeffField: dim must be >= 1"); }

  void add_block(CoeffBlock b) {
    require(b.epsilon.size() == dim_ && b.lo.size() == dim_ && b.hi.size() == dim_, "CoeffField: block dimension");
    require(std::any_of(b.epsilon.begin(), b.epsilon.end(), [](int e) { return e != 0; }),
            "CoeffField: epsilon must be nonzero");
    for (int e : b.epsilon) require(e == 0 || e == 1, "CoeffField: epsilon entries must be 0 or 1");
    for (std::size_t i = 0; i < dim_; ++i) require(b.lo[i] <= b.hi[i], "CoeffField: empty block");
    require(std::isfinite(b.a), "CoeffField: coefficient must be finite");
    blocks_.push_back(std::move(b));
  }

  void add(const WaveletIndex& idx, double a) { add_block({idx.epsilon, idx.j, idx.k, idx.k, a}); }

  std::size_t dim() const { return dim_; }
  const std::vector<CoeffBlock>& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }

  /// Total number of (epsilon, j, k) entries represented.
  double entry_count() const {
    double c = 0.0;
    for (const auto& b : blocks_) c += b.count();
    return c;
  }

  CoeffField scaled(double lambda) const {
    CoeffField out(dim_);
    for (auto b : blocks_) {
      b.a *= lambda;
      out.blocks_.push_back(std::move(b));
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<CoeffBlock> blocks_;
};

/// Coefficients of h in the normalized basis: one block per level with
/// a = 2^{-nj/2} 2^j j^{-1/2} on [2^j, 2^{j+1}]^n, epsilon = (1, ..., 1).
inline CoeffField coeff_field_of_h(int J, std::size_t dim) {
  require(J >= 1 && J <= 60, "coeff_field_of_h: need 1 <= J <= 60");
  CoeffField f(dim);
  const double nd = static_cast<double>(dim);
  for (int j = 1; j <= J; ++j) {
    const double a = std::exp2(-0.5 * nd * j + j) / std::sqrt(static_cast<double>(j));
    f.add_block({std::vector<int>(dim, 1), j, std::vector<long>(dim, 1L << j), std::vector<long>(dim, 1L << (j + 1)), a});
  }
  return f;
}

struct BesovMorreyParams {
  double p = 2.0;
  double q = 2.0;
  double gamma1 = -1.0;
  double gamma2 = 0.0;

  void validate(std::size_t dim) const {
    require(p >= 1.0, "BesovMorreyParams: p must be in [1, inf]");
    require(q >= 1.0, "BesovMorreyParams: q must be in [1, inf]");
    require(std::isfinite(gamma1) && std::isfinite(gamma2), "BesovMorreyParams: gammas must be finite");
    const double np = std::isinf(p) ? 0.0 : static_cast<double>(dim) / p;
    require(gamma2 >= 0.0 && gamma2 <= np + 1e-15, "BesovMorreyParams: need 0 <= gamma2 <= n/p");
  }
  bool critical() const { return std::abs(gamma1 - gamma2 + 1.0) <= 1e-15; }
};

/// [sum_j 2^{j q (gamma1 + n/2)} (sup_{eps,k} |a|)^q]^{1/q}; q = inf takes the sup over j.
inline double norm_besov_inf(const CoeffField& field, double gamma1, double q) {
  require(q >= 1.0, "norm_besov_inf: q must be in [1, inf]");
  std::map<int, double> level_sup;
  for (const auto& b : field.blocks()) {
    auto& s = level_sup[b.j];
    s = std::max(s, std::abs(b.a));
  }
  const double e = gamma1 + 0.5 * static_cast<double>(field.dim());
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& [j, s] : level_sup) m = std::max(m, std::exp2(j * e) * s);
    return m;
  }
  std::vector<double> parts;
  for (const auto& [j, s] : level_sup) parts.push_back(std::pow(std::exp2(j * e) * s, q));
  return std::pow(pairwise_sum(parts), 1.0 / q);
}

namespace detail {

inline long floor_shift(long k, int m) {
  // floor(k / 2^m) for m >= 0
  return k >= 0 ? (k >> m) : -((-k + (1L << m) - 1) >> m);
}

/// |[lo, hi] intersect [c 2^m, (c + 1) 2^m - 1]|
inline double child_count(long lo, long hi, long c, int m) {
  const long a = std::max(lo, c << m);
  const long b = std::min(hi, ((c + 1) << m) - 1);
  return b >= a ? static_cast<double>(b - a + 1) : 0.0;
}

inline int bit_length(long v) { return v == 0 ? 0 : 64 - std::countl_zero(static_cast<std::uint64_t>(v)); }

}  // namespace detail

/// Coarsest cube level worth scanning. Below it every block's ancestor
/// along each axis has settled on 0 (k >= 0) or -1 (k < 0), so each cube
/// that meets the field already contains every block of its orthant; going
/// coarser only shrinks the prefactor 2^{l (n/p - gamma2)} (or leaves it
/// unchanged when gamma2 = n/p) while the bracket stays the same.
inline int morrey_coarsest_level(const CoeffField& field) {
  int stop = std::numeric_limits<int>::max();
  for (const auto& b : field.blocks()) {
    long mag = 0;
    for (std::size_t i = 0; i < field.dim(); ++i) mag = std::max({mag, std::abs(b.lo[i]), std::abs(b.hi[i])});
    stop = std::min(stop, b.j - detail::bit_length(mag));
  }
  return stop;
}

/// Level-l contribution to the Morrey sup, exact. Along each axis the
/// cube index is split into segments on which every block's child count is
/// constant; only segment tuples that meet some block are visited.
inline double morrey_level_sup(const CoeffField& field, const BesovMorreyParams& P, int level) {
  const std::size_t n = field.dim();
  const auto& blocks = field.blocks();
  const double nd = static_cast<double>(n);
  const double w_exp = P.q * (P.gamma1 + 0.5 * nd - nd / P.p);
  const bool q_inf = std::isinf(P.q);

  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (blocks[b].j >= level) active.push_back(b);
  if (active.empty()) return 0.0;

  std::vector<std::vector<long>> bps(n);
  std::vector<std::vector<std::pair<long, long>>> anc(n, std::vector<std::pair<long, long>>(blocks.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b : active) {
      const int m = blocks[b].j - level;
      const long alo = detail::floor_shift(blocks[b].lo[i], m), ahi = detail::floor_shift(blocks[b].hi[i], m);
      anc[i][b] = {alo, ahi};
      bps[i].insert(bps[i].end(), {alo, alo + 1, ahi, ahi + 1});
    }
    std::sort(bps[i].begin(), bps[i].end());
    bps[i].erase(std::unique(bps[i].begin(), bps[i].end()), bps[i].end());
  }

  std::set<std::vector<std::size_t>> tuples;
  std::vector<std::size_t> cur(n);
  for (std::size_t b : active) {
    std::vector<std::pair<std::size_t, std::size_t>> range(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo_it = std::lower_bound(bps[i].begin(), bps[i].end(), anc[i][b].first);
      const auto hi_it = std::lower_bound(bps[i].begin(), bps[i].end(), anc[i][b].second + 1);
      range[i] = {static_cast<std::size_t>(lo_it - bps[i].begin()), static_cast<std::size_t>(hi_it - bps[i].begin())};
    }
    for (std::size_t i = 0; i < n; ++i) cur[i] = range[i].first;
    while (true) {
      tuples.insert(cur);
      std::size_t i = 0;
      for (; i < n; ++i) {
        if (++cur[i] < range[i].second) break;
        cur[i] = range[i].first;
      }
      if (i == n) break;
    }
  }

  double best = 0.0;
  std::map<int, double> per_level;
  for (const auto& tup : tuples) {
    per_level.clear();
    for (std::size_t b : active) {
      const int m = blocks[b].j - level;
      double c = 1.0;
      for (std::size_t i = 0; i < n && c > 0.0; ++i) c *= detail::child_count(blocks[b].lo[i], blocks[b].hi[i], bps[i][tup[i]], m);
      if (c > 0.0) per_level[blocks[b].j] += c * std::pow(std::abs(blocks[b].a), P.p);
    }
    double inner = 0.0;
    if (q_inf) {
      for (const auto& [j, s] : per_level)
        inner = std::max(inner, std::exp2(j * (P.gamma1 + 0.5 * nd - nd / P.p)) * std::pow(s, 1.0 / P.p));
    } else {
      std::vector<double> parts;
      for (const auto& [j, s] : per_level) parts.push_back(std::exp2(j * w_exp) * std::pow(s, P.q / P.p));
      inner = std::pow(pairwise_sum(parts), 1.0 / P.q);
    }
    best = std::max(best, inner);
  }
  return std::exp2(level * (nd / P.p - P.gamma2)) * best;
}

/// sup over dyadic cubes Q of |Q|^{gamma2/n - 1/p} {sum_{j >= l(Q)} 2^{j q (gamma1 + n/2 - n/p)}
/// (sum_{Q_{j,k} in Q} |a|^p)^{q/p}}^{1/q}, scanning cube levels from the
/// finest occupied level down to morrey_coarsest_level.
inline double norm_besov_morrey(const CoeffField& field, const BesovMorreyParams& P) {
  P.validate(field.dim());
  require(!std::isinf(P.p), "norm_besov_morrey: p = inf is handled by norm_besov_inf");
  if (field.empty()) return 0.0;
  int finest = std::numeric_limits<int>::min();
  for (const auto& b : field.blocks()) finest = std::max(finest, b.j);
  const int coarsest = morrey_coarsest_level(field);
  double best = 0.0;
  for (int l = finest; l >= coarsest; --l) best = std::max(best, morrey_level_sup(field, P, l));
  return best;
}

/// Coefficient law of f -> 2^m f(2^m .): a_{j,k} -> 2^{m (1 - n/2)} a_{j - m, k}.
inline CoeffField scaling_reindex(const CoeffField& field, int m) {
  CoeffField out(field.dim());
  const double factor = std::exp2(m * (1.0 - 0.5 * static_cast<double>(field.dim())));
  for (auto b : field.blocks()) {
    b.j += m;
    b.a *= factor;
    out.add_block(std::move(b));
  }
  return out;
}

enum class NormSpace { besov_inf, besov_morrey };

struct NormSpec {
  NormSpace space = NormSpace::besov_inf;
  BesovMorreyParams params;
};

inline double evaluate_norm(const CoeffField& f, const NormSpec& s) {
  return s.space == NormSpace::besov_inf ? norm_besov_inf(f, s.params.gamma1, s.params.q)
                                         : norm_besov_morrey(f, s.params);
}

struct EmbeddingRow {
  std::size_t field = 0;
  std::size_t pair = 0;
  double first = 0.0;
  double second = 0.0;
  double ratio = 0.0;  // first / second, NaN when second is 0
};

/// Norm ratios for every (field, spec pair). Exploratory: no constants known.
inline std::vector<EmbeddingRow> embedding_experiment(const std::vector<CoeffField>& fields,
                                                      const std::vector<std::pair<NormSpec, NormSpec>>& pairs) {
  std::vector<EmbeddingRow> rows;
  for (std::size_t f = 0; f < fields.size(); ++f)
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      EmbeddingRow r{f, p, evaluate_norm(fields[f], pairs[p].first), evaluate_norm(fields[f], pairs[p].second), 0.0};
      r.ratio = r.second != 0.0 ? r.first / r.second : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(r);
    }
  return rows;
}

/// `count` single entries with random epsilon != 0, level in [j_lo, j_hi],
/// translations in [-k_span, k_span], coefficients uniform in [-1, 1].
inline CoeffField random_sparse_field(std::size_t dim, std::size_t count, int j_lo, int j_hi, long k_span,
                                      std::uint64_t seed) {
  require(j_lo <= j_hi && k_span >= 0, "random_sparse_field: bad ranges");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> jd(j_lo, j_hi), ed(1, (1 << dim) - 1);
  std::uniform_int_distribution<long> kd(-k_span, k_span);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  CoeffField f(dim);
  for (std::size_t c = 0; c < count; ++c) {
    WaveletIndex idx;
    const int e = ed(rng);
    for (std::size_t i = 0; i < dim; ++i) idx.epsilon.push_back((e >> i) & 1);
    idx.j = jd(rng);
    for (std::size_t i = 0; i < dim; ++i) idx.k.push_back(kd(rng));
    f.add(idx, ad(rng));
  }
  return f;
}

/// JSON lines, one entry per line: {"epsilon": [..], "j": j, "k": [..], "a": a}.
/// Blocks are expanded; `max_entries` guards against huge outputs.
inline void write_jsonl(std::ostream& os, const CoeffField& field, double max_entries = 1e7) {
  require(field.entry_count() <= max_entries, "write_jsonl: field too large to expand");
  for (const auto& b : field.blocks()) {
    std::vector<long> k = b.lo;
    while (true) {
      nlohmann::json row{{"epsilon", b.epsilon}, {"j", b.j}, {"k", k}, {"a", b.a}};
      os << row.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
      std::size_t i = 0;
      for (; i < k.size(); ++i) {
        if (++k[i] <= b.hi[i]) break;
        k[i] = b.lo[i];
      }
      if (i == k.size()) break;
    }
  }
}

inline CoeffField read_jsonl(std::istream& is) {
  std::vector<std::pair<WaveletIndex, double>> rows;
  std::string line;
  std::size_t dim = 0;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto row = nlohmann::json::parse(line);
    WaveletIndex idx;
    idx.epsilon = row.at("epsilon").get<std::vector<int>>();
    idx.j = row.at("j").get<int>();
    idx.k = row.at("k").get<std::vector<long>>();
    if (dim == 0) dim = idx.epsilon.size();
    require(idx.epsilon.size() == dim, "read_jsonl: inconsistent dimension");
    rows.emplace_back(std::move(idx), row.at("a").get<double>());
  }
  require(dim > 0, "read_jsonl: no entries");
  CoeffField f(dim);
  for (const auto& [idx, a] : rows) f.add(idx, a);
  return f;
}

}  // namespace nsblowup
