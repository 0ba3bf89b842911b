// Experiment runner: one subcommand per module, CSV or JSON artifacts with the
// config and version embedded in every file.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nsblowup/nsblowup.hpp"

namespace fs = std::filesystem;
using namespace nsblowup;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheck = 2;
constexpr int kExitBudget = 3;

struct Config {
  std::size_t dim = 3;
  int levels = 6;
  double t = 0.25;
  double delta = 1.0;
  int prune_radius = 6;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output = "nsblowup_out";
  std::string format = "csv";
};

using Cell = std::variant<long long, double, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  } vis;
  return std::visit(vis, c);
}

json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(format_double(*d));
  return std::visit([](const auto& v) { return json(v); }, c);
}

class Emitter {
 public:
  Emitter(const Config& cfg, std::string command, json extra)
      : cfg_(cfg), command_(std::move(command)), extra_(std::move(extra)) {
    const char* env = std::getenv("NSBLOWUP_OUTPUT_DIR");
    dir_ = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(cfg.output);
    fs::create_directories(dir_);
  }

  json config_json() const {
    // the output directory is left out so relocated runs stay byte-identical
    json j = {{"command", command_}, {"dim", cfg_.dim},       {"levels", cfg_.levels},
              {"t", cfg_.t},         {"delta", cfg_.delta},   {"prune_radius", cfg_.prune_radius},
              {"tol", cfg_.tol},     {"seed", cfg_.seed},     {"workers", cfg_.workers},
              {"format", cfg_.format}};
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    return j;
  }

  fs::path write(const Table& t) const {
    const fs::path path = dir_ / (t.name + "." + cfg_.format);
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), "cannot open " + path.string());
    if (cfg_.format == "csv") {
      os << "# nsblowup " << kVersion << " schema " << kSchemaVersion << '\n';
      os << "# config " << config_json().dump() << '\n';
      for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
      os << '\n';
      for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << '\n';
      }
    } else {
      json rows = json::array();
      for (const auto& r : t.rows) {
        json jr = json::array();
        for (const auto& c : r) jr.push_back(json_cell(c));
        rows.push_back(std::move(jr));
      }
      const json doc = {{"version", kVersion}, {"schema", kSchemaVersion}, {"config", config_json()},
                        {"table", t.name},     {"columns", t.columns},     {"rows", rows}};
      os << doc.dump(1) << '\n';
    }
    std::cout << path.string() << '\n';
    return path;
  }

  const fs::path& dir() const { return dir_; }

  static constexpr int kSchemaVersion = 1;

 private:
  const Config& cfg_;
  std::string command_;
  json extra_;
  fs::path dir_;
};

/// First failing gate, reported as "<table> row <i> (<label>): <reason>".
struct Gate {
  std::optional<std::string> failure;

  void check(bool ok, const std::string& table, std::size_t row, const std::string& label, const std::string& why) {
    if (!ok && !failure) failure = table + " row " + std::to_string(row) + " (" + label + "): " + why;
  }

  int finish() const {
    if (!failure) return kExitOk;
    std::cerr << "check failed: " << *failure << '\n';
    return kExitCheck;
  }
};

FlowSpec spec_of(const Config& c) { return FlowSpec::up_to(c.levels, c.dim, c.delta); }

int cmd_lemma31(const Config& cfg) {
  Emitter out(cfg, "lemma31", json::object());
  Table t{"lemma31", {"name", "t", "s", "j", "k", "x", "engine", "formula", "quadrature", "rel_error", "converged"}, {}};
  const auto rows = heat_integral_suite();
  Gate gate;
  bool exhausted = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.add({r.name, r.t, r.s, static_cast<long long>(r.j), r.k, r.x, r.engine, r.formula, r.quadrature, r.rel_error,
           r.converged});
    exhausted = exhausted || !r.converged;
    gate.check(r.rel_error <= 1e-10, t.name, i, r.name + " x=" + format_double(r.x),
               "relative error " + format_double(r.rel_error) + " > 1e-10");
  }
  out.write(t);
  if (exhausted) {
    std::cerr << "quadrature budget exhausted\n";
    return kExitBudget;
  }
  return gate.finish();
}

int cmd_flows(const Config& cfg, const std::string& check, double s, std::size_t points) {
  require(check == "symmetry", "flows: unknown check '" + check + "'");
  Emitter out(cfg, "flows", {{"check", check}, {"s", s}, {"points", points}});
  SymmetryOptions o;
  o.s = s;
  o.t = cfg.t;
  o.points = points;
  o.seed = cfg.seed;
  const auto rows = flow_symmetry_suite(spec_of(cfg), o);
  Table t{"flows_symmetry", {"identity", "points", "max_error", "tol", "passed"}, {}};
  Gate gate;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.add({r.name, static_cast<long long>(r.points), r.max_error, o.tol, r.passed});
    gate.check(r.passed, t.name, i, r.name, "max error " + format_double(r.max_error));
  }
  out.write(t);
  return gate.finish();
}

struct NormArgs {
  std::string space = "Binf";
  double p = 2.0;
  double q = 3.0;
  double gamma1 = -1.0;
  double gamma2 = 0.0;
  double stable_tol = 0.0;  // 0 disables the stabilization gate
};

int cmd_norms(const Config& cfg, const NormArgs& a) {
  require(a.space == "Binf" || a.space == "BM", "norms: --space must be Binf or BM");
  const NormSpec spec{a.space == "Binf" ? NormSpace::besov_inf : NormSpace::besov_morrey, {a.p, a.q, a.gamma1, a.gamma2}};
  if (spec.space == NormSpace::besov_morrey) spec.params.validate(cfg.dim);
  Emitter out(cfg, "norms",
              {{"space", a.space}, {"p", a.p}, {"q", format_double(a.q)}, {"gamma1", a.gamma1}, {"gamma2", a.gamma2},
               {"stable_tol", a.stable_tol}});
  Table t{"norms_" + a.space, {"space", "p", "q", "gamma1", "gamma2", "J", "value"}, {}};
  std::vector<double> values;
  Gate gate;
  for (int J = 1; J <= cfg.levels; ++J) {
    const double v = evaluate_norm(coeff_field_of_h(J, cfg.dim).scaled(cfg.delta), spec);
    values.push_back(v);
    t.add({a.space, a.p, a.q, a.gamma1, a.gamma2, static_cast<long long>(J), v});
    gate.check(std::isfinite(v), t.name, values.size() - 1, "J=" + std::to_string(J), "non-finite norm");
  }
  out.write(t);

  Table s{"norms_" + a.space + "_summary", {"J_half", "J", "value_half", "value", "rel_change", "stable_tol"}, {}};
  if (cfg.levels >= 2) {
    const int Jh = cfg.levels / 2;
    const double vh = values[Jh - 1], v = values.back();
    const double rel = std::abs(v - vh) / v;
    s.add({static_cast<long long>(Jh), static_cast<long long>(cfg.levels), vh, v, rel, a.stable_tol});
    if (a.stable_tol > 0.0)
      gate.check(rel <= a.stable_tol, s.name, 0, "J=" + std::to_string(cfg.levels),
                 "relative change " + format_double(rel) + " > " + format_double(a.stable_tol));
  }
  out.write(s);
  return gate.finish();
}

int cmd_blowup(const Config& cfg) {
  Emitter out(cfg, "blowup", json::object());
  const FlowSpec spec = spec_of(cfg);
  Gate gate;

  Table h{"blowup_h", {"s", "t", "h", "error_bound", "prune_radius"}, {}};
  for (int b = 0; b < 10; ++b) {
    const double s = cfg.t * (b + 0.5) / 10.0;
    const auto c = h_st_closed(spec, s, cfg.t, cfg.prune_radius, cfg.workers);
    h.add({c.s, c.t, c.value, c.error_bound, static_cast<long long>(c.prune_radius)});
    gate.check(c.value + c.error_bound >= 0.0, h.name, static_cast<std::size_t>(b), "s=" + format_double(s),
               "negative correlation");
  }
  out.write(h);

  const int jt = dyadic_time_index(cfg.t);
  std::vector<int> js;
  for (int j = jt + 1; j <= cfg.levels; ++j) js.push_back(j);
  std::vector<double> ratio_at(static_cast<std::size_t>(cfg.levels) + 1, std::numeric_limits<double>::quiet_NaN());
  if (!js.empty()) {
    const auto dr = dyadic_lower_bound(spec, cfg.t, js, cfg.prune_radius, cfg.workers);
    Table d{"blowup_dyadic", {"j", "s", "h", "error_bound", "ratio", "h_truncated", "ratio_truncated"}, {}};
    for (std::size_t i = 0; i < dr.rows.size(); ++i) {
      const auto& r = dr.rows[i];
      d.add({static_cast<long long>(r.j), r.s, r.h, r.error_bound, r.ratio, r.h_truncated, r.ratio_truncated});
      ratio_at[static_cast<std::size_t>(r.j)] = r.ratio;
      gate.check(r.ratio > 0.0, d.name, i, "j=" + std::to_string(r.j), "non-positive ratio");
    }
    out.write(d);

    Table p{"blowup_dominance", {"j", "s", "points", "satisfied", "min_scaled", "max_scaled"}, {}};
    for (int j : js) {
      const auto pr = half_dominance_probe(spec, j, std::ldexp(1.0, -2 * j), 4);
      p.add({static_cast<long long>(j), pr.s, static_cast<long long>(pr.points), static_cast<long long>(pr.satisfied),
             pr.min_scaled, pr.max_scaled});
    }
    out.write(p);
  }

  const int fit_from = std::max(2, jt);
  if (cfg.levels >= fit_from + 1) {
    const auto rep = partial_blowup_integral(spec, cfg.t, cfg.levels, fit_from, cfg.prune_radius, cfg.workers);
    Table b{"blowup", {"J", "I", "H", "error_bound", "r_j", "slope", "intercept", "r_squared"}, {}};
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      b.add({static_cast<long long>(r.J), r.I, r.H, r.error_bound, ratio_at[static_cast<std::size_t>(r.J)],
             rep.fit.slope, rep.fit.intercept, rep.fit.r_squared});
    }
    out.write(b);
    gate.check(rep.non_decreasing, b.name, rep.rows.size() - 1, "J=" + std::to_string(cfg.levels),
               "I(J) is not non-decreasing");
    gate.check(rep.fit.slope > 0.0, b.name, rep.rows.size() - 1, "fit", "regression slope " +
               format_double(rep.fit.slope) + " is not positive");
  }
  return gate.finish();
}

int cmd_wavelets(const Config& cfg, double step, double half_width) {
  Emitter out(cfg, "wavelets", {{"step", step}, {"half_width", half_width}});
  const MeyerTable tab(step, half_width, cfg.workers);
  Gate gate;

  Table m{"wavelets_moments", {"kind", "m", "value", "expected"}, {}};
  for (int kind : {0, 1})
    for (int k = 0; k <= 2; ++k) {
      const double v = meyer_moment(tab, kind, k), e = kind == 0 && k == 0 ? 1.0 : (kind == 0 ? v : 0.0);
      m.add({static_cast<long long>(kind), static_cast<long long>(k), v, e});
      if (kind == 1 || k == 0)
        gate.check(std::abs(v - e) <= 1e-8, m.name, m.rows.size() - 1,
                   "kind=" + std::to_string(kind) + " m=" + std::to_string(k), "moment off by " + format_double(v - e));
    }
  out.write(m);

  std::vector<std::pair<WaveletIndex, WaveletIndex>> pairs;
  const int jmax = std::min(cfg.levels, 3);
  for (int j = 0; j <= jmax; ++j)
    for (int jp = std::max(0, j - 1); jp <= std::min(jmax, j + 1); ++jp)
      for (long k = -1; k <= 1; ++k)
        for (long kp = k - 2; kp <= k + 2; ++kp) pairs.push_back({{{1}, j, {k}}, {{1}, jp, {kp}}});
  Table o{"wavelets_inner", {"j_a", "k_a", "j_b", "k_b", "inner", "expected"}, {}};
  for (const auto& [a, b] : pairs) {
    const double v = meyer_inner(tab, a, b), e = a == b ? 1.0 : 0.0;
    o.add({static_cast<long long>(a.j), static_cast<long long>(a.k[0]), static_cast<long long>(b.j),
           static_cast<long long>(b.k[0]), v, e});
    gate.check(std::abs(v - e) <= 1e-6, o.name, o.rows.size() - 1,
               "j=" + std::to_string(a.j) + "," + std::to_string(b.j), "deviation " + format_double(v - e));
  }
  out.write(o);

  const double fdev = fourier_partition_deviation(50);
  const auto decay = phi1_decay(tab);
  Table s{"wavelets_summary", {"fourier_partition_dev", "pairs", "decay_inner_sup", "decay_outer_sup"}, {}};
  s.add({fdev, static_cast<long long>(pairs.size()), decay.inner_sup, decay.outer_sup});
  gate.check(fdev <= 1e-10, s.name, 0, "fourier", "partition deviation " + format_double(fdev));
  out.write(s);
  return gate.finish();
}

int cmd_initialdata(const Config& cfg, int tail_levels) {
  Emitter out(cfg, "initialdata", {{"tail_levels", tail_levels}});
  const InitialData d = build_u0(cfg.delta, cfg.levels, cfg.dim);
  Gate gate;
  {
    const fs::path path = out.dir() / "initialdata_u0.json";
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), "cannot open " + path.string());
    const json doc = {{"version", kVersion}, {"config", out.config_json()}, {"data", to_json(d)}};
    os << doc.dump(1) << '\n';
    std::cout << path.string() << '\n';
  }

  const auto pts = random_points(50, cfg.dim, 0.0, 3.0, cfg.seed);
  const double div = divergence_check(d, pts);
  const auto mom = vanishing_moments_check(make_vaguelettes(cfg.dim));
  Table c{"initialdata_checks", {"check", "value", "tol", "passed"}, {}};
  c.add({std::string("divergence"), div, 1e-12, div <= 1e-12});
  c.add({std::string("vanishing_moments"), mom.max_abs, 1e-14, mom.max_abs <= 1e-14});
  gate.check(div <= 1e-12, c.name, 0, "divergence", "max |div u0| " + format_double(div));
  gate.check(mom.max_abs <= 1e-14, c.name, 1, "vanishing_moments", "max moment " + format_double(mom.max_abs));

  const auto tail = schwartz_tail_check(cfg.delta, tail_levels, cfg.dim, 3, 2);
  c.add({std::string("tail_ratio"), tail.max_ratio, 1.1, tail.all_finite && tail.max_ratio <= 1.1});
  gate.check(tail.all_finite && tail.max_ratio <= 1.1, c.name, 2, "tail_ratio",
             "sup ratio " + format_double(tail.max_ratio));
  out.write(c);

  Table t{"initialdata_tail", {"component", "N", "beta", "sup_J", "sup_2J", "ratio", "sup_cut_J", "sup_cut_2J"}, {}};
  for (const auto& r : tail.rows) {
    std::string beta;
    for (std::size_t i = 0; i < r.beta.size(); ++i) beta += (i ? " " : "") + std::to_string(r.beta[i]);
    t.add({static_cast<long long>(r.component), static_cast<long long>(r.N), beta, r.sup_J, r.sup_2J, r.ratio,
           r.sup_cut_J, r.sup_cut_2J});
  }
  out.write(t);
  return gate.finish();
}

void add_common(CLI::App* sub, Config& c) {
  sub->add_option("--dim", c.dim, "Spatial dimension")->capture_default_str()->check(CLI::Range(3, 8));
  sub->add_option("--levels", c.levels, "Finest dyadic level J")->capture_default_str()->check(CLI::Range(1, 24));
  sub->add_option("--t", c.t, "Observation time")->capture_default_str();
  sub->add_option("--delta", c.delta, "Amplitude of the initial data")->capture_default_str();
  sub->add_option("--prune-radius", c.prune_radius, "Pruning radius R in widths")->capture_default_str();
  sub->add_option("--tol", c.tol, "Quadrature tolerance")->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for sampled points")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads (results do not depend on it)")->capture_default_str();
  sub->add_option("--output", c.output, "Output directory (NSBLOWUP_OUTPUT_DIR overrides)")->capture_default_str();
  sub->add_option("--format", c.format, "Artifact format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the heat-flow blow-up construction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Config cfg;
  auto* lemma31 = app.add_subcommand("lemma31", "Closed-form heat integrals against quadrature");
  add_common(lemma31, cfg);

  std::string check = "symmetry";
  double flow_s = 0.1;
  std::size_t points = 100;
  auto* flows = app.add_subcommand("flows", "Pointwise identities of the heat flows");
  add_common(flows, cfg);
  flows->add_option("--check", check, "Identity family")->capture_default_str()->check(CLI::IsMember({"symmetry"}));
  flows->add_option("--s", flow_s, "Flow time of the vector field")->capture_default_str();
  flows->add_option("--points", points, "Random points per identity")->capture_default_str();

  NormArgs na;
  auto* norms = app.add_subcommand("norms", "Besov and Besov-Morrey norms of the coefficient field");
  add_common(norms, cfg);
  norms->add_option("--space", na.space, "Binf or BM")->capture_default_str()->check(CLI::IsMember({"Binf", "BM"}));
  norms->add_option("--p", na.p, "Integrability exponent")->capture_default_str();
  norms->add_option("--q", na.q, "Summability exponent (inf allowed)")->capture_default_str();
  norms->add_option("--gamma1", na.gamma1, "Smoothness index")->capture_default_str();
  norms->add_option("--gamma2", na.gamma2, "Morrey index")->capture_default_str();
  norms->add_option("--stable-tol", na.stable_tol, "Gate on |N(J) - N(J/2)| / N(J); 0 disables")
      ->capture_default_str();

  auto* blowup = app.add_subcommand("blowup", "Correlation h(s, t), dyadic bounds and the partial time integral");
  add_common(blowup, cfg);

  double step = 0.125, half_width = 256.0;
  auto* wavelets = app.add_subcommand("wavelets", "Meyer moments, orthonormality and decay");
  add_common(wavelets, cfg);
  wavelets->add_option("--step", step, "Table spacing")->capture_default_str();
  wavelets->add_option("--half-width", half_width, "Table half width")->capture_default_str();

  int tail_levels = 4;
  auto* initialdata = app.add_subcommand("initialdata", "Divergence, moments and tails of the initial data");
  add_common(initialdata, cfg);
  initialdata->add_option("--tail-levels", tail_levels, "J in the sup ratio of J and 2J levels")
      ->capture_default_str()
      ->check(CLI::Range(1, 12));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.workers == 0) cfg.workers = 1;
    if (*lemma31) return cmd_lemma31(cfg);
    if (*flows) return cmd_flows(cfg, check, flow_s, points);
    if (*norms) return cmd_norms(cfg, na);
    if (*blowup) return cmd_blowup(cfg);
    if (*wavelets) return cmd_wavelets(cfg, step, half_width);
    if (*initialdata) return cmd_initialdata(cfg, tail_levels);
  } catch (const budget_exhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return kExitBudget;
  } catch (const contract_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
