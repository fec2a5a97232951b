#include "ergodix/runner.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "ergodix/compactness.hpp"
#include "ergodix/error.hpp"
#include "ergodix/invariants.hpp"
#include "ergodix/mixing.hpp"
#include "ergodix/parallel.hpp"
#include "ergodix/random.hpp"
#include "ergodix/spectral.hpp"
#include "ergodix/vdc.hpp"

namespace ergodix {

namespace {

// ---- schema helpers -------------------------------------------------------

void allow_keys(const Json& j, const std::string& where, const std::set<std::string>& keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

std::int64_t as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::int64_t int_or(const Json& j, const std::string& key, std::int64_t fallback,
                    const std::string& where) {
  return j.contains(key) ? as_int(j.at(key), where + "." + key) : fallback;
}

double double_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? as_double(j.at(key), where + "." + key) : fallback;
}

std::vector<std::int64_t> int_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of integers");
  std::vector<std::int64_t> out;
  for (const auto& x : j) out.push_back(as_int(x, where));
  return out;
}

std::vector<GroupElement> element_list(const Json& j, std::size_t q, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of group elements");
  std::vector<GroupElement> out;
  for (const auto& x : j) out.push_back(element_from_json(x, q));
  return out;
}

DecayRule parse_rule(const Json& cfg) {
  DecayRule rule;
  if (!cfg.contains("thresholds")) return rule;
  const Json& t = cfg.at("thresholds");
  allow_keys(t, "thresholds", {"relative", "tail_fraction"});
  rule.relative_threshold = double_or(t, "relative", rule.relative_threshold, "thresholds");
  rule.tail_fraction = double_or(t, "tail_fraction", rule.tail_fraction, "thresholds");
  if (!(rule.tail_fraction > 0.0 && rule.tail_fraction <= 1.0)) {
    throw ConfigError("thresholds.tail_fraction must lie in (0, 1]");
  }
  return rule;
}

MembershipSet parse_set(const Json& j, std::size_t q) {
  allow_keys(j, "set", {"kind", "modulus", "residues", "start", "step", "members", "complement"});
  const std::string kind = as_string(need(j, "kind", "set"), "set.kind");
  std::optional<MembershipSet> set;
  if (kind == "all") {
    set = MembershipSet::all();
  } else if (kind == "residue") {
    set = MembershipSet::residue(as_int(need(j, "modulus", "set"), "set.modulus"),
                                 int_list(need(j, "residues", "set"), "set.residues"));
  } else if (kind == "progression") {
    set = MembershipSet::progression(element_from_json(need(j, "start", "set"), q),
                                     element_from_json(need(j, "step", "set"), q));
  } else if (kind == "squares") {
    set = MembershipSet::squares();
  } else if (kind == "finite") {
    set = MembershipSet::finite(element_list(need(j, "members", "set"), q, "set.members"));
  } else {
    throw ConfigError("set.kind: unknown kind '" + kind + "'");
  }
  if (j.contains("complement") && as_bool(j.at("complement"), "set.complement")) {
    return set->complement();
  }
  return *set;
}

std::uint64_t require_seed(const Json& cfg, std::optional<std::uint64_t> seed,
                           const std::string& what) {
  if (seed) return *seed;
  if (cfg.contains("seed")) {
    const Json& s = cfg.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed: expected a nonnegative integer");
    }
    return s.get<std::uint64_t>();
  }
  throw ConfigError(what + " is randomized and needs a seed (--seed or \"seed\")");
}

// ---- output helpers -------------------------------------------------------

struct Output {
  std::filesystem::path dir;
  RunResult result;

  void text(const std::string& name, const std::string& body) {
    const auto path = dir / name;
    write_text(path, body);
    result.artifacts.push_back(path);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  void expect(bool ok, const std::string& what) {
    if (!ok) result.failures.push_back(what);
  }
};

std::vector<StatisticPoint> points_of(const WindowSchedule& windows, const std::vector<double>& v) {
  std::vector<StatisticPoint> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.push_back({windows[i].index(), windows[i].size(), v[i]});
  }
  return out;
}

std::size_t rank_from(const Json& cfg, const std::string& where) {
  std::size_t q = 1;
  if (cfg.contains("group")) {
    const Json& g = cfg.at("group");
    allow_keys(g, where + ".group", {"q"});
    q = static_cast<std::size_t>(as_int(need(g, "q", where + ".group"), where + ".group.q"));
  }
  if (q < 1) throw ConfigError(where + ".group.q must be >= 1");
  return q;
}

// ---- subcommands ----------------------------------------------------------

void run_folner(const Json& cfg, Output& out) {
  allow_keys(cfg, "folner", {"command", "group", "windows", "shifts", "set", "tail_from", "seed"});
  const std::size_t q = rank_from(cfg, "folner");
  const WindowSchedule windows = parse_windows(need(cfg, "windows", "folner"), q);
  std::vector<GroupElement> shifts{GroupElement::unit(q, 0)};
  if (cfg.contains("shifts")) shifts = element_list(cfg.at("shifts"), q, "folner.shifts");
  if (shifts.empty()) throw ConfigError("folner.shifts must not be empty");

  const auto defects = parallel_map(windows.size(), [&](std::size_t i) {
    double worst = 0.0;
    for (const auto& s : shifts) worst = std::max(worst, folner_defect(windows[i], s));
    return worst;
  });
  const auto ratios =
      parallel_map(windows.size(), [&](std::size_t i) { return tempelman_ratio(windows[i]); });
  out.text("folner.csv", statistic_csv(points_of(windows, defects)));
  out.text("tempelman.csv", statistic_csv(points_of(windows, ratios)));

  Json report = report_object();
  report["q"] = q;
  Json js = Json::array();
  for (const auto& s : shifts) js.push_back(element_to_json(s));
  report["shifts"] = std::move(js);
  const double bound = std::pow(2.0, static_cast<double>(q));
  report["max_tempelman_ratio"] = *std::max_element(ratios.begin(), ratios.end());
  report["tempelman_bound"] = bound;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].shape() == WindowShape::box) {
      out.expect(ratios[i] <= bound,
                 "tempelman ratio " + format_double(ratios[i]) + " exceeds 2^q at n = " +
                     std::to_string(windows[i].index()));
    }
  }
  if (cfg.contains("set")) {
    const MembershipSet set = parse_set(cfg.at("set"), q);
    std::optional<std::int64_t> tail;
    if (cfg.contains("tail_from")) tail = as_int(cfg.at("tail_from"), "folner.tail_from");
    const DensityReport d = lower_density(set, windows, tail);
    std::vector<double> ratios_n;
    for (const auto& [n, r] : d.per_n_ratios) ratios_n.push_back(r);
    out.text("density.csv", statistic_csv(points_of(windows, ratios_n)));
    report["set"] = set.description();
    report["lower_density"] = d.lower_density;
  }
  out.json("folner.json", report);
}

void run_mix(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "mix", {"command", "system", "windows", "a", "b", "hom", "statistics",
                          "thresholds", "seed"});
  const System sys = parse_system(need(cfg, "system", "mix"), seed);
  const WindowSchedule windows = parse_windows(need(cfg, "windows", "mix"), sys.rank());
  const Observable a = parse_observable(sys, need(cfg, "a", "mix"));
  const Observable b = parse_observable(sys, need(cfg, "b", "mix"));
  const Homomorphism hom =
      cfg.contains("hom") ? parse_hom(cfg.at("hom"), sys.rank()) : Homomorphism::identity(sys.rank());
  const DecayRule rule = parse_rule(cfg);
  std::vector<std::string> stats{"weak_mixing", "square", "abelianness", "ergodic_average"};
  if (cfg.contains("statistics")) {
    stats.clear();
    for (const auto& s : cfg.at("statistics")) stats.push_back(as_string(s, "mix.statistics"));
  }
  Json report = report_object();
  report["system"] = sys.label();
  Json results = Json::object();
  for (const auto& name : stats) {
    if (name == "ergodic_average") {
      const ErgodicAverage avg = ergodic_average(sys, a, b, hom, windows);
      std::vector<std::vector<double>> rows;
      for (const auto& p : avg.per_window) {
        rows.push_back({static_cast<double>(p.n), static_cast<double>(p.window_size),
                        p.value.real(), p.value.imag()});
      }
      out.text("mix_ergodic_average.csv", table_csv({"n", "window_size", "re", "im"}, rows));
      results[name] = {{"reference", complex_to_json(avg.reference)},
                       {"last", complex_to_json(avg.per_window.back().value)}};
      continue;
    }
    MixingStatistic s;
    if (name == "weak_mixing") {
      s = weak_mixing_defect(sys, a, b, hom, windows, rule);
    } else if (name == "square") {
      s = square_defect(sys, a, b, hom, windows, rule);
    } else if (name == "abelianness") {
      s = asymptotic_abelianness(sys, a, b, hom, windows, rule);
    } else {
      throw ConfigError("mix.statistics: unknown statistic '" + name + "'");
    }
    out.text("mix_" + name + ".csv", statistic_csv(s.per_window));
    results[name] = to_json(s);
  }
  report["statistics"] = std::move(results);
  out.json("mix.json", report);
}

HigherOrderSpec parse_spec(const System& sys, const Json& cfg, const std::string& where) {
  HigherOrderSpec spec;
  const Json& obs = need(cfg, "observables", where);
  if (!obs.is_array()) throw ConfigError(where + ".observables: expected a list");
  for (const auto& o : obs) spec.observables.push_back(parse_observable(sys, o));
  const Json& homs = need(cfg, "homs", where);
  if (!homs.is_array()) throw ConfigError(where + ".homs: expected a list");
  for (const auto& h : homs) spec.homs.push_back(parse_hom(h, sys.rank()));
  try {
    spec.validate(sys);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

void run_higher(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "higher", {"command", "system", "windows", "observables", "homs", "thresholds",
                             "gamma", "seed"});
  const System sys = parse_system(need(cfg, "system", "higher"), seed);
  const WindowSchedule windows = parse_windows(need(cfg, "windows", "higher"), sys.rank());
  const HigherOrderSpec spec = parse_spec(sys, cfg, "higher");
  const MixingStatistic s = higher_order_defect(sys, spec, windows, parse_rule(cfg));
  out.text("higher_defect.csv", statistic_csv(s.per_window));

  Json report = report_object();
  report["system"] = sys.label();
  report["order"] = spec.order();
  report["defect"] = to_json(s);
  if (!sys.is_finite()) {
    Json bounds = Json::array();
    bool holds = true;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const CollisionBound cb = collision_bound(sys, spec, windows[i]);
      const double bound = cb.constant / static_cast<double>(windows[i].size());
      const double value = s.per_window[i].value;
      const bool ok = value <= bound * (1.0 + 1e-12) + 1e-15;
      holds = holds && ok;
      out.expect(ok, "defect " + format_double(value) + " exceeds c/|Λ| = " + format_double(bound) +
                         " at n = " + std::to_string(windows[i].index()));
      bounds.push_back(Json::array({windows[i].index(), cb.constant, bound}));
    }
    report["collision_bounds"] = std::move(bounds);
    report["bound_holds"] = holds;
  }
  if (cfg.contains("gamma")) {
    const Json& g = cfg.at("gamma");
    allow_keys(g, "higher.gamma", {"n", "h_max"});
    if (sys.is_finite()) throw ConfigError("higher.gamma needs the lattice backend");
    const std::int64_t n = as_int(need(g, "n", "higher.gamma"), "higher.gamma.n");
    const std::int64_t h_max = int_or(g, "h_max", n, "higher.gamma");
    const auto entries =
        gamma_sequence(sys, spec, box_window(sys.rank(), n), box_window(sys.rank(), h_max));
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (const auto& e : entries) {
      rows.push_back({static_cast<double>(e.h[0]), e.empirical.real(), e.empirical.imag(),
                      e.closed_form.real(), e.closed_form.imag(), e.difference,
                      e.boundary_bound.value_or(0.0)});
      worst = std::max(worst, e.difference);
      const double allowed = 1e-9 + e.boundary_bound.value_or(0.0);
      out.expect(e.difference <= allowed, "gamma at h = " + e.h.to_string() + " differs by " +
                                               format_double(e.difference));
    }
    out.text("higher_gamma.csv",
             table_csv({"h", "empirical_re", "empirical_im", "closed_re", "closed_im", "difference",
                        "boundary_bound"},
                       rows));
    report["gamma_max_difference"] = worst;
  }
  out.json("higher.json", report);
}

VectorSequence parse_sequence(const Json& j) {
  allow_keys(j, "vdc.sequence", {"kind", "alpha", "vector"});
  const std::string kind = as_string(need(j, "kind", "vdc.sequence"), "vdc.sequence.kind");
  Vector v = Vector::Ones(1);
  if (j.contains("vector")) v = vector_from_json(j.at("vector"));
  if (kind == "constant") return constant_sequence(v);
  if (kind == "alternating") return alternating_sequence(v);
  const double alpha = as_double(need(j, "alpha", "vdc.sequence"), "vdc.sequence.alpha");
  if (kind == "linear_phase") return linear_phase_sequence(alpha, v);
  if (kind == "weyl_quadratic") return weyl_quadratic_sequence(alpha, v);
  throw ConfigError("vdc.sequence.kind: unknown kind '" + kind + "'");
}

void run_vdc(const Json& cfg, Output& out) {
  allow_keys(cfg, "vdc", {"command", "group", "sequence", "windows", "tolerance", "seed"});
  const std::size_t q = rank_from(cfg, "vdc");
  const VectorSequence f = parse_sequence(need(cfg, "sequence", "vdc"));
  const WindowSchedule windows = parse_windows(need(cfg, "windows", "vdc"), q);
  const double tol = double_or(cfg, "tolerance", 0.05, "vdc");
  const VdcReport r = van_der_corput_report(f, windows, tol);
  Json report = to_json(r);
  report["sequence"] = f.label();
  out.json("vdc.json", report);

  std::vector<StatisticPoint> stat;
  std::vector<StatisticPoint> avg;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    stat.push_back({windows[i].index(), windows[i].size(), r.difference_set_statistic[i].value});
    avg.push_back({windows[i].index(), windows[i].size(), r.averages[i].value});
    const InequalityCheck c = check_norm_square_bound(f, windows[i]);
    out.expect(c.holds, "norm-square bound fails at n = " + std::to_string(windows[i].index()));
  }
  out.text("vdc_statistic.csv", statistic_csv(stat));
  out.text("vdc_averages.csv", statistic_csv(avg));
}

void run_compact(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "compact", {"command", "system", "a", "epsilon", "scan", "exponents",
                              "correlation", "szemeredi", "seed"});
  const System sys = parse_system(need(cfg, "system", "compact"), seed);
  const Observable a = parse_observable(sys, need(cfg, "a", "compact"));
  const double eps = as_double(need(cfg, "epsilon", "compact"), "compact.epsilon");
  const FolnerWindow scan =
      box_window(sys.rank(), as_int(need(cfg, "scan", "compact"), "compact.scan"));
  std::vector<std::int64_t> exponents{1};
  if (cfg.contains("exponents")) exponents = int_list(cfg.at("exponents"), "compact.exponents");

  Json report = report_object();
  const EpsilonNetCertificate cert = separated_orbit_set(sys, a, eps, scan);
  out.expect(verify_certificate(sys, a, cert), "separated-set certificate does not verify");
  report["separated_set"] = to_json(cert);
  const ReturnSet e = return_set(sys, a, eps, exponents, scan);
  out.expect(e.chain_certificate, "return-set chain inequality fails");
  report["return_set"] = to_json(e);

  if (cfg.contains("correlation")) {
    const Json& c = cfg.at("correlation");
    allow_keys(c, "compact.correlation", {"a", "exponents", "epsilon"});
    const Observable p = c.contains("a") ? parse_observable(sys, c.at("a")) : a;
    const auto ms = int_list(need(c, "exponents", "compact.correlation"),
                             "compact.correlation.exponents");
    Observable power = sys.identity();
    for (std::size_t i = 0; i < ms.size(); ++i) power = sys.product(power, p);
    const double top = sys.state(power).real();
    const double ceps = double_or(c, "epsilon", top / 2.0, "compact.correlation");
    Json rows = Json::array();
    std::size_t members = 0;
    for (const auto& g : scan) {
      const CorrelationBound cb = correlation_lower_bound(sys, p, ms, ceps, g);
      if (!cb.in_return_set) continue;
      ++members;
      out.expect(cb.holds, "correlation lower bound fails at g = " + g.to_string());
      rows.push_back(Json::array({element_to_json(g), cb.value, cb.bound}));
    }
    report["correlation"] = {{"epsilon", ceps}, {"members", members}, {"values", std::move(rows)}};
  }
  out.json("compact.json", report);

  if (cfg.contains("szemeredi")) {
    const Json& s = cfg.at("szemeredi");
    allow_keys(s, "compact.szemeredi", {"a", "exponents", "windows", "candidates"});
    const Observable p = s.contains("a") ? parse_observable(sys, s.at("a")) : a;
    const auto ms = int_list(need(s, "exponents", "compact.szemeredi"),
                             "compact.szemeredi.exponents");
    const WindowSchedule windows =
        parse_windows(need(s, "windows", "compact.szemeredi"), sys.rank());
    std::optional<std::vector<GroupElement>> candidates;
    if (s.contains("candidates")) {
      candidates = element_list(s.at("candidates"), sys.rank(), "compact.szemeredi.candidates");
    }
    const CompactSzemerediReport r = szemeredi_average_compact(sys, p, ms, windows, candidates);
    out.expect(r.tail_min > 0.0, "Szemerédi tail minimum is not positive");
    std::vector<StatisticPoint> pts;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      pts.push_back({windows[i].index(), windows[i].size(), r.per_window[i].average});
    }
    out.text("compact_szemeredi.csv", statistic_csv(pts));
    out.json("compact_szemeredi.json", to_json(r));
  }
}

void run_split(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "split", {"command", "system", "tolerance", "seed"});
  const System sys = parse_system(need(cfg, "system", "split"), seed);
  if (!sys.is_finite()) throw ConfigError("split needs a finite system");
  const FiniteSystem& fin = sys.finite();
  const double tol = double_or(cfg, "tolerance", 1e-8, "split");
  const GnsSpace gns = gns_build(fin);
  const KoopmanSplitting split = koopman_split(fin, gns, tol);
  const CompactFactor factor = eigenoperator_factor(fin, gns, split);
  const std::size_t full = static_cast<std::size_t>(fin.dim() * fin.dim());
  const std::size_t eigen_count = eigenoperator_rank(factor);
  const double invariance = factor_invariance_residual(fin, factor);

  Json report = report_object();
  report["system"] = fin.label();
  report["ergodic"] = split.dim_h1 == 1;
  report["dim_H1"] = split.dim_h1;
  report["dim_H0"] = split.dim_h0;
  report["factor_dim"] = factor.dimension();
  report["eigenoperator_count"] = eigen_count;
  const bool trivial = fin.dim() == 1;
  std::string verdict = "not-ergodic";
  std::string branch = "compact";
  if (split.dim_h1 == 1) {
    verdict = split.dim_h0 == 1 ? "weakly-mixing" : "has-nontrivial-compact-factor";
    if (split.dim_h0 == 1) branch = "weakly-mixing";
  }
  report["verdict"] = verdict;
  report["branch"] = branch;
  report["trivial"] = trivial;
  report["szemeredi_tail_min"] = nullptr;
  report["residuals"] = {{"commutator", split.commutator_residual},
                         {"unitarity", split.unitarity_residual},
                         {"eigen", split.eigen_residual},
                         {"factor_invariance", invariance}};
  out.expect(split.dim_h0 == full, "dim H0 differs from N^2");
  out.expect(split.dim_h1 >= 1, "H1 is empty");
  out.expect(eigen_count == split.dim_h0, "eigenoperator count differs from dim H0");
  out.expect(invariance <= 1e-10 * std::sqrt(static_cast<double>(full)),
             "compact factor is not invariant");
  if (fin.dim() <= 6) {
    const CommutantDims dims = commutant_dims(factor.basis, fin.dim());
    report["double_commutant_dim"] = dims.double_commutant;
    out.expect(dims.double_commutant == factor.dimension(),
               "double commutant dimension differs from the generated algebra");
  }
  out.json("split.json", report);
}

void run_szemeredi(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "szemeredi", {"command", "system", "a", "exponents", "windows", "seed"});
  const System sys = parse_system(need(cfg, "system", "szemeredi"), seed);
  const Observable a = parse_observable(sys, need(cfg, "a", "szemeredi"));
  const auto ms = int_list(need(cfg, "exponents", "szemeredi"), "szemeredi.exponents");
  const WindowSchedule windows = parse_windows(need(cfg, "windows", "szemeredi"), sys.rank());
  const SzemerediDriverReport r = szemeredi_driver(sys, a, ms, windows);
  out.expect(r.tail_min > 0.0, "Szemerédi tail minimum is not positive");
  out.expect(r.bound_holds, "averages leave the boundary band c/|Λ| around ω(a)^{k+1}");
  std::vector<StatisticPoint> pts;
  for (const auto& p : r.per_window) pts.push_back({p.n, p.window_size, p.average});
  out.text("szemeredi.csv", statistic_csv(pts));
  out.json("szemeredi.json", to_json(r));
}

void run_invariants(const Json& cfg, Output& out, std::optional<std::uint64_t> seed) {
  allow_keys(cfg, "invariants", {"command", "seed", "trials"});
  const std::uint64_t s = require_seed(cfg, seed, "invariants");
  std::map<std::string, std::size_t> trials;
  if (cfg.contains("trials")) {
    const Json& t = cfg.at("trials");
    const std::set<std::string> names(suite_names().begin(), suite_names().end());
    allow_keys(t, "invariants.trials", names);
    for (const auto& [name, v] : t.items()) {
      const auto n = as_int(v, "invariants.trials." + name);
      if (n < 0) throw ConfigError("invariants.trials." + name + " must be >= 0");
      trials[name] = static_cast<std::size_t>(n);
    }
  }
  const auto results = run_invariant_suites(s, trials);
  Json report = report_object();
  report["seed"] = s;
  Json suites = Json::array();
  for (const auto& r : results) {
    suites.push_back({{"name", r.name},
                      {"trials", r.trials},
                      {"failures", r.failures},
                      {"worst", r.worst},
                      {"first_failure", r.first_failure}});
    out.expect(r.failures == 0, r.name + ": " + std::to_string(r.failures) + " failing trials (" +
                                    r.first_failure + ")");
  }
  report["suites"] = std::move(suites);
  out.json("invariants.json", report);
}

}  // namespace

// ---- parsing --------------------------------------------------------------

WindowSchedule parse_windows(const Json& j, std::size_t q) {
  allow_keys(j, "windows", {"shape", "q", "n_min", "n_max", "stride", "n_values"});
  const std::string shape = j.contains("shape") ? as_string(j.at("shape"), "windows.shape") : "box";
  if (shape != "box") throw ConfigError("windows.shape: only \"box\" is supported");
  if (j.contains("q") && static_cast<std::size_t>(as_int(j.at("q"), "windows.q")) != q) {
    throw ConfigError("windows.q does not match the group rank");
  }
  if (j.contains("n_values")) {
    if (j.contains("n_min") || j.contains("n_max") || j.contains("stride")) {
      throw ConfigError("windows: give either n_values or n_min/n_max/stride");
    }
    WindowSchedule out;
    for (auto n : int_list(j.at("n_values"), "windows.n_values")) {
      if (n < 1) throw ConfigError("windows.n_values must be >= 1");
      out.push_back(box_window(q, n));
    }
    if (out.empty()) throw ConfigError("windows.n_values is empty");
    return out;
  }
  const auto n_min = as_int(need(j, "n_min", "windows"), "windows.n_min");
  const auto n_max = as_int(need(j, "n_max", "windows"), "windows.n_max");
  const auto stride = int_or(j, "stride", 1, "windows");
  if (n_min < 1 || n_max < n_min || stride < 1) {
    throw ConfigError("windows: need 1 <= n_min <= n_max and stride >= 1");
  }
  return box_schedule(q, n_min, n_max, stride);
}

Homomorphism parse_hom(const Json& j, std::size_t q) {
  if (j.is_number_integer()) return Homomorphism::scalar(q, j.get<std::int64_t>());
  if (!j.is_array() || j.size() != q) throw ConfigError("homomorphism: expected an integer or a q x q matrix");
  std::vector<std::int64_t> entries;
  for (const auto& row : j) {
    const auto r = int_list(row, "homomorphism row");
    if (r.size() != q) throw ConfigError("homomorphism: rows must have q entries");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return Homomorphism(q, std::move(entries));
}

System parse_system(const Json& j, std::optional<std::uint64_t> seed) {
  if (!j.is_object()) throw ConfigError("system: expected an object");
  const std::string kind = as_string(need(j, "kind", "system"), "system.kind");
  try {
    if (kind == "rotation" || kind == "clock_shift") {
      allow_keys(j, "system", {"kind", "p", "Q"});
      const auto p = as_int(need(j, "p", "system"), "system.p");
      const auto Q = as_int(need(j, "Q", "system"), "system.Q");
      return kind == "rotation" ? System(rotation_algebra_system(p, Q))
                                : System(clock_shift_system(p, Q));
    }
    if (kind == "permutation") {
      allow_keys(j, "system", {"kind", "N"});
      return System(permutation_system(as_int(need(j, "N", "system"), "system.N")));
    }
    if (kind == "shift") {
      allow_keys(j, "system", {"kind", "q", "d"});
      const auto q = int_or(j, "q", 1, "system");
      const auto d = int_or(j, "d", 2, "system");
      if (q < 1) throw ConfigError("system.q must be >= 1");
      return System(shift_system(static_cast<std::size_t>(q), static_cast<std::size_t>(d)));
    }
    if (kind == "finite") {
      allow_keys(j, "system", {"kind", "generators", "state", "named", "label"});
      std::vector<Matrix> gens;
      const Json& g = need(j, "generators", "system");
      if (!g.is_array() || g.empty()) throw ConfigError("system.generators: expected a nonempty list");
      for (const auto& m : g) gens.push_back(matrix_from_json(m));
      const auto n = gens.front().rows();
      std::optional<State> state;
      const Json& s = need(j, "state", "system");
      allow_keys(s, "system.state", {"kind", "matrix", "index"});
      const std::string sk = as_string(need(s, "kind", "system.state"), "system.state.kind");
      if (sk == "trace") {
        state = State::trace(n);
      } else if (sk == "density") {
        state = State(matrix_from_json(need(s, "matrix", "system.state")));
      } else if (sk == "basis") {
        state = State::basis(n, as_int(need(s, "index", "system.state"), "system.state.index"));
      } else {
        throw ConfigError("system.state.kind: unknown kind '" + sk + "'");
      }
      const std::string label =
          j.contains("label") ? as_string(j.at("label"), "system.label") : "finite";
      FiniteSystem fin(std::move(gens), std::move(*state), label);
      for (std::size_t i = 0; i < fin.rank(); ++i) {
        fin.add_named("G" + std::to_string(i + 1), fin.generators()[i]);
      }
      if (j.contains("named")) {
        const Json& named = j.at("named");
        if (!named.is_object()) throw ConfigError("system.named: expected an object");
        for (const auto& [name, m] : named.items()) fin.add_named(name, matrix_from_json(m));
      }
      return System(std::move(fin));
    }
    if (kind == "random") {
      allow_keys(j, "system", {"kind", "N", "q", "tracial"});
      const auto n = as_int(need(j, "N", "system"), "system.N");
      const auto q = int_or(j, "q", 1, "system");
      const bool tracial = j.contains("tracial") ? as_bool(j.at("tracial"), "system.tracial") : true;
      if (n < 1 || q < 1) throw ConfigError("random system needs N >= 1 and q >= 1");
      Rng rng(require_seed(Json::object(), seed, "a random system"));
      FiniteSystem fin = random_finite_system(rng, n, static_cast<std::size_t>(q), tracial);
      for (std::size_t i = 0; i < fin.rank(); ++i) {
        fin.add_named("G" + std::to_string(i + 1), fin.generators()[i]);
      }
      return System(std::move(fin));
    }
    if (kind == "product") {
      allow_keys(j, "system", {"kind", "of"});
      const System inner = parse_system(need(j, "of", "system"), seed);
      if (!inner.is_finite()) throw ConfigError("product systems need a finite inner system");
      return System(product_system(inner.finite()));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  throw ConfigError("system.kind: unknown kind '" + kind + "'");
}

Observable parse_observable(const System& sys, const Json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("observable: expected a nonempty object");
  try {
    if (j.contains("pauli")) {
      allow_keys(j, "observable", {"pauli", "sites"});
      if (sys.is_finite()) throw ConfigError("Pauli strings need the lattice backend");
      const auto sites = element_list(need(j, "sites", "observable"), sys.rank(), "observable.sites");
      return LocalObservable::pauli(sys.rank(), sites, as_string(j.at("pauli"), "observable.pauli"));
    }
    if (j.contains("local")) {
      allow_keys(j, "observable", {"local", "sites"});
      if (sys.is_finite()) throw ConfigError("local observables need the lattice backend");
      const auto sites = element_list(need(j, "sites", "observable"), sys.rank(), "observable.sites");
      return LocalObservable(sys.rank(), sys.quasi_local().site_dim(), sites,
                             matrix_from_json(j.at("local")));
    }
    if (j.contains("named")) {
      allow_keys(j, "observable", {"named", "power"});
      if (!sys.is_finite()) throw ConfigError("named matrices need a finite system");
      const std::string name = as_string(j.at("named"), "observable.named");
      const auto& named = sys.finite().named();
      const auto it = named.find(name);
      if (it == named.end()) throw ConfigError("observable: no named matrix '" + name + "'");
      const auto power = int_or(j, "power", 1, "observable");
      Matrix base = power < 0 ? Matrix(it->second.adjoint()) : it->second;
      Matrix out = Matrix::Identity(base.rows(), base.cols());
      for (std::int64_t i = 0; i < std::llabs(power); ++i) out = out * base;
      return out;
    }
    if (j.contains("matrix")) {
      allow_keys(j, "observable", {"matrix"});
      return matrix_from_json(j.at("matrix"));
    }
    if (j.contains("identity")) {
      allow_keys(j, "observable", {"identity"});
      return sys.identity();
    }
    if (j.contains("adjoint")) {
      allow_keys(j, "observable", {"adjoint"});
      return sys.adjoint(parse_observable(sys, j.at("adjoint")));
    }
    if (j.contains("product")) {
      allow_keys(j, "observable", {"product"});
      const Json& list = j.at("product");
      if (!list.is_array() || list.empty()) throw ConfigError("observable.product: expected a nonempty list");
      Observable acc = parse_observable(sys, list[0]);
      for (std::size_t i = 1; i < list.size(); ++i) acc = sys.product(acc, parse_observable(sys, list[i]));
      return acc;
    }
    if (j.contains("sum")) {
      allow_keys(j, "observable", {"sum"});
      const Json& list = j.at("sum");
      if (!list.is_array() || list.empty()) throw ConfigError("observable.sum: expected a nonempty list");
      std::optional<Observable> acc;
      for (const auto& term : list) {
        allow_keys(term, "observable.sum term", {"coef", "obs"});
        const Complex c = term.contains("coef") ? complex_from_json(term.at("coef")) : Complex(1.0);
        const Observable o = parse_observable(sys, need(term, "obs", "observable.sum term"));
        acc = acc ? sys.combine(1.0, *acc, c, o) : sys.combine(c, o, 0.0, o);
      }
      return *acc;
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("observable: ") + e.what());
  }
  throw ConfigError("observable: unrecognized form " + j.dump());
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"folner", "mix",   "higher",    "vdc",
                                              "compact", "split", "szemeredi", "invariants"};
  return names;
}

RunResult run(const RunOptions& options) {
  if (options.threads > 0) set_thread_count(options.threads);
  const Json& cfg = options.config;
  if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
  if (cfg.contains("command") && as_string(cfg.at("command"), "command") != options.command) {
    throw ConfigError("config is for '" + cfg.at("command").get<std::string>() +
                      "', not '" + options.command + "'");
  }
  Output out;
  out.dir = options.out_dir;
  std::optional<std::uint64_t> seed = options.seed;
  if (!seed && cfg.contains("seed")) seed = require_seed(cfg, std::nullopt, options.command);

  try {
    const std::string& c = options.command;
    if (c == "folner") {
      run_folner(cfg, out);
    } else if (c == "mix") {
      run_mix(cfg, out, seed);
    } else if (c == "higher") {
      run_higher(cfg, out, seed);
    } else if (c == "vdc") {
      run_vdc(cfg, out);
    } else if (c == "compact") {
      run_compact(cfg, out, seed);
    } else if (c == "split") {
      run_split(cfg, out, seed);
    } else if (c == "szemeredi") {
      run_szemeredi(cfg, out, seed);
    } else if (c == "invariants") {
      run_invariants(cfg, out, seed);
    } else {
      throw ConfigError("unknown subcommand '" + c + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const NumericalError& e) {
    out.result.failures.push_back(std::string("numerical: ") + e.what());
  }

  if (!out.result.failures.empty()) {
    Json report = report_object();
    report["command"] = options.command;
    report["failures"] = out.result.failures;
    out.json("failures.json", report);
    out.result.exit_code = 1;
  }
  return out.result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"ergodix: ergodic averages, mixing statistics and spectral splitting"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--seed", seed, "RNG seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  RunOptions options;
  options.command = app.get_subcommands().front()->get_name();
  options.out_dir = out_dir;
  options.seed = seed;
  options.threads = threads;
  try {
    try {
      options.config = Json::parse(read_text(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const RunResult r = run(options);
    for (const auto& f : r.failures) std::cerr << "invariant failed: " << f << "\n";
    for (const auto& p : r.artifacts) std::cout << p.string() << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ergodix
