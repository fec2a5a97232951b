#include "ergodix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ergodix/error.hpp"
#include "ergodix/parallel.hpp"

namespace ergodix {

namespace {

std::vector<GroupElement> union_of(const WindowSchedule& windows) {
  std::set<GroupElement> all;
  for (const auto& w : windows) all.insert(w.begin(), w.end());
  return {all.begin(), all.end()};
}

std::size_t index_of(const std::vector<GroupElement>& sorted, const GroupElement& g) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), g);
  return static_cast<std::size_t>(it - sorted.begin());
}

template <class T, class F>
std::vector<T> means_impl(const WindowSchedule& windows, const F& fn) {
  if (windows.empty()) throw InvalidArgument("window schedule is empty");
  const auto points = union_of(windows);
  const auto values = parallel_map(points.size(), [&](std::size_t i) { return T(fn(points[i])); });
  std::vector<T> out;
  out.reserve(windows.size());
  std::vector<T> slice;
  for (const auto& w : windows) {
    slice.clear();
    slice.reserve(w.size());
    for (const auto& g : w) slice.push_back(values[index_of(points, g)]);
    out.push_back(ordered_sum(std::span<const T>(slice)) / static_cast<double>(w.size()));
  }
  return out;
}

std::vector<StatisticPoint> to_points(const WindowSchedule& windows,
                                      const std::vector<double>& values) {
  std::vector<StatisticPoint> pts;
  pts.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    pts.push_back({windows[i].index(), windows[i].size(), values[i]});
  }
  return pts;
}

void require_rank(const System& sys, const Homomorphism& hom) {
  if (hom.rank() != sys.rank()) {
    throw InvalidArgument("homomorphism rank " + std::to_string(hom.rank()) +
                          " does not match the system's group rank " +
                          std::to_string(sys.rank()));
  }
}

void require_windows(const System& sys, const WindowSchedule& windows) {
  if (windows.empty()) throw InvalidArgument("window schedule is empty");
  for (const auto& w : windows) {
    if (w.rank() != sys.rank()) throw InvalidArgument("window rank does not match the system");
  }
}

std::size_t tail_begin(std::size_t count, double fraction) {
  const auto tail = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(count)));
  return count - std::clamp<std::size_t>(tail, 1, count);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::decaying: return "decaying";
    case Verdict::non_decaying: return "non-decaying";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MixingStatistic classify(std::vector<StatisticPoint> points, const DecayRule& rule) {
  MixingStatistic stat;
  stat.per_window = std::move(points);
  if (stat.per_window.empty()) return stat;
  for (const auto& p : stat.per_window) {
    if (!std::isfinite(p.value) || p.value < 0.0) {
      throw NumericalError("mixing statistics must be finite and nonnegative");
    }
  }
  const double first = stat.per_window.front().value;
  stat.verdict_threshold = rule.relative_threshold * first;
  const std::size_t begin = tail_begin(stat.per_window.size(), rule.tail_fraction);
  double tail_max = 0.0;
  double tail_min = stat.per_window[begin].value;
  for (std::size_t i = begin; i < stat.per_window.size(); ++i) {
    tail_max = std::max(tail_max, stat.per_window[i].value);
    tail_min = std::min(tail_min, stat.per_window[i].value);
  }
  const double last = stat.per_window.back().value;
  if (tail_max == 0.0 && first == 0.0) {
    stat.verdict = Verdict::decaying;
  } else if (tail_max <= stat.verdict_threshold && last < stat.verdict_threshold) {
    stat.verdict = Verdict::decaying;
  } else if (tail_min >= 0.5 * first) {
    stat.verdict = Verdict::non_decaying;
  } else {
    stat.verdict = Verdict::inconclusive;
  }
  return stat;
}

std::vector<double> window_means(const WindowSchedule& windows,
                                 const std::function<double(const GroupElement&)>& fn) {
  return means_impl<double>(windows, fn);
}

std::vector<Complex> window_means_complex(const WindowSchedule& windows,
                                          const std::function<Complex(const GroupElement&)>& fn) {
  return means_impl<Complex>(windows, fn);
}

ErgodicAverage ergodic_average(const System& sys, const Observable& a, const Observable& b,
                               const Homomorphism& hom, const WindowSchedule& windows) {
  require_rank(sys, hom);
  require_windows(sys, windows);
  const auto id = Homomorphism::zero(sys.rank());
  const std::array<Factor, 2> factors{Factor{a, id}, Factor{b, hom}};
  const auto means = window_means_complex(
      windows, [&](const GroupElement& g) { return sys.evaluate(factors, g); });
  ErgodicAverage out;
  out.reference = sys.state(a) * sys.state(b);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.per_window.push_back({windows[i].index(), windows[i].size(), means[i]});
  }
  return out;
}

namespace {

MixingStatistic correlation_defect(const System& sys, const Observable& a, const Observable& b,
                                   const Homomorphism& hom, const WindowSchedule& windows,
                                   const DecayRule& rule, bool squared) {
  require_rank(sys, hom);
  require_windows(sys, windows);
  const auto id = Homomorphism::zero(sys.rank());
  const std::array<Factor, 2> factors{Factor{a, id}, Factor{b, hom}};
  const Complex reference = sys.state(a) * sys.state(b);
  const auto means = window_means(windows, [&](const GroupElement& g) {
    const double d = std::abs(sys.evaluate(factors, g) - reference);
    return squared ? d * d : d;
  });
  return classify(to_points(windows, means), rule);
}

}  // namespace

MixingStatistic weak_mixing_defect(const System& sys, const Observable& a, const Observable& b,
                                   const Homomorphism& hom, const WindowSchedule& windows,
                                   const DecayRule& rule) {
  return correlation_defect(sys, a, b, hom, windows, rule, false);
}

MixingStatistic square_defect(const System& sys, const Observable& a, const Observable& b,
                              const Homomorphism& hom, const WindowSchedule& windows,
                              const DecayRule& rule) {
  return correlation_defect(sys, a, b, hom, windows, rule, true);
}

MixingStatistic asymptotic_abelianness(const System& sys, const Observable& a,
                                       const Observable& b, const Homomorphism& hom,
                                       const WindowSchedule& windows, const DecayRule& rule) {
  require_rank(sys, hom);
  require_windows(sys, windows);
  const auto means = window_means(
      windows, [&](const GroupElement& g) { return sys.commutator_norm(a, b, hom, g); });
  return classify(to_points(windows, means), rule);
}

void HigherOrderSpec::validate(const System& sys) const {
  if (homs.empty()) throw InvalidArgument("higher-order spec needs k >= 1 homomorphisms");
  if (observables.size() != homs.size() + 1) {
    throw InvalidArgument("higher-order spec needs k+1 observables for k homomorphisms");
  }
  for (const auto& h : homs) require_rank(sys, h);
  for (std::size_t i = 0; i < homs.size(); ++i) {
    for (std::size_t j = i + 1; j < homs.size(); ++j) {
      if (homs[i] == homs[j]) {
        throw InvalidArgument("higher-order spec: homomorphisms must be pairwise distinct");
      }
    }
  }
  for (const auto& a : observables) sys.check(a);
}

Complex multi_correlation(const System& sys, const HigherOrderSpec& spec, const GroupElement& g) {
  std::vector<Factor> factors;
  factors.reserve(spec.observables.size());
  factors.push_back({spec.observables[0], Homomorphism::zero(sys.rank())});
  for (std::size_t j = 0; j < spec.homs.size(); ++j) {
    factors.push_back({spec.observables[j + 1], spec.homs[j]});
  }
  return sys.evaluate(factors, g);
}

MixingStatistic higher_order_defect(const System& sys, const HigherOrderSpec& spec,
                                    const WindowSchedule& windows, const DecayRule& rule) {
  spec.validate(sys);
  require_windows(sys, windows);
  Complex reference = 1.0;
  for (const auto& a : spec.observables) reference *= sys.state(a);
  const auto means = window_means(windows, [&](const GroupElement& g) {
    return std::abs(multi_correlation(sys, spec, g) - reference);
  });
  return classify(to_points(windows, means), rule);
}

CollisionBound collision_bound(const System& sys, const HigherOrderSpec& spec,
                               const FolnerWindow& window) {
  spec.validate(sys);
  if (sys.is_finite()) {
    throw InvalidArgument("collision bounds apply to the lattice backend only");
  }
  CollisionBound out;
  double norms = 1.0;
  double states = 1.0;
  for (const auto& a : spec.observables) {
    norms *= sys.operator_norm(a);
    states *= std::abs(sys.state(a));
  }
  out.per_term_bound = norms + states;
  std::vector<GroupElement> sites;
  for (const auto& g : window) {
    sites.clear();
    for (std::size_t j = 0; j < spec.observables.size(); ++j) {
      const GroupElement shift = j == 0 ? GroupElement::zero(sys.rank()) : spec.homs[j - 1](g);
      for (const auto& s : std::get<LocalObservable>(spec.observables[j]).support()) {
        sites.push_back(s + shift);
      }
    }
    std::sort(sites.begin(), sites.end());
    if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
      out.collisions.push_back(g);
    }
  }
  out.constant = static_cast<double>(out.collisions.size()) * out.per_term_bound;
  return out;
}

namespace {

// Supports of factor j at g and g+h against those of factor i != j.
bool factors_meet(const HigherOrderSpec& spec, const GroupElement& g, const GroupElement& h) {
  const std::size_t k = spec.homs.size();
  std::vector<std::vector<GroupElement>> sites(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& support = std::get<LocalObservable>(spec.observables[j + 1]).support();
    for (const auto& at : {spec.homs[j](g), spec.homs[j](g + h)}) {
      for (const auto& s : support) sites[j].push_back(s + at);
    }
    std::sort(sites[j].begin(), sites[j].end());
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (const auto& s : sites[i]) {
        if (std::binary_search(sites[j].begin(), sites[j].end(), s)) return true;
      }
    }
  }
  return false;
}

}  // namespace

Complex gamma_closed_form(const System& sys, const HigherOrderSpec& spec, const GroupElement& h) {
  Complex kappa = 1.0;
  Complex prod = 1.0;
  const auto id = Homomorphism::zero(sys.rank());
  for (std::size_t j = 0; j < spec.homs.size(); ++j) {
    const Observable& a = spec.observables[j + 1];
    kappa *= sys.state(a);
    const Observable a_star = sys.adjoint(a);
    const std::array<Factor, 2> f{Factor{a_star, id}, Factor{a, spec.homs[j]}};
    prod *= sys.evaluate(f, h);
  }
  return prod - std::norm(kappa);
}

std::vector<GammaEntry> gamma_sequence(const System& sys, const HigherOrderSpec& spec,
                                       const FolnerWindow& window,
                                       const std::optional<FolnerWindow>& h_range) {
  spec.validate(sys);
  const FolnerWindow hs = h_range ? *h_range : inverse_product(window);
  const std::size_t k = spec.homs.size();
  std::vector<Observable> stars;
  stars.reserve(k);
  for (std::size_t j = 0; j < k; ++j) stars.push_back(sys.adjoint(spec.observables[j + 1]));
  Complex kappa = 1.0;
  for (std::size_t j = 0; j < k; ++j) kappa *= sys.state(spec.observables[j + 1]);

  double norms = 1.0;
  for (std::size_t j = 0; j < k; ++j) norms *= sys.operator_norm(spec.observables[j + 1]);

  // ω(P_g) on window + h_range.
  std::set<GroupElement> reach;
  for (const auto& g : window) {
    for (const auto& h : hs) reach.insert(g + h);
    reach.insert(g);
  }
  const std::vector<GroupElement> points(reach.begin(), reach.end());
  auto product_at = [&](const GroupElement& g) {
    std::vector<Placed> placed;
    placed.reserve(k);
    for (std::size_t j = 0; j < k; ++j) placed.push_back({spec.observables[j + 1], spec.homs[j](g)});
    return sys.evaluate(placed);
  };
  const auto omega_p = parallel_map(points.size(), [&](std::size_t i) { return product_at(points[i]); });
  auto omega_p_at = [&](const GroupElement& g) { return omega_p[index_of(points, g)]; };

  const auto& h_list = hs.elements();
  return parallel_map(h_list.size(), [&](std::size_t hi) {
    const GroupElement& h = h_list[hi];
    std::vector<Complex> terms;
    terms.reserve(window.size());
    std::vector<Placed> placed;
    for (const auto& g : window) {
      const GroupElement gh = g + h;
      placed.clear();
      for (std::size_t j = k; j-- > 0;) placed.push_back({stars[j], spec.homs[j](g)});
      for (std::size_t j = 0; j < k; ++j) placed.push_back({spec.observables[j + 1], spec.homs[j](gh)});
      const Complex cross = sys.evaluate(placed);
      terms.push_back(cross - kappa * std::conj(omega_p_at(g)) - std::conj(kappa) * omega_p_at(gh) +
                      std::norm(kappa));
    }
    GammaEntry e;
    if (!sys.is_finite()) {
      for (const auto& g : window) {
        if (factors_meet(spec, g, h)) ++e.exceptional;
      }
      e.boundary_bound = 2.0 * (norms + std::abs(kappa)) * (norms + std::abs(kappa)) *
                         static_cast<double>(e.exceptional) / static_cast<double>(window.size());
    }
    e.h = h;
    e.empirical = ordered_sum(std::span<const Complex>(terms)) / static_cast<double>(window.size());
    e.closed_form = gamma_closed_form(sys, spec, h);
    e.difference = std::abs(e.empirical - e.closed_form);
    return e;
  });
}

DensityLimitReport density_limit_check(const std::function<double(const GroupElement&)>& f,
                                       const WindowSchedule& windows,
                                       const std::vector<double>& epsilons, double tolerance) {
  if (windows.empty()) throw InvalidArgument("density_limit_check: empty schedule");
  const auto points = union_of(windows);
  const auto values = parallel_map(points.size(), [&](std::size_t i) {
    const double v = f(points[i]);
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("density_limit_check: f must be finite and nonnegative");
    }
    return v;
  });
  auto value_at = [&](const GroupElement& g) { return values[index_of(points, g)]; };
  const std::size_t begin = tail_begin(windows.size(), 0.25);
  auto vanishes = [&](const std::vector<StatisticPoint>& pts) {
    for (std::size_t i = begin; i < pts.size(); ++i) {
      if (pts[i].value > tolerance) return false;
    }
    return true;
  };

  DensityLimitReport report;
  const auto averages = window_means(windows, value_at);
  report.averages = to_points(windows, averages);
  report.average_vanishes = vanishes(report.averages);
  report.densities_vanish = true;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw InvalidArgument("density_limit_check: epsilons must be positive");
    DensityLimitReport::Level level;
    level.epsilon = eps;
    for (const auto& w : windows) {
      std::size_t hits = 0;
      for (const auto& g : w) {
        if (value_at(g) >= eps) ++hits;
      }
      level.densities.push_back(
          {w.index(), w.size(), static_cast<double>(hits) / static_cast<double>(w.size())});
    }
    level.vanishes = vanishes(level.densities);
    report.densities_vanish = report.densities_vanish && level.vanishes;
    report.levels.push_back(std::move(level));
  }
  report.consistent = report.average_vanishes == report.densities_vanish;
  return report;
}

}  // namespace ergodix
