#include "ergodix/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ergodix/error.hpp"
#include "ergodix/mixing.hpp"
#include "ergodix/parallel.hpp"

namespace ergodix {

namespace {

void require_positive_tracial(const System& sys, const Observable& a) {
  if (!sys.tracial()) throw InvalidArgument("the lower bound needs a tracial state");
  if (sys.min_eigenvalue(a) < -1e-10) throw InvalidArgument("observable is not positive");
  if (!(sys.state(a).real() > 0.0)) throw InvalidArgument("observable needs ω(a) > 0");
}

Observable power(const System& sys, const Observable& a, std::size_t k) {
  Observable out = sys.identity();
  for (std::size_t i = 0; i < k; ++i) out = sys.product(out, a);
  return out;
}

Observable scaled(const System& sys, const Observable& a, double s) {
  return sys.combine(s, a, 0.0, a);
}

double return_distance(const System& sys, const Observable& a,
                       const std::vector<std::int64_t>& exponents, const GroupElement& g) {
  double worst = 0.0;
  for (auto m : exponents) worst = std::max(worst, sys.omega_distance(sys.act(a, g * m), a));
  return worst;
}

// {−s..s}^q, allowing s = 0.
FolnerWindow centered_box(std::size_t q, std::int64_t s) {
  if (s == 0) return FolnerWindow(0, {GroupElement::zero(q)});
  return box_window(q, s);
}

// Smallest centered box of offsets c such that E meets g + c for every g in
// the box {−(R−s)..R−s}^q, R being the scan radius.
std::optional<std::vector<GroupElement>> gap_candidates(const MembershipSet& e, std::size_t q,
                                                        std::int64_t radius) {
  for (std::int64_t s = 0; s <= radius; ++s) {
    auto candidates = centered_box(q, s).elements();
    if (relative_density_witness(e, centered_box(q, radius - s), candidates).accepted) {
      return candidates;
    }
  }
  return std::nullopt;
}

std::int64_t window_radius(const FolnerWindow& w) {
  std::int64_t radius = 0;
  for (const auto& g : w) {
    for (auto c : g.coords()) radius = std::max<std::int64_t>(radius, std::llabs(c));
  }
  return radius;
}

}  // namespace

EpsilonNetCertificate separated_orbit_set(const System& sys, const Observable& a, double epsilon,
                                          const FolnerWindow& scan) {
  if (!(epsilon > 0.0)) throw InvalidArgument("ε must be positive");
  sys.check(a);
  const std::vector<GroupElement> elems = scan.elements();
  const auto orbit = parallel_map(elems.size(), [&](std::size_t i) { return sys.act(a, elems[i]); });

  EpsilonNetCertificate cert;
  cert.epsilon = epsilon;
  cert.scan_window = scan;
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    bool separated = true;
    for (auto j : chosen) {
      if (sys.omega_distance(orbit[i], orbit[j]) < epsilon) {
        separated = false;
        break;
      }
    }
    if (separated) chosen.push_back(i);
  }
  for (auto j : chosen) {
    cert.elements.push_back(elems[j]);
    cert.points.push_back(orbit[j]);
  }
  cert.separation = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < chosen.size(); ++x) {
    for (std::size_t y = x + 1; y < chosen.size(); ++y) {
      cert.separation =
          std::min(cert.separation, sys.omega_distance(orbit[chosen[x]], orbit[chosen[y]]));
    }
  }
  const auto nearest = parallel_map(orbit.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto j : chosen) best = std::min(best, sys.omega_distance(orbit[i], orbit[j]));
    return best;
  });
  cert.covering_radius = *std::max_element(nearest.begin(), nearest.end());
  return cert;
}

bool verify_certificate(const System& sys, const Observable& a,
                        const EpsilonNetCertificate& cert) {
  if (cert.points.size() != cert.elements.size()) return false;
  for (std::size_t i = 0; i < cert.points.size(); ++i) {
    if (sys.omega_distance(cert.points[i], sys.act(a, cert.elements[i])) > 1e-12) return false;
  }
  if (cert.kind == EpsilonNetCertificate::Kind::separated_maximal) {
    for (std::size_t i = 0; i < cert.points.size(); ++i) {
      for (std::size_t j = i + 1; j < cert.points.size(); ++j) {
        if (sys.omega_distance(cert.points[i], cert.points[j]) < cert.epsilon) return false;
      }
    }
  }
  // Maximality on the scan and the net property are the same statement.
  for (const auto& g : cert.scan_window) {
    const Observable x = sys.act(a, g);
    bool covered = false;
    for (const auto& p : cert.points) {
      if (sys.omega_distance(x, p) < cert.epsilon) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

MembershipSet ReturnSet::as_membership() const {
  return MembershipSet::finite(members);
}

ReturnSet return_set(const System& sys, const Observable& a, double epsilon,
                     const std::vector<std::int64_t>& exponents, const FolnerWindow& scan) {
  if (!(epsilon > 0.0)) throw InvalidArgument("ε must be positive");
  if (exponents.empty()) throw InvalidArgument("return sets need at least one exponent");
  sys.check(a);
  const std::vector<GroupElement> elems = scan.elements();
  const auto dist =
      parallel_map(elems.size(), [&](std::size_t i) { return return_distance(sys, a, exponents, elems[i]); });

  ReturnSet out;
  out.epsilon = epsilon;
  out.exponents = exponents;
  out.scan_window = scan;
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (dist[i] < epsilon) hits.push_back(i);
  }
  const auto chain = parallel_map(hits.size(), [&](std::size_t idx) {
    const auto& g = elems[hits[idx]];
    const double base = sys.omega_distance(sys.act(a, g), a);
    for (auto m : exponents) {
      const double d = sys.omega_distance(sys.act(a, g * m), a);
      if (d > static_cast<double>(std::llabs(m)) * base * (1.0 + 1e-9) + 1e-12) return false;
    }
    return true;
  });
  out.chain_certificate = std::all_of(chain.begin(), chain.end(), [](bool b) { return b; });
  for (auto i : hits) {
    out.members.push_back(elems[i]);
    out.member_distances.push_back(dist[i]);
  }
  if (!out.members.empty()) {
    out.gap_witness = gap_candidates(out.as_membership(), scan.rank(), window_radius(scan));
  }
  return out;
}

CorrelationBound correlation_lower_bound(const System& sys, const Observable& a,
                                         const std::vector<std::int64_t>& exponents,
                                         double epsilon, const GroupElement& g) {
  sys.check(a);
  require_positive_tracial(sys, a);
  if (exponents.empty()) throw InvalidArgument("need at least one exponent");
  const std::size_t factors = exponents.size();
  const double top = sys.state(power(sys, a, factors)).real();
  if (!(epsilon > 0.0) || !(epsilon < top)) {
    throw InvalidArgument("ε must lie in (0, ω(a^{k+1}))");
  }
  std::vector<Placed> placed;
  std::vector<GroupElement> at;
  for (auto m : exponents) at.push_back(g * m);
  for (const auto& x : at) placed.push_back({a, x});

  CorrelationBound out;
  out.value = std::abs(sys.evaluate(placed));
  out.bound = top - epsilon;
  out.holds = out.value > out.bound;
  const double na = sys.operator_norm(a);
  const Observable b = scaled(sys, a, 1.0 / na);
  const double threshold =
      epsilon / (std::pow(na, static_cast<double>(factors)) * static_cast<double>(factors));
  out.in_return_set = return_distance(sys, b, exponents, g) < threshold;
  return out;
}

CompactSzemerediReport szemeredi_average_compact(
    const System& sys, const Observable& a, const std::vector<std::int64_t>& exponents,
    const WindowSchedule& windows, const std::optional<std::vector<GroupElement>>& candidates) {
  sys.check(a);
  require_positive_tracial(sys, a);
  if (exponents.empty()) throw InvalidArgument("need exponents m_1 < ... < m_k");
  if (windows.empty()) throw InvalidArgument("need at least one window");
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    if (exponents[i] <= exponents[i - 1]) throw InvalidArgument("exponents must increase");
  }
  const std::size_t q = sys.rank();
  const std::size_t factors = exponents.size() + 1;

  CompactSzemerediReport report;
  report.exponents = exponents;
  report.epsilon = sys.state(power(sys, a, factors)).real() / 2.0;
  const double na = sys.operator_norm(a);
  const Observable b = scaled(sys, a, 1.0 / na);
  report.return_threshold =
      report.epsilon / (std::pow(na, static_cast<double>(factors)) * static_cast<double>(factors));

  std::vector<std::int64_t> with_zero{0};
  with_zero.insert(with_zero.end(), exponents.begin(), exponents.end());

  std::int64_t radius = 0;
  for (const auto& w : windows) {
    if (w.rank() != q) throw InvalidArgument("window rank does not match the system");
    radius = std::max(radius, window_radius(w));
  }
  const FolnerWindow scan = box_window(q, radius);
  const ReturnSet e = return_set(sys, b, report.return_threshold, with_zero, scan);
  if (e.members.empty()) throw InvalidArgument("return set is empty on the scan window");
  report.scan_window = scan;
  report.e_members = e.members;

  const double threshold = report.return_threshold;
  const MembershipSet in_e("return set", [&sys, &b, &with_zero, threshold](const GroupElement& g) {
    return return_distance(sys, b, with_zero, g) < threshold;
  });
  if (candidates) {
    if (candidates->empty()) throw InvalidArgument("candidate list is empty");
    report.candidates = *candidates;
  } else {
    if (!e.gap_witness) throw InvalidArgument("return set is not relatively dense on the scan window");
    report.candidates = *e.gap_witness;
  }

  WindowSchedule shifted;
  shifted.reserve(windows.size());
  for (const auto& w : windows) {
    const ShiftChoice choice = best_shift_for_density(w, in_e, report.candidates);
    shifted.push_back(shift_window(w, choice.shift));
    report.per_window.push_back({w.index(), choice.shift, choice.ratio, 0.0});
  }

  const auto means = window_means(shifted, [&](const GroupElement& g) {
    std::vector<Placed> placed;
    std::vector<GroupElement> at;
    at.reserve(with_zero.size());
    for (auto m : with_zero) at.push_back(g * m);
    for (const auto& x : at) placed.push_back({a, x});
    return std::abs(sys.evaluate(placed));
  });
  for (std::size_t i = 0; i < means.size(); ++i) report.per_window[i].average = means[i];

  const std::size_t tail = std::max<std::size_t>(1, windows.size() / 4);
  report.tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = windows.size() - tail; i < windows.size(); ++i) {
    report.tail_min = std::min(report.tail_min, means[i]);
  }
  return report;
}

}  // namespace ergodix
