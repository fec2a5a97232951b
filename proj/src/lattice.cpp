#include "ergodix/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "ergodix/error.hpp"

namespace ergodix {

namespace {

void require_same_rank(const GroupElement& a, const GroupElement& b) {
  if (a.rank() != b.rank()) {
    throw InvalidArgument("group elements of different rank: " + a.to_string() + " and " +
                          b.to_string());
  }
}

std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GroupElement GroupElement::unit(std::size_t q, std::size_t axis) {
  if (axis >= q) throw InvalidArgument("unit vector axis out of range");
  std::vector<std::int64_t> c(q, 0);
  c[axis] = 1;
  return GroupElement(std::move(c));
}

bool GroupElement::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t x) { return x == 0; });
}

GroupElement GroupElement::operator+(const GroupElement& other) const {
  require_same_rank(*this, other);
  std::vector<std::int64_t> c(coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.coords_[i];
  return GroupElement(std::move(c));
}

GroupElement GroupElement::operator-(const GroupElement& other) const {
  require_same_rank(*this, other);
  std::vector<std::int64_t> c(coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= other.coords_[i];
  return GroupElement(std::move(c));
}

GroupElement GroupElement::operator-() const {
  std::vector<std::int64_t> c(coords_);
  for (auto& x : c) x = -x;
  return GroupElement(std::move(c));
}

GroupElement GroupElement::operator*(std::int64_t m) const {
  std::vector<std::int64_t> c(coords_);
  for (auto& x : c) x *= m;
  return GroupElement(std::move(c));
}

std::string GroupElement::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) os << ',';
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

Homomorphism::Homomorphism(std::size_t q, std::vector<std::int64_t> row_major)
    : q_(q), entries_(std::move(row_major)) {
  if (q_ == 0) throw InvalidArgument("homomorphism rank must be positive");
  if (entries_.size() != q_ * q_) {
    throw InvalidArgument("homomorphism needs q*q entries");
  }
}

Homomorphism Homomorphism::scalar(std::size_t q, std::int64_t m) {
  std::vector<std::int64_t> e(q * q, 0);
  for (std::size_t i = 0; i < q; ++i) e[i * q + i] = m;
  return Homomorphism(q, std::move(e));
}

bool Homomorphism::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](std::int64_t x) { return x == 0; });
}

std::optional<std::int64_t> Homomorphism::as_scalar() const {
  const std::int64_t m = entries_[0];
  for (std::size_t r = 0; r < q_; ++r) {
    for (std::size_t c = 0; c < q_; ++c) {
      if (entry(r, c) != (r == c ? m : 0)) return std::nullopt;
    }
  }
  return m;
}

GroupElement Homomorphism::apply(const GroupElement& g) const {
  if (g.rank() != q_) throw InvalidArgument("homomorphism applied to element of wrong rank");
  std::vector<std::int64_t> out(q_, 0);
  for (std::size_t r = 0; r < q_; ++r) {
    std::int64_t acc = 0;
    for (std::size_t c = 0; c < q_; ++c) acc += entry(r, c) * g[c];
    out[r] = acc;
  }
  return GroupElement(std::move(out));
}

Homomorphism Homomorphism::operator-(const Homomorphism& other) const {
  if (other.q_ != q_) throw InvalidArgument("homomorphisms of different rank");
  std::vector<std::int64_t> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.entries_[i];
  return Homomorphism(q_, std::move(e));
}

std::string Homomorphism::to_string() const {
  if (auto m = as_scalar()) return std::to_string(*m);
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < q_; ++r) {
    if (r) os << ';';
    for (std::size_t c = 0; c < q_; ++c) {
      if (c) os << ',';
      os << entry(r, c);
    }
  }
  os << ']';
  return os.str();
}

HomSet::HomSet(std::vector<Homomorphism> homs) : homs_(std::move(homs)) {
  for (const auto& h : homs_) {
    if (h.is_zero()) throw InvalidArgument("homomorphism sets may not contain the zero map");
    if (h.rank() != homs_.front().rank()) throw InvalidArgument("mixed-rank homomorphism set");
  }
}

bool HomSet::contains(const Homomorphism& h) const {
  return std::find(homs_.begin(), homs_.end(), h) != homs_.end();
}

bool HomSet::translational() const {
  for (const auto& a : homs_) {
    for (const auto& b : homs_) {
      if (a == b) continue;
      if (!contains(a - b)) return false;
    }
  }
  return true;
}

FolnerWindow::FolnerWindow(std::int64_t index, std::vector<GroupElement> elements,
                           WindowShape shape)
    : index_(index), elements_(std::move(elements)), shape_(shape) {
  if (elements_.empty()) throw InvalidArgument("averaging windows must be nonempty");
  const auto q = elements_.front().rank();
  for (const auto& g : elements_) {
    if (g.rank() != q) throw InvalidArgument("window elements of mixed rank");
  }
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool FolnerWindow::contains(const GroupElement& g) const {
  if (shape_ == WindowShape::box) {
    for (std::size_t i = 0; i < g.rank(); ++i) {
      if (std::llabs(g[i]) > index_) return false;
    }
    return true;
  }
  return std::binary_search(elements_.begin(), elements_.end(), g);
}

FolnerWindow box_window(std::size_t q, std::int64_t n) {
  if (q == 0) throw InvalidArgument("box_window: q must be at least 1");
  if (n <= 0) throw InvalidArgument("box_window: n must be at least 1");
  const std::int64_t side = 2 * n + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < q; ++i) total *= static_cast<std::size_t>(side);
  std::vector<GroupElement> elements;
  elements.reserve(total);
  std::vector<std::int64_t> c(q, -n);
  for (std::size_t k = 0; k < total; ++k) {
    elements.emplace_back(c);
    for (std::size_t i = q; i-- > 0;) {
      if (++c[i] <= n) break;
      c[i] = -n;
    }
  }
  return FolnerWindow(n, std::move(elements), WindowShape::box);
}

WindowSchedule box_schedule(std::size_t q, std::int64_t n_min, std::int64_t n_max,
                            std::int64_t stride) {
  if (stride <= 0) throw InvalidArgument("window stride must be positive");
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("need 1 <= n_min <= n_max");
  WindowSchedule out;
  for (std::int64_t n = n_min; n <= n_max; n += stride) out.push_back(box_window(q, n));
  return out;
}

FolnerWindow dilated_box(std::size_t q, std::int64_t n, std::int64_t m) {
  if (m == 0) throw InvalidArgument("dilated_box: m must be nonzero");
  const auto w = box_window(q, std::llabs(m) * n);
  return FolnerWindow(n, w.elements(), WindowShape::custom);
}

FolnerWindow inverse_product(const FolnerWindow& window) {
  if (window.shape() == WindowShape::box) {
    auto w = box_window(window.rank(), 2 * window.index());
    return FolnerWindow(window.index(), w.elements(), WindowShape::custom);
  }
  std::set<GroupElement> diffs;
  for (const auto& a : window) {
    for (const auto& b : window) diffs.insert(b - a);
  }
  return FolnerWindow(window.index(), {diffs.begin(), diffs.end()}, WindowShape::custom);
}

double tempelman_ratio(const FolnerWindow& window) {
  if (window.shape() == WindowShape::box) {
    const double side = static_cast<double>(4 * window.index() + 1);
    return std::pow(side, static_cast<double>(window.rank())) / static_cast<double>(window.size());
  }
  return static_cast<double>(inverse_product(window).size()) /
         static_cast<double>(window.size());
}

double folner_defect(const FolnerWindow& window, const GroupElement& g) {
  std::size_t overlap = 0;
  for (const auto& x : window) {
    if (window.contains(x - g)) ++overlap;
  }
  const std::size_t symmetric = 2 * (window.size() - overlap);
  return static_cast<double>(symmetric) / static_cast<double>(window.size());
}

FolnerWindow shift_window(const FolnerWindow& window, const GroupElement& g) {
  std::vector<GroupElement> shifted;
  shifted.reserve(window.size());
  for (const auto& x : window) shifted.push_back(x + g);
  return FolnerWindow(window.index(), std::move(shifted), WindowShape::custom);
}

MembershipSet MembershipSet::all() {
  return MembershipSet("all", [](const GroupElement&) { return true; });
}

MembershipSet MembershipSet::finite(std::vector<GroupElement> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return MembershipSet("finite", [m = std::move(members)](const GroupElement& g) {
    return std::binary_search(m.begin(), m.end(), g);
  });
}

MembershipSet MembershipSet::residue(std::int64_t modulus, std::vector<std::int64_t> residues) {
  if (modulus <= 0) throw InvalidArgument("residue set modulus must be positive");
  std::vector<bool> allowed(static_cast<std::size_t>(modulus), false);
  for (auto r : residues) allowed[static_cast<std::size_t>(floor_mod(r, modulus))] = true;
  return MembershipSet("residue mod " + std::to_string(modulus),
                       [modulus, allowed = std::move(allowed)](const GroupElement& g) {
                         for (auto x : g.coords()) {
                           if (!allowed[static_cast<std::size_t>(floor_mod(x, modulus))]) {
                             return false;
                           }
                         }
                         return true;
                       });
}

MembershipSet MembershipSet::progression(GroupElement start, GroupElement step) {
  if (start.rank() != step.rank()) throw InvalidArgument("progression rank mismatch");
  if (step.is_zero()) return finite({start});
  return MembershipSet("progression", [start = std::move(start),
                                       step = std::move(step)](const GroupElement& g) {
    if (g.rank() != start.rank()) return false;
    const GroupElement d = g - start;
    std::optional<std::int64_t> k;
    for (std::size_t i = 0; i < d.rank(); ++i) {
      if (step[i] == 0) {
        if (d[i] != 0) return false;
        continue;
      }
      if (d[i] % step[i] != 0) return false;
      const std::int64_t ki = d[i] / step[i];
      if (k && *k != ki) return false;
      k = ki;
    }
    return true;
  });
}

MembershipSet MembershipSet::squares() {
  return MembershipSet("squares", [](const GroupElement& g) {
    if (g.rank() != 1 || g[0] < 0) return false;
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(g[0]))));
    while (r * r > g[0]) --r;
    while ((r + 1) * (r + 1) <= g[0]) ++r;
    return r * r == g[0];
  });
}

MembershipSet MembershipSet::complement() const {
  return MembershipSet("not " + description_,
                       [p = predicate_](const GroupElement& g) { return !p(g); });
}

double window_density(const MembershipSet& set, const FolnerWindow& window) {
  std::size_t hits = 0;
  for (const auto& g : window) {
    if (set(g)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(window.size());
}

DensityReport lower_density(const MembershipSet& set, const WindowSchedule& windows,
                            std::optional<std::int64_t> tail_from) {
  if (windows.empty()) throw InvalidArgument("lower_density needs at least one window");
  DensityReport report;
  bool any_tail = false;
  double tail_min = 1.0;
  for (const auto& w : windows) {
    const double ratio = window_density(set, w);
    report.per_n_ratios.emplace_back(w.index(), ratio);
    if (!tail_from || w.index() >= *tail_from) {
      tail_min = std::min(tail_min, ratio);
      any_tail = true;
    }
  }
  if (!any_tail) throw InvalidArgument("lower_density: tail range selects no window");
  report.lower_density = tail_min;
  return report;
}

WitnessResult relative_density_witness(const MembershipSet& set, const FolnerWindow& scan,
                                       const std::vector<GroupElement>& candidates) {
  if (candidates.empty()) throw InvalidArgument("relative_density_witness: no candidates");
  WitnessResult result;
  result.candidates = candidates;
  for (const auto& g : scan) {
    const bool hit = std::any_of(candidates.begin(), candidates.end(),
                                 [&](const GroupElement& c) { return set(g + c); });
    if (!hit) {
      result.failing = g;
      return result;
    }
  }
  result.accepted = true;
  return result;
}

ShiftChoice best_shift_for_density(const FolnerWindow& window, const MembershipSet& set,
                                   const std::vector<GroupElement>& candidates) {
  if (candidates.empty()) throw InvalidArgument("best_shift_for_density: no candidates");
  ShiftChoice best;
  std::size_t best_hits = 0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    std::size_t hits = 0;
    for (const auto& g : window) {
      if (set(g + candidates[j])) ++hits;
    }
    if (j == 0 || hits > best_hits) {
      best_hits = hits;
      best.index = j;
    }
  }
  best.shift = candidates[best.index];
  best.ratio = static_cast<double>(best_hits) / static_cast<double>(window.size());
  return best;
}

}  // namespace ergodix
