#include "ergodix/vdc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ergodix/error.hpp"
#include "ergodix/parallel.hpp"

namespace ergodix {

namespace {

constexpr double kRelativeSlack = 1e-9;

// Values of f on a box [lo, hi] of Z^q, addressed in O(q).
class DenseField {
 public:
  DenseField(const VectorSequence& f, const std::vector<GroupElement>& points) {
    const std::size_t q = points.front().rank();
    lo_ = points.front().coords();
    hi_ = lo_;
    for (const auto& p : points) {
      for (std::size_t i = 0; i < q; ++i) {
        lo_[i] = std::min(lo_[i], p[i]);
        hi_[i] = std::max(hi_[i], p[i]);
      }
    }
    fill(f);
  }

  DenseField(const VectorSequence& f, std::vector<std::int64_t> lo, std::vector<std::int64_t> hi)
      : lo_(std::move(lo)), hi_(std::move(hi)) {
    fill(f);
  }

  const Vector& operator[](const GroupElement& g) const { return values_[index_of(g)]; }
  const Vector& at(std::size_t idx) const { return values_[idx]; }

  std::size_t index_of(const GroupElement& g) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (g[i] < lo_[i] || g[i] > hi_[i]) throw InvalidArgument("point outside sampled field");
      idx = idx * span(i) + static_cast<std::size_t>(g[i] - lo_[i]);
    }
    return idx;
  }

  /// index_of(g + h) − index_of(g), valid whenever both points lie in the box.
  std::ptrdiff_t offset_of(const GroupElement& h) const {
    std::ptrdiff_t off = 0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      off = off * static_cast<std::ptrdiff_t>(span(i)) + static_cast<std::ptrdiff_t>(h[i]);
    }
    return off;
  }

 private:
  std::size_t span(std::size_t i) const { return static_cast<std::size_t>(hi_[i] - lo_[i] + 1); }

  void fill(const VectorSequence& f) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) total *= span(i);
    values_ = parallel_map(total, [&](std::size_t idx) { return f(point_of(idx)); });
  }

  GroupElement point_of(std::size_t idx) const {
    std::vector<std::int64_t> c(lo_.size());
    for (std::size_t i = lo_.size(); i-- > 0;) {
      c[i] = lo_[i] + static_cast<std::int64_t>(idx % span(i));
      idx /= span(i);
    }
    return GroupElement(std::move(c));
  }

  std::vector<std::int64_t> lo_;
  std::vector<std::int64_t> hi_;
  std::vector<Vector> values_;
};

// Componentwise bounding box of a point set.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> bounds(
    const std::vector<GroupElement>& points) {
  std::vector<std::int64_t> lo = points.front().coords(), hi = lo;
  for (const auto& p : points) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  return {lo, hi};
}

std::vector<GroupElement> minkowski(const FolnerWindow& a, const FolnerWindow& b) {
  std::set<GroupElement> s;
  for (const auto& x : a) {
    for (const auto& y : b) s.insert(x + y);
  }
  return {s.begin(), s.end()};
}

// Vector sum in index order, compensated per component.
Vector ordered_vector_sum(const std::vector<Vector>& terms, std::size_t dim) {
  Vector out(static_cast<Eigen::Index>(dim));
  std::vector<Complex> column(terms.size());
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < terms.size(); ++i) column[i] = terms[i](static_cast<Eigen::Index>(c));
    out(static_cast<Eigen::Index>(c)) = ordered_sum(std::span<const Complex>(column));
  }
  return out;
}

double coord_sum(const GroupElement& g) {
  double s = 0.0;
  for (auto x : g.coords()) s += static_cast<double>(x);
  return s;
}

// e^{2πi t}, reducing t mod 1 before the trigonometric call.
Complex unit_phase(double t) {
  const double frac = t - std::floor(t);
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

}  // namespace

VectorSequence::VectorSequence(std::size_t dim, double bound, Map map, std::string label)
    : dim_(dim), bound_(bound), map_(std::move(map)), label_(std::move(label)) {
  if (dim_ == 0) throw InvalidArgument("vector sequences need dimension >= 1");
  if (!(bound_ >= 0.0)) throw InvalidArgument("declared bound must be nonnegative");
}

Vector VectorSequence::operator()(const GroupElement& g) const {
  Vector v = map_(g);
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw InvalidArgument("sequence returned a vector of the wrong dimension");
  }
  if (v.norm() > bound_ * (1.0 + 1e-12) + 1e-15) {
    throw InvalidArgument("sequence value at " + g.to_string() + " exceeds the declared bound");
  }
  return v;
}

VectorSequence constant_sequence(Vector v) {
  const double b = v.norm();
  const auto d = static_cast<std::size_t>(v.size());
  return VectorSequence(d, b, [v = std::move(v)](const GroupElement&) { return v; }, "constant");
}

VectorSequence alternating_sequence(Vector v) {
  const double b = v.norm();
  const auto d = static_cast<std::size_t>(v.size());
  return VectorSequence(
      d, b,
      [v = std::move(v)](const GroupElement& g) {
        std::int64_t s = 0;
        for (auto x : g.coords()) s += x;
        return Vector(s % 2 == 0 ? v : Vector(-v));
      },
      "alternating");
}

VectorSequence linear_phase_sequence(double alpha, Vector v) {
  const double b = v.norm();
  const auto d = static_cast<std::size_t>(v.size());
  return VectorSequence(
      d, b,
      [alpha, v = std::move(v)](const GroupElement& g) {
        return Vector(unit_phase(alpha * coord_sum(g)) * v);
      },
      "linear_phase");
}

VectorSequence weyl_quadratic_sequence(double alpha, Vector v) {
  const double b = v.norm();
  const auto d = static_cast<std::size_t>(v.size());
  return VectorSequence(
      d, b,
      [alpha, v = std::move(v)](const GroupElement& g) {
        double t = 0.0;
        for (auto x : g.coords()) {
          // α x² mod 1 without forming the large product directly.
          const double xd = static_cast<double>(x);
          const double ax = alpha * xd;
          t += (ax - std::floor(ax)) * xd;
          t -= std::floor(t);
        }
        return Vector(unit_phase(t) * v);
      },
      "weyl_quadratic");
}

Vector average_vector(const VectorSequence& f, const FolnerWindow& window) {
  std::vector<Vector> terms;
  terms.reserve(window.size());
  for (const auto& g : window) terms.push_back(f(g));
  return ordered_vector_sum(terms, f.dim()) / static_cast<double>(window.size());
}

InequalityCheck check_norm_square_bound(const VectorSequence& f, const FolnerWindow& window) {
  std::vector<Vector> terms;
  std::vector<double> sq;
  terms.reserve(window.size());
  for (const auto& g : window) {
    terms.push_back(f(g));
    sq.push_back(terms.back().squaredNorm());
  }
  InequalityCheck out;
  out.lhs = ordered_vector_sum(terms, f.dim()).squaredNorm();
  out.rhs = static_cast<double>(window.size()) * ordered_sum(std::span<const double>(sq));
  out.holds = out.lhs <= out.rhs + kRelativeSlack * out.rhs;
  return out;
}

InequalityCheck check_double_average_bound(const VectorSequence& f, const FolnerWindow& inner,
                                           const FolnerWindow& outer) {
  const DenseField field(f, minkowski(outer, inner));
  std::vector<Vector> terms;
  terms.reserve(inner.size() * outer.size());
  for (const auto& g : outer) {
    for (const auto& h : inner) terms.push_back(field[g + h]);
  }
  InequalityCheck out;
  out.lhs = ordered_vector_sum(terms, f.dim()).squaredNorm();

  std::vector<Complex> triple;
  triple.reserve(inner.size() * inner.size() * outer.size());
  for (const auto& h1 : inner) {
    for (const auto& h2 : inner) {
      for (const auto& g : outer) triple.push_back(field[g + h1].dot(field[g + h2]));
    }
  }
  const Complex rhs =
      static_cast<double>(outer.size()) * ordered_sum(std::span<const Complex>(triple));
  if (std::abs(rhs.imag()) > kRelativeSlack * std::max(1.0, std::abs(rhs.real()))) {
    throw NumericalError("double-average bound: imaginary residue " +
                         std::to_string(rhs.imag()) + " in a sum of squared norms");
  }
  out.rhs = rhs.real();
  out.holds = out.lhs <= out.rhs + kRelativeSlack * std::abs(out.rhs);
  return out;
}

InequalityCheck check_difference_set_bound(const std::function<double(const GroupElement&)>& gamma,
                                           const FolnerWindow& window) {
  std::vector<double> pairs;
  pairs.reserve(window.size() * window.size());
  for (const auto& h1 : window) {
    for (const auto& h2 : window) {
      const double v = gamma(h2 - h1);
      if (v < 0.0) throw InvalidArgument("difference-set bound needs a nonnegative function");
      pairs.push_back(v);
    }
  }
  std::vector<double> singles;
  for (const auto& h : inverse_product(window)) singles.push_back(gamma(h));
  InequalityCheck out;
  out.lhs = ordered_sum(std::span<const double>(pairs));
  out.rhs = static_cast<double>(window.size()) * ordered_sum(std::span<const double>(singles));
  out.holds = out.lhs <= out.rhs + kRelativeSlack * out.rhs;
  return out;
}

AveragingGap averaging_gap(const VectorSequence& f, const FolnerWindow& outer,
                           const FolnerWindow& inner) {
  const DenseField field(f, minkowski(outer, inner));
  std::vector<Vector> direct;
  for (const auto& g : outer) direct.push_back(field[g]);
  std::vector<Vector> smoothed;
  smoothed.reserve(outer.size() * inner.size());
  for (const auto& g : outer) {
    for (const auto& h : inner) smoothed.push_back(field[g + h]);
  }
  const double m = static_cast<double>(outer.size());
  const double n = static_cast<double>(inner.size());
  const Vector a = ordered_vector_sum(direct, f.dim()) / m;
  const Vector b = ordered_vector_sum(smoothed, f.dim()) / (m * n);
  double worst = 0.0;
  for (const auto& h : inner) worst = std::max(worst, folner_defect(outer, h));
  AveragingGap out;
  out.gap = (a - b).norm();
  out.bound = f.bound() * worst;
  out.holds = out.gap <= out.bound * (1.0 + kRelativeSlack) + 1e-12;
  return out;
}

VdcReport van_der_corput_report(const VectorSequence& f, const WindowSchedule& windows,
                                double tolerance) {
  if (windows.empty()) throw InvalidArgument("van der Corput report needs windows");
  const auto largest = std::max_element(
      windows.begin(), windows.end(),
      [](const FolnerWindow& a, const FolnerWindow& b) { return a.size() < b.size(); });

  std::set<GroupElement> h_set;
  for (const auto& w : windows) {
    const auto d = inverse_product(w);
    h_set.insert(d.begin(), d.end());
  }
  const std::vector<GroupElement> hs(h_set.begin(), h_set.end());
  const FolnerWindow h_window(0, hs);

  // f is needed on every window and on largest + hs; both fit in one box.
  const std::size_t q = largest->rank();
  auto [lo, hi] = bounds(largest->elements());
  const auto [hlo, hhi] = bounds(hs);
  for (std::size_t i = 0; i < q; ++i) {
    lo[i] += std::min<std::int64_t>(hlo[i], 0);
    hi[i] += std::max<std::int64_t>(hhi[i], 0);
  }
  for (const auto& w : windows) {
    const auto [wlo, whi] = bounds(w.elements());
    for (std::size_t i = 0; i < q; ++i) {
      lo[i] = std::min(lo[i], wlo[i]);
      hi[i] = std::max(hi[i], whi[i]);
    }
  }
  const DenseField field(f, lo, hi);

  VdcReport report;
  report.tolerance = tolerance;
  report.gamma_window = largest->index();
  std::vector<std::size_t> base;
  base.reserve(largest->size());
  for (const auto& g : *largest) base.push_back(field.index_of(g));
  const auto gammas = parallel_map(hs.size(), [&](std::size_t i) {
    const std::ptrdiff_t off = field.offset_of(hs[i]);
    std::vector<Complex> terms;
    terms.reserve(base.size());
    for (auto idx : base) {
      terms.push_back(field.at(idx).dot(field.at(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + off))));
    }
    return ordered_sum(std::span<const Complex>(terms)) / static_cast<double>(largest->size());
  });
  for (std::size_t i = 0; i < hs.size(); ++i) report.gamma.push_back({hs[i], gammas[i]});
  auto gamma_at = [&](const GroupElement& h) {
    return gammas[static_cast<std::size_t>(std::lower_bound(hs.begin(), hs.end(), h) - hs.begin())];
  };

  for (const auto& w : windows) {
    const auto diff = inverse_product(w);
    std::vector<double> mags;
    mags.reserve(diff.size());
    for (const auto& h : diff) mags.push_back(std::abs(gamma_at(h)));
    const double size = static_cast<double>(w.size());
    report.difference_set_statistic.push_back(
        {w.index(), ordered_sum(std::span<const double>(mags)) / size});

    // Σ_{h1,h2∈Λ} γ(h2−h1) = Σ_h γ(h) · |Λ ∩ (Λ − h)|.
    std::vector<Complex> weighted;
    weighted.reserve(diff.size());
    for (const auto& h : diff) {
      double overlap = 0.0;
      if (w.shape() == WindowShape::box) {
        overlap = 1.0;
        for (auto x : h.coords()) overlap *= static_cast<double>(2 * w.index() + 1 - std::llabs(x));
      } else {
        for (const auto& x : w) {
          if (w.contains(x + h)) overlap += 1.0;
        }
      }
      weighted.push_back(overlap * gamma_at(h));
    }
    report.double_average.push_back(
        {w.index(), std::abs(ordered_sum(std::span<const Complex>(weighted))) / (size * size)});

    std::vector<Vector> terms;
    terms.reserve(w.size());
    for (const auto& g : w) terms.push_back(field[g]);
    report.averages.push_back({w.index(), (ordered_vector_sum(terms, f.dim()) / size).norm()});
  }

  report.hypothesis_satisfied = report.difference_set_statistic.back().value < tolerance;
  report.averages_vanish = report.averages.back().value < tolerance;
  if (report.hypothesis_satisfied) {
    report.label = report.averages_vanish ? "hypothesis satisfied; averages vanish"
                                          : "hypothesis satisfied; averages do not vanish";
  } else {
    report.label = "hypothesis not satisfied; conclusion not implied";
  }
  return report;
}

}  // namespace ergodix
