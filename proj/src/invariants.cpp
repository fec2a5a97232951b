#include "ergodix/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ergodix/error.hpp"
#include "ergodix/spectral.hpp"
#include "ergodix/vdc.hpp"

namespace ergodix {

namespace {

constexpr double kSlack = 1e-9;
constexpr double kExact = 1e-10;

struct Tally {
  SuiteResult r;

  explicit Tally(std::string name, std::size_t trials) {
    r.name = std::move(name);
    r.trials = trials;
  }
  void record(bool ok, double margin, const std::string& what) {
    r.worst = std::max(r.worst, margin);
    if (!ok) {
      if (r.failures == 0) r.first_failure = what;
      ++r.failures;
    }
  }
};

// f on [−16, 16] from a random table; out-of-range points are an error.
VectorSequence table_sequence(Rng& rng, std::size_t dim) {
  std::vector<Vector> table;
  double bound = 0.0;
  for (int i = 0; i < 33; ++i) {
    table.push_back(random_vector(rng, static_cast<Eigen::Index>(dim)));
    bound = std::max(bound, table.back().norm());
  }
  return VectorSequence(dim, bound, [table](const GroupElement& g) {
    const auto i = g[0] + 16;
    if (i < 0 || i >= 33) throw InvalidArgument("table sequence queried outside [-16, 16]");
    return table[static_cast<std::size_t>(i)];
  });
}

std::size_t random_dim(Rng& rng) { return static_cast<std::size_t>(random_int(rng, 1, 8)); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

GroupElement random_element(Rng& rng, std::size_t q, std::int64_t r) {
  std::vector<std::int64_t> c(q);
  for (auto& x : c) x = random_int(rng, -r, r);
  return GroupElement(std::move(c));
}

FiniteSystem random_system(Rng& rng, bool force_tracial = false) {
  const auto n = random_int(rng, 2, 4);
  const auto q = static_cast<std::size_t>(random_int(rng, 1, 2));
  const bool tracial = force_tracial || random_int(rng, 0, 1) == 1;
  return random_finite_system(rng, n, q, tracial);
}

}  // namespace

SuiteResult suite_norm_square(Rng& rng, std::size_t trials) {
  Tally t("norm_square", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto f = table_sequence(rng, random_dim(rng));
    const auto w = box_window(1, random_int(rng, 1, 8));
    const auto c = check_norm_square_bound(f, w);
    t.record(c.holds, (c.lhs - c.rhs) / std::max(1.0, c.rhs),
             "trial " + std::to_string(i) + ": lhs " + std::to_string(c.lhs) + " > rhs " +
                 std::to_string(c.rhs));
  }
  return t.r;
}

SuiteResult suite_double_average(Rng& rng, std::size_t trials) {
  Tally t("double_average", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto f = table_sequence(rng, random_dim(rng));
    const auto inner = box_window(1, random_int(rng, 1, 8));
    const auto outer = box_window(1, random_int(rng, 1, 8));
    const auto c = check_double_average_bound(f, inner, outer);
    t.record(c.holds, (c.lhs - c.rhs) / std::max(1.0, std::abs(c.rhs)),
             "trial " + std::to_string(i) + ": lhs " + std::to_string(c.lhs) + " > rhs " +
                 std::to_string(c.rhs));
  }
  return t.r;
}

SuiteResult suite_difference_set(Rng& rng, std::size_t trials) {
  Tally t("difference_set", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    std::vector<double> table(33);
    for (auto& x : table) x = std::abs(random_uniform(rng, -1.0, 1.0));
    std::vector<GroupElement> members;
    for (std::int64_t g = -8; g <= 8; ++g) {
      if (random_int(rng, 0, 1) == 1) members.push_back(GroupElement{g});
    }
    if (members.empty()) members.push_back(GroupElement{random_int(rng, -8, 8)});
    const FolnerWindow w(0, members);
    const auto gamma = [&table](const GroupElement& h) {
      return table[static_cast<std::size_t>(h[0] + 16)];
    };
    const auto c = check_difference_set_bound(gamma, w);
    t.record(c.holds, (c.lhs - c.rhs) / std::max(1.0, c.rhs),
             "trial " + std::to_string(i) + ": lhs " + std::to_string(c.lhs) + " > rhs " +
                 std::to_string(c.rhs));
  }
  return t.r;
}

SuiteResult suite_product_system(Rng& rng, std::size_t trials) {
  Tally t("product_system", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng);
    const System sys(fin);
    const System prod(product_system(fin));
    const Observable a = random_matrix(rng, fin.dim(), fin.dim());
    const Observable b = random_matrix(rng, fin.dim(), fin.dim());
    const Observable aa = tensor(std::get<Matrix>(a), conjugate_lift(std::get<Matrix>(a)));
    const Observable bb = tensor(std::get<Matrix>(b), conjugate_lift(std::get<Matrix>(b)));
    const GroupElement g = random_element(rng, fin.rank(), 6);
    const GroupElement zero = GroupElement::zero(fin.rank());
    const std::array<Placed, 2> lhs{Placed{aa, zero}, Placed{bb, g}};
    const std::array<Placed, 2> rhs{Placed{a, zero}, Placed{b, g}};
    const Complex integrand = prod.evaluate(lhs);
    const double expected = std::norm(sys.evaluate(rhs));
    const double err = std::abs(integrand - expected) / std::max(1.0, expected);
    t.record(err <= kExact, err, "trial " + std::to_string(i) + ": residual " + std::to_string(err));
  }
  return t.r;
}

SuiteResult suite_automorphism(Rng& rng, std::size_t trials) {
  Tally t("automorphism", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng);
    const auto n = fin.dim();
    const Matrix a = random_matrix(rng, n, n);
    const Matrix b = random_matrix(rng, n, n);
    const GroupElement g = random_element(rng, fin.rank(), 6);
    const GroupElement h = random_element(rng, fin.rank(), 6);
    const double scale = std::max(1.0, a.norm() * b.norm());
    double err = (fin.act(a * b, g) - fin.act(a, g) * fin.act(b, g)).norm() / scale;
    err = std::max(err, (fin.act(a.adjoint(), g) - fin.act(a, g).adjoint()).norm() / a.norm());
    err = std::max(err, (fin.act(fin.act(a, h), g) - fin.act(a, g + h)).norm() / a.norm());
    t.record(err <= kExact, err, "trial " + std::to_string(i) + ": residual " + std::to_string(err));
  }
  return t.r;
}

SuiteResult suite_cauchy_schwarz(Rng& rng, std::size_t trials) {
  Tally t("cauchy_schwarz", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng);
    const auto n = fin.dim();
    const Matrix a = random_matrix(rng, n, n);
    const Matrix b = random_matrix(rng, n, n);
    const double lhs = std::abs(fin.state()(a.adjoint() * b));
    const double rhs = omega_norm(fin.state(), a) * omega_norm(fin.state(), b);
    t.record(lhs <= rhs * (1.0 + kSlack), (lhs - rhs) / std::max(1.0, rhs),
             "trial " + std::to_string(i));
  }
  return t.r;
}

SuiteResult suite_return_chain(Rng& rng, std::size_t trials) {
  Tally t("return_chain", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng);
    const auto n = fin.dim();
    const Matrix a = random_matrix(rng, n, n);
    const GroupElement g = random_element(rng, fin.rank(), 4);
    const double base = omega_norm(fin.state(), fin.act(a, g) - a);
    for (std::int64_t m = 1; m <= 6; ++m) {
      const double d = omega_norm(fin.state(), fin.act(a, g * m) - a);
      const double rhs = static_cast<double>(m) * base;
      t.record(d <= rhs * (1.0 + kSlack) + 1e-12, (d - rhs) / std::max(1.0, rhs),
               "trial " + std::to_string(i) + ", m = " + std::to_string(m));
    }
  }
  return t.r;
}

SuiteResult suite_perturbation(Rng& rng, std::size_t trials) {
  Tally t("perturbation", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng, true);
    const auto n = fin.dim();
    const auto k = static_cast<std::size_t>(random_int(rng, 1, 3)) + 1;
    std::vector<Matrix> c;
    std::vector<Matrix> d;
    double budget = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      c.push_back(random_unitary(rng, n));
      // A nearby unitary: c_j exp(i s H) with H Hermitian of unit norm.
      Eigen::SelfAdjointEigenSolver<Matrix> eig(random_hermitian(rng, n));
      const double s = random_uniform(rng, 0.0, 0.2) / eig.eigenvalues().cwiseAbs().maxCoeff();
      Vector phases(n);
      for (Eigen::Index x = 0; x < n; ++x) phases(x) = std::polar(1.0, s * eig.eigenvalues()(x));
      d.push_back(c.back() * eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint());
      budget += omega_norm(fin.state(), c.back() - d.back());
    }
    const Matrix diff = ordered_product(c) - ordered_product(d);
    const double oracle = (telescope_decompose(c, d) - diff).norm();
    const double change = std::abs(fin.state()(diff));
    const bool ok = oracle <= kExact && change <= budget * (1.0 + kSlack) + 1e-12;
    t.record(ok, std::max(oracle, change - budget), "trial " + std::to_string(i));
  }
  return t.r;
}

SuiteResult suite_koopman_unitarity(Rng& rng, std::size_t trials) {
  Tally t("koopman_unitarity", trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteSystem fin = random_system(rng);
    const GnsSpace gns = gns_build(fin);
    const KoopmanSplitting split = koopman_split(fin, gns);
    const Vector omega = gns.omega();
    double err = 0.0;
    for (const auto& k : split.koopman) {
      const Vector x = random_vector(rng, gns.dim());
      const Vector y = random_vector(rng, gns.dim());
      err = std::max(err, std::abs((k * x).dot(k * y) - x.dot(y)) / (x.norm() * y.norm()));
      err = std::max(err, (k * omega - omega).norm());
    }
    // ⟨ι(a), ι(a)⟩ = ‖a‖_ω².
    const Matrix a = random_matrix(rng, fin.dim(), fin.dim());
    const double na = omega_norm(fin.state(), a);
    err = std::max(err, std::abs(gns.embed(a).squaredNorm() - na * na) / std::max(1.0, na * na));
    t.record(err <= kExact, err, "trial " + std::to_string(i) + ": residual " + std::to_string(err));
  }
  return t.r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "norm_square",  "double_average", "difference_set", "product_system",   "automorphism",
      "cauchy_schwarz", "return_chain", "perturbation",   "koopman_unitarity"};
  return names;
}

std::vector<SuiteResult> run_invariant_suites(std::uint64_t seed,
                                              const std::map<std::string, std::size_t>& trials) {
  using Suite = SuiteResult (*)(Rng&, std::size_t);
  const std::vector<std::pair<std::string, Suite>> suites{
      {"norm_square", suite_norm_square},
      {"double_average", suite_double_average},
      {"difference_set", suite_difference_set},
      {"product_system", suite_product_system},
      {"automorphism", suite_automorphism},
      {"cauchy_schwarz", suite_cauchy_schwarz},
      {"return_chain", suite_return_chain},
      {"perturbation", suite_perturbation},
      {"koopman_unitarity", suite_koopman_unitarity}};
  for (const auto& [name, count] : trials) {
    if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
      throw InvalidArgument("unknown invariant suite '" + name + "'");
    }
    (void)count;
  }
  std::vector<SuiteResult> out;
  for (const auto& [name, fn] : suites) {
    std::size_t n = (name == "norm_square" || name == "double_average" || name == "difference_set")
                        ? 1000
                        : 100;
    if (auto it = trials.find(name); it != trials.end()) n = it->second;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(fnv1a(name)),
                      static_cast<std::uint32_t>(fnv1a(name) >> 32)};
    Rng rng(seq);
    out.push_back(fn(rng, n));
  }
  return out;
}

}  // namespace ergodix
