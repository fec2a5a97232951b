#include "ergodix/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ergodix/mixing.hpp"

namespace ergodix {

namespace {

constexpr double kStructureTolerance = 1e-10;
constexpr double kSpanTolerance = 1e-9;

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Vector& v, Eigen::Index n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

// Frobenius-orthonormal span, grown one candidate at a time.
class Span {
 public:
  explicit Span(Eigen::Index n) : n_(n) {}

  bool add(const Matrix& m) {
    Vector v = vec(m);
    const double scale = v.norm();
    if (scale == 0.0) return false;
    // Two passes of Gram-Schmidt keep the basis orthonormal to round-off.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) v -= b.dot(v) * b;
    }
    if (v.norm() <= kSpanTolerance * scale) return false;
    basis_.push_back(v / v.norm());
    return true;
  }

  double distance(const Matrix& m) const {
    Vector v = vec(m);
    for (const auto& b : basis_) v -= b.dot(v) * b;
    return v.norm();
  }

  std::size_t size() const { return basis_.size(); }
  std::vector<Matrix> matrices() const {
    std::vector<Matrix> out;
    out.reserve(basis_.size());
    for (const auto& b : basis_) out.push_back(unvec(b, n_));
    return out;
  }

 private:
  Eigen::Index n_;
  std::vector<Vector> basis_;
};

std::size_t null_dimension(const std::vector<Matrix>& set, Eigen::Index n, Matrix* null_basis) {
  const Eigen::Index d = n * n;
  if (set.empty()) {
    if (null_basis) *null_basis = Matrix::Identity(d, d);
    return static_cast<std::size_t>(d);
  }
  Matrix stacked(static_cast<Eigen::Index>(set.size()) * d, d);
  const Matrix id = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < set.size(); ++i) {
    // vec(x s − s x) = (sᵀ ⊗ I − I ⊗ s) vec(x).
    stacked.middleRows(static_cast<Eigen::Index>(i) * d, d) =
        tensor(set[i].transpose(), id) - tensor(id, set[i]);
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  if (null_basis) *null_basis = svd.matrixV().rightCols(d - rank);
  return static_cast<std::size_t>(d - rank);
}

bool is_one(const std::vector<Complex>& character, double tol) {
  return std::all_of(character.begin(), character.end(),
                     [tol](Complex z) { return std::abs(z - 1.0) <= tol; });
}

}  // namespace

Vector GnsSpace::embed(const Matrix& a) const {
  if (a.rows() != n || a.cols() != n) throw InvalidArgument("GNS embed: dimension mismatch");
  return cholesky.adjoint() * vec(a);
}

Matrix GnsSpace::pull_back(const Vector& x) const {
  if (x.size() != dim()) throw InvalidArgument("GNS pull-back: dimension mismatch");
  const Vector v = cholesky.adjoint().triangularView<Eigen::Upper>().solve(x);
  return unvec(v, n);
}

GnsSpace gns_build(const FiniteSystem& sys) {
  GnsSpace gns;
  gns.n = sys.dim();
  const Matrix& rho = sys.state().density();
  // ω(a* b) = vec(a)* (ρᵀ ⊗ I) vec(b).
  gns.gram = tensor(rho.transpose(), Matrix::Identity(gns.n, gns.n));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gns.gram);
  gns.min_gram_eigenvalue = eig.eigenvalues()(0);
  if (gns.min_gram_eigenvalue <= 1e-10) {
    Matrix null = unvec(eig.eigenvectors().col(0), gns.n);
    throw NonFaithfulState("state is not faithful: ω(a*a) = " +
                               std::to_string(gns.min_gram_eigenvalue) + " for a nonzero a",
                           std::move(null));
  }
  Eigen::LLT<Matrix> llt(gns.gram);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of the Gram form failed");
  gns.cholesky = llt.matrixL();
  return gns;
}

KoopmanSplitting koopman_split(const FiniteSystem& sys, const GnsSpace& gns, double tolerance) {
  if (gns.n != sys.dim()) throw InvalidArgument("GNS space was built for another system");
  const Eigen::Index d = gns.dim();
  const Matrix upper = gns.cholesky.adjoint();
  const Matrix inv_upper = upper.triangularView<Eigen::Upper>().solve(Matrix::Identity(d, d));

  KoopmanSplitting split;
  for (const auto& w : sys.generators()) {
    // vec(W* a W) = (Wᵀ ⊗ W*) vec(a).
    split.koopman.push_back(upper * tensor(w.transpose(), w.adjoint()) * inv_upper);
  }
  const Matrix id = Matrix::Identity(d, d);
  for (std::size_t i = 0; i < split.koopman.size(); ++i) {
    const auto& k = split.koopman[i];
    split.unitarity_residual = std::max(split.unitarity_residual, (k.adjoint() * k - id).norm());
    for (std::size_t j = i + 1; j < split.koopman.size(); ++j) {
      const auto& l = split.koopman[j];
      split.commutator_residual = std::max(split.commutator_residual, (k * l - l * k).norm());
    }
  }
  if (split.unitarity_residual > kStructureTolerance) {
    throw NumericalError("Koopman map is not unitary on the GNS space (residual " +
                         std::to_string(split.unitarity_residual) + ")");
  }
  if (split.commutator_residual > kStructureTolerance) {
    throw NumericalError("Koopman maps do not commute (residual " +
                         std::to_string(split.commutator_residual) + ")");
  }

  std::vector<JointEigenspace> spaces{{{}, id}};
  for (const auto& k : split.koopman) {
    std::vector<JointEigenspace> refined;
    for (const auto& space : spaces) {
      const Matrix restricted = space.basis.adjoint() * k * space.basis;
      Eigen::ComplexSchur<Matrix> schur(restricted);
      const auto& t = schur.matrixT();
      const auto& z = schur.matrixU();
      std::vector<Complex> centers;
      std::vector<std::vector<Eigen::Index>> members;
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        const Complex lambda = t(i, i);
        std::size_t c = 0;
        while (c < centers.size() && std::abs(lambda - centers[c]) > tolerance) ++c;
        if (c == centers.size()) {
          centers.push_back(lambda);
          members.emplace_back();
        }
        members[c].push_back(i);
      }
      for (std::size_t c = 0; c < centers.size(); ++c) {
        Matrix cols(t.rows(), static_cast<Eigen::Index>(members[c].size()));
        Complex mean = 0.0;
        for (std::size_t m = 0; m < members[c].size(); ++m) {
          cols.col(static_cast<Eigen::Index>(m)) = z.col(members[c][m]);
          mean += t(members[c][m], members[c][m]);
        }
        mean /= static_cast<double>(members[c].size());
        JointEigenspace next;
        next.character = space.character;
        next.character.push_back(mean / std::abs(mean));
        next.basis = space.basis * cols;
        refined.push_back(std::move(next));
      }
    }
    spaces = std::move(refined);
  }
  if (split.koopman.empty()) spaces.front().character = {};

  for (const auto& space : spaces) {
    for (std::size_t j = 0; j < split.koopman.size(); ++j) {
      const Matrix r = split.koopman[j] * space.basis - space.character[j] * space.basis;
      split.eigen_residual = std::max(split.eigen_residual, r.norm());
    }
    const auto cols = static_cast<std::size_t>(space.basis.cols());
    split.dim_h0 += cols;
    if (is_one(space.character, tolerance)) split.dim_h1 += cols;
  }
  if (split.eigen_residual > 1e-8) {
    throw NumericalError("joint eigenspaces failed the residual check");
  }
  split.spaces = std::move(spaces);
  return split;
}

double CompactFactor::distance(const Matrix& a) const {
  Vector v = vec(a);
  for (const auto& b : basis) v -= vec(b).dot(v) * vec(b);
  return v.norm();
}

CompactFactor eigenoperator_factor(const FiniteSystem& sys, const GnsSpace& gns,
                                   const KoopmanSplitting& split) {
  const Eigen::Index n = sys.dim();
  CompactFactor factor;
  for (const auto& space : split.spaces) {
    for (Eigen::Index c = 0; c < space.basis.cols(); ++c) {
      factor.eigenoperators.push_back(gns.pull_back(space.basis.col(c)));
      factor.characters.push_back(space.character);
    }
  }
  Span span(n);
  span.add(Matrix::Identity(n, n));
  for (const auto& e : factor.eigenoperators) {
    span.add(e);
    span.add(e.adjoint());
  }
  const auto limit = static_cast<std::size_t>(n * n);
  while (true) {
    if (factor.rounds > limit) throw NumericalError("generated algebra did not stabilize");
    ++factor.rounds;
    const auto current = span.matrices();
    const std::size_t before = span.size();
    for (const auto& x : current) {
      for (const auto& y : current) span.add(x * y);
    }
    if (span.size() == before) break;
  }
  factor.basis = span.matrices();
  return factor;
}

std::size_t eigenoperator_rank(const CompactFactor& factor) {
  if (factor.eigenoperators.empty()) return 0;
  const Eigen::Index n = factor.eigenoperators.front().rows();
  Span span(n);
  for (const auto& e : factor.eigenoperators) span.add(e);
  return span.size();
}

CommutantDims commutant_dims(const std::vector<Matrix>& basis, Eigen::Index n) {
  CommutantDims out;
  Matrix null;
  out.commutant = null_dimension(basis, n, &null);
  std::vector<Matrix> commutant;
  for (Eigen::Index c = 0; c < null.cols(); ++c) commutant.push_back(unvec(null.col(c), n));
  out.double_commutant = null_dimension(commutant, n, nullptr);
  return out;
}

double factor_invariance_residual(const FiniteSystem& sys, const CompactFactor& factor) {
  double worst = 0.0;
  for (std::size_t j = 0; j < sys.rank(); ++j) {
    const auto g = GroupElement::unit(sys.rank(), j);
    for (const auto& b : factor.basis) {
      worst = std::max(worst, factor.distance(sys.act(b, g)));
      worst = std::max(worst, factor.distance(sys.act(b, -g)));
    }
  }
  return worst;
}

std::string to_string(DichotomyKind k) {
  switch (k) {
    case DichotomyKind::not_ergodic:
      return "not-ergodic";
    case DichotomyKind::weakly_mixing:
      return "weakly-mixing";
    case DichotomyKind::compact_factor:
      return "has-nontrivial-compact-factor";
  }
  return "unknown";
}

DichotomyVerdict dichotomy_classify(const FiniteSystem& sys) {
  const GnsSpace gns = gns_build(sys);
  const KoopmanSplitting split = koopman_split(sys, gns);
  DichotomyVerdict v;
  v.dim_h1 = split.dim_h1;
  v.dim_h0 = split.dim_h0;
  v.ergodic = split.dim_h1 == 1;
  v.trivial = sys.dim() == 1;
  if (!v.ergodic) {
    v.kind = DichotomyKind::not_ergodic;
    v.label = "not ergodic; dichotomy not applicable";
    return v;
  }
  const CompactFactor factor = eigenoperator_factor(sys, gns, split);
  v.factor_dim = factor.dimension();
  if (split.dim_h0 == 1) {
    v.kind = DichotomyKind::weakly_mixing;
    v.label = v.trivial ? "weakly mixing (trivial system)" : "weakly mixing";
  } else {
    v.kind = DichotomyKind::compact_factor;
    v.label = "has nontrivial compact factor of dimension " + std::to_string(v.factor_dim);
  }
  return v;
}

SzemerediDriverReport szemeredi_driver(const System& sys, const Observable& a,
                                       const std::vector<std::int64_t>& exponents,
                                       const WindowSchedule& windows) {
  sys.check(a);
  if (sys.min_eigenvalue(a) < -1e-10) throw InvalidArgument("observable is not positive");
  const double wa = sys.state(a).real();
  if (!(wa > 0.0)) throw InvalidArgument("observable needs ω(a) > 0");
  if (exponents.empty()) throw InvalidArgument("need exponents m_1 < ... < m_k");
  if (windows.empty()) throw InvalidArgument("need at least one window");

  SzemerediDriverReport report;
  report.reference = std::pow(wa, static_cast<double>(exponents.size() + 1));

  if (sys.is_finite()) {
    const auto& fin = sys.finite();
    const DichotomyVerdict verdict = dichotomy_classify(fin);
    report.ergodic = verdict.ergodic;
    report.dim_h1 = verdict.dim_h1;
    report.dim_h0 = verdict.dim_h0;
    report.factor_dim = verdict.factor_dim;
    if (!verdict.ergodic) throw InvalidArgument("the driver needs an ergodic finite system");
    if (verdict.kind != DichotomyKind::compact_factor) {
      throw InvalidArgument("finite system without a nontrivial compact factor");
    }
    const GnsSpace gns = gns_build(fin);
    const CompactFactor factor = eigenoperator_factor(fin, gns, koopman_split(fin, gns));
    if (factor.distance(std::get<Matrix>(a)) > 1e-9 * std::max(1.0, std::get<Matrix>(a).norm())) {
      throw InvalidArgument("observable does not lie in the compact factor");
    }
    report.branch = "compact";
    report.compact = szemeredi_average_compact(sys, a, exponents, windows);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& w = report.compact->per_window[i];
      report.per_window.push_back({w.n, windows[i].size(), w.average, 0.0, 0.0});
    }
    report.tail_min = report.compact->tail_min;
    return report;
  }

  report.branch = "weakly-mixing";
  report.ergodic = true;
  HigherOrderSpec spec;
  spec.observables.assign(exponents.size() + 1, a);
  for (auto m : exponents) spec.homs.push_back(Homomorphism::scalar(sys.rank(), m));
  spec.validate(sys);
  for (const auto& w : windows) {
    report.boundary_constant =
        std::max(report.boundary_constant, collision_bound(sys, spec, w).constant);
  }
  std::vector<std::int64_t> with_zero{0};
  with_zero.insert(with_zero.end(), exponents.begin(), exponents.end());
  const auto means = window_means(windows, [&](const GroupElement& g) {
    std::vector<Placed> placed;
    placed.reserve(with_zero.size());
    for (auto m : with_zero) placed.push_back({a, g * m});
    return std::abs(sys.evaluate(placed));
  });
  report.tail_min = std::numeric_limits<double>::infinity();
  const std::size_t tail = std::max<std::size_t>(1, windows.size() / 4);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    SzemerediDriverReport::Point p;
    p.n = windows[i].index();
    p.window_size = windows[i].size();
    p.average = means[i];
    p.deviation = std::abs(means[i] - report.reference);
    p.bound = report.boundary_constant / static_cast<double>(p.window_size);
    if (p.deviation > p.bound * (1.0 + 1e-12) + 1e-15) report.bound_holds = false;
    if (i >= windows.size() - tail) report.tail_min = std::min(report.tail_min, p.average);
    report.per_window.push_back(p);
  }
  return report;
}

}  // namespace ergodix
