#include "ergodix/systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "ergodix/error.hpp"

namespace ergodix {

namespace {

constexpr double kSystemTolerance = 1e-10;
constexpr double kIdentityLegTolerance = 1e-12;
// Contraction windows whose Hilbert space exceeds this dimension are refused.
constexpr std::size_t kMaxContractionDim = 1U << 14;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix matrix_power(const Matrix& u, std::int64_t e) {
  Matrix base = e < 0 ? Matrix(u.adjoint()) : u;
  auto k = static_cast<std::uint64_t>(e < 0 ? -e : e);
  Matrix acc = Matrix::Identity(u.rows(), u.cols());
  while (k > 0) {
    if (k & 1U) acc = acc * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return acc;
}

// Tensor with legs reordered: new leg k is old leg perm[k].
Matrix permute_legs(const Matrix& t, std::size_t d, const std::vector<std::size_t>& perm) {
  const std::size_t s = perm.size();
  const std::size_t dim = ipow(d, s);
  std::vector<Eigen::Index> old_index(dim);
  std::vector<std::size_t> digits(s);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t x = r;
    for (std::size_t k = s; k-- > 0;) {
      digits[k] = x % d;
      x /= d;
    }
    std::size_t old = 0;
    std::vector<std::size_t> old_digits(s);
    for (std::size_t k = 0; k < s; ++k) old_digits[perm[k]] = digits[k];
    for (std::size_t k = 0; k < s; ++k) old = old * d + old_digits[k];
    old_index[r] = static_cast<Eigen::Index>(old);
  }
  Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          t(old_index[r], old_index[c]);
    }
  }
  return out;
}

// Index with digit x inserted at leg i of an (s+1)-leg register.
std::size_t insert_digit(std::size_t r, std::size_t d, std::size_t s_after, std::size_t i,
                         std::size_t x) {
  const std::size_t low_span = ipow(d, s_after - 1 - i);
  const std::size_t high = r / low_span;
  const std::size_t low = r % low_span;
  return (high * d + x) * low_span + low;
}

// tr_i(t) / d for a tensor with s legs.
Matrix reduced_leg(const Matrix& t, std::size_t d, std::size_t s, std::size_t i) {
  const std::size_t dim = ipow(d, s - 1);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      Complex acc = 0.0;
      for (std::size_t x = 0; x < d; ++x) {
        acc += t(static_cast<Eigen::Index>(insert_digit(r, d, s, i, x)),
                 static_cast<Eigen::Index>(insert_digit(c, d, s, i, x)));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          acc / static_cast<double>(d);
    }
  }
  return out;
}

// r ⊗ 1 with the identity at leg i of the resulting s-leg tensor.
Matrix pad_leg(const Matrix& r, std::size_t d, std::size_t s, std::size_t i) {
  const std::size_t dim = ipow(d, s);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::size_t small = ipow(d, s - 1);
  for (std::size_t a = 0; a < small; ++a) {
    for (std::size_t b = 0; b < small; ++b) {
      const Complex v = r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (v == Complex(0.0, 0.0)) continue;
      for (std::size_t x = 0; x < d; ++x) {
        out(static_cast<Eigen::Index>(insert_digit(a, d, s, i, x)),
            static_cast<Eigen::Index>(insert_digit(b, d, s, i, x))) = v;
      }
    }
  }
  return out;
}

// Positions of `support` inside the sorted `window`.
std::vector<std::size_t> positions_in(const std::vector<GroupElement>& support,
                                      const std::vector<GroupElement>& window) {
  std::vector<std::size_t> pos;
  pos.reserve(support.size());
  for (const auto& s : support) {
    auto it = std::lower_bound(window.begin(), window.end(), s);
    if (it == window.end() || *it != s) {
      throw InvalidArgument("embedding window does not contain support site " + s.to_string());
    }
    pos.push_back(static_cast<std::size_t>(it - window.begin()));
  }
  return pos;
}

struct LocalPlacement {
  std::vector<std::size_t> offsets;  // column offset for each local index
  std::vector<std::size_t> local_of;  // local index of each global index
};

LocalPlacement placement(std::size_t d, std::size_t window_sites,
                         const std::vector<std::size_t>& pos) {
  const std::size_t s = pos.size();
  const std::size_t local_dim = ipow(d, s);
  const std::size_t dim = ipow(d, window_sites);
  std::vector<std::size_t> strides(s);
  for (std::size_t k = 0; k < s; ++k) strides[k] = ipow(d, window_sites - 1 - pos[k]);
  LocalPlacement p;
  p.offsets.resize(local_dim);
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t x = l;
    std::size_t off = 0;
    for (std::size_t k = s; k-- > 0;) {
      off += (x % d) * strides[k];
      x /= d;
    }
    p.offsets[l] = off;
  }
  p.local_of.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t l = 0;
    for (std::size_t k = 0; k < s; ++k) l = l * d + (r / strides[k]) % d;
    p.local_of[r] = l;
  }
  return p;
}

std::vector<GroupElement> union_support(std::span<const LocalObservable> factors) {
  std::set<GroupElement> sites;
  for (const auto& f : factors) sites.insert(f.support().begin(), f.support().end());
  return {sites.begin(), sites.end()};
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteSystem

FiniteSystem::FiniteSystem(std::vector<Matrix> generators, State state, std::string label)
    : generators_(std::move(generators)), state_(std::move(state)), label_(std::move(label)) {
  if (generators_.empty()) throw InvalidArgument("a finite system needs at least one generator");
  const auto n = state_.dim();
  const Matrix id = Matrix::Identity(n, n);
  for (const auto& u : generators_) {
    if (u.rows() != n || u.cols() != n) {
      throw InvalidArgument("generator dimension does not match the state");
    }
    if (max_abs(u.adjoint() * u - id) > kSystemTolerance) {
      throw InvalidArgument("generator is not unitary");
    }
    if (max_abs(u * state_.density() * u.adjoint() - state_.density()) > kSystemTolerance) {
      throw InvalidArgument("state is not invariant under the generator action");
    }
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    for (std::size_t j = i + 1; j < generators_.size(); ++j) {
      const Matrix ab = generators_[i] * generators_[j];
      const Matrix ba = generators_[j] * generators_[i];
      const Complex c = (ba.adjoint() * ab).trace() / static_cast<double>(n);
      if (std::abs(std::abs(c) - 1.0) > kSystemTolerance ||
          max_abs(ab - c * ba) > kSystemTolerance) {
        throw InvalidArgument("generators do not commute up to a phase");
      }
    }
  }
}

Complex FiniteSystem::commutation_phase(std::size_t i, std::size_t j) const {
  const Matrix ab = generators_.at(i) * generators_.at(j);
  const Matrix ba = generators_.at(j) * generators_.at(i);
  return (ba.adjoint() * ab).trace() / static_cast<double>(dim());
}

Matrix FiniteSystem::unitary(const GroupElement& g) const {
  if (g.rank() != rank()) throw InvalidArgument("group element rank does not match the action");
  Matrix acc = Matrix::Identity(dim(), dim());
  for (std::size_t i = 0; i < rank(); ++i) {
    if (g[i] != 0) acc = acc * matrix_power(generators_[i], g[i]);
  }
  return acc;
}

Matrix FiniteSystem::act(const Matrix& a, const GroupElement& g) const {
  if (a.rows() != dim() || a.cols() != dim()) {
    throw InvalidArgument("observable dimension does not match the system");
  }
  if (g.is_zero()) return a;
  const Matrix u = unitary(g);
  return u.adjoint() * a * u;
}

void FiniteSystem::add_named(const std::string& name, Matrix m) {
  if (m.rows() != dim() || m.cols() != dim()) {
    throw InvalidArgument("named matrix '" + name + "' has the wrong dimension");
  }
  named_[name] = std::move(m);
}

// ---------------------------------------------------------------------------
// LocalObservable

LocalObservable::LocalObservable(std::size_t rank, std::size_t site_dim,
                                 std::vector<GroupElement> sites, Matrix tensor)
    : rank_(rank), site_dim_(site_dim), support_(std::move(sites)), tensor_(std::move(tensor)) {
  if (rank_ == 0) throw InvalidArgument("lattice rank must be positive");
  if (site_dim_ < 1) throw InvalidArgument("site dimension must be positive");
  canonicalize();
}

void LocalObservable::canonicalize() {
  const std::size_t s = support_.size();
  for (const auto& site : support_) {
    if (site.rank() != rank_) throw InvalidArgument("support site has the wrong rank");
  }
  const auto dim = static_cast<Eigen::Index>(ipow(site_dim_, s));
  if (tensor_.rows() != dim || tensor_.cols() != dim) {
    throw InvalidArgument("tensor dimension does not match d^|support|");
  }
  std::vector<std::size_t> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });
  std::vector<GroupElement> sorted;
  sorted.reserve(s);
  for (auto p : perm) sorted.push_back(support_[p]);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("support contains a repeated site");
  }
  if (!std::is_sorted(support_.begin(), support_.end())) {
    tensor_ = permute_legs(tensor_, site_dim_, perm);
  }
  support_ = std::move(sorted);

  // Strip identity legs.
  std::size_t i = 0;
  while (i < support_.size()) {
    const std::size_t legs = support_.size();
    Matrix reduced = reduced_leg(tensor_, site_dim_, legs, i);
    const Matrix padded = pad_leg(reduced, site_dim_, legs, i);
    const double scale = std::max(1.0, max_abs(tensor_));
    if (max_abs(padded - tensor_) <= kIdentityLegTolerance * scale) {
      tensor_ = std::move(reduced);
      support_.erase(support_.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

LocalObservable LocalObservable::scalar(std::size_t rank, std::size_t site_dim, Complex value) {
  Matrix t(1, 1);
  t(0, 0) = value;
  return LocalObservable(rank, site_dim, {}, std::move(t));
}

LocalObservable LocalObservable::pauli(std::size_t rank, const std::vector<GroupElement>& sites,
                                       const std::string& letters) {
  if (sites.size() != letters.size()) {
    throw InvalidArgument("Pauli string length must match the number of sites");
  }
  const Complex I(0.0, 1.0);
  Matrix t = Matrix::Identity(1, 1);
  for (char c : letters) {
    Matrix p(2, 2);
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, -I, I, 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default: throw InvalidArgument(std::string("unknown Pauli letter '") + c + "'");
    }
    t = ergodix::tensor(t, p);
  }
  return LocalObservable(rank, 2, sites, std::move(t));
}

LocalObservable LocalObservable::shifted(const GroupElement& g) const {
  LocalObservable out = *this;
  for (auto& s : out.support_) s = s + g;
  return out;
}

Matrix LocalObservable::embed(const std::vector<GroupElement>& window) const {
  const auto pos = positions_in(support_, window);
  const std::size_t dim = ipow(site_dim_, window.size());
  const auto p = placement(site_dim_, window.size(), pos);
  const auto local_dim = static_cast<std::size_t>(tensor_.rows());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t lr = p.local_of[r];
    const std::size_t base = r - p.offsets[lr];
    for (std::size_t lc = 0; lc < local_dim; ++lc) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(base + p.offsets[lc])) =
          tensor_(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// QuasiLocalSystem

QuasiLocalSystem::QuasiLocalSystem(std::size_t rank, std::size_t site_dim)
    : rank_(rank), site_dim_(site_dim) {
  if (rank_ == 0) throw InvalidArgument("shift_system: q must be at least 1");
  if (site_dim_ < 2) throw InvalidArgument("shift_system: site dimension must be at least 2");
}

void QuasiLocalSystem::check(const LocalObservable& a) const {
  if (a.site_dim() != site_dim_) throw InvalidArgument("site-dimension mismatch");
  if (a.rank() != rank_) throw InvalidArgument("lattice rank mismatch");
}

Complex QuasiLocalSystem::state(const LocalObservable& a) const {
  check(a);
  return a.tensor().trace() / static_cast<double>(a.tensor().rows());
}

LocalObservable QuasiLocalSystem::act(const LocalObservable& a, const GroupElement& g) const {
  check(a);
  return a.shifted(g);
}

LocalObservable QuasiLocalSystem::product(const LocalObservable& a,
                                          const LocalObservable& b) const {
  check(a);
  check(b);
  const std::array<LocalObservable, 2> pair{a, b};
  const auto window = union_support(pair);
  return LocalObservable(rank_, site_dim_, window, a.embed(window) * b.embed(window));
}

LocalObservable QuasiLocalSystem::combine(Complex alpha, const LocalObservable& a, Complex beta,
                                          const LocalObservable& b) const {
  check(a);
  check(b);
  const std::array<LocalObservable, 2> pair{a, b};
  const auto window = union_support(pair);
  return LocalObservable(rank_, site_dim_, window,
                         alpha * a.embed(window) + beta * b.embed(window));
}

LocalObservable QuasiLocalSystem::adjoint(const LocalObservable& a) const {
  check(a);
  return LocalObservable(rank_, site_dim_, a.support(), a.tensor().adjoint());
}

LocalObservable QuasiLocalSystem::identity() const {
  return LocalObservable::scalar(rank_, site_dim_, 1.0);
}

Complex QuasiLocalSystem::evaluate_product(std::span<const LocalObservable> factors) const {
  if (factors.empty()) throw InvalidArgument("evaluate: empty factor list");
  for (const auto& f : factors) check(f);
  const auto window = union_support(factors);
  const std::size_t dim = ipow(site_dim_, window.size());
  if (window.size() > 30 || dim > kMaxContractionDim) {
    throw InvalidArgument("evaluate: contraction window of " + std::to_string(window.size()) +
                          " sites exceeds the supported size");
  }
  std::vector<LocalPlacement> places;
  places.reserve(factors.size());
  for (const auto& f : factors) {
    places.push_back(placement(site_dim_, window.size(), positions_in(f.support(), window)));
  }
  // Diagonal of T_1 ... T_m, one basis vector at a time, factors applied
  // right to left.
  std::vector<Complex> diagonal(dim);
  Vector v(static_cast<Eigen::Index>(dim));
  Vector next(static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    v.setZero();
    v(static_cast<Eigen::Index>(col)) = 1.0;
    for (std::size_t j = factors.size(); j-- > 0;) {
      const Matrix& t = factors[j].tensor();
      const auto& p = places[j];
      const auto local_dim = static_cast<std::size_t>(t.rows());
      for (std::size_t r = 0; r < dim; ++r) {
        const std::size_t lr = p.local_of[r];
        const std::size_t base = r - p.offsets[lr];
        Complex acc = 0.0;
        for (std::size_t lc = 0; lc < local_dim; ++lc) {
          acc += t(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc)) *
                 v(static_cast<Eigen::Index>(base + p.offsets[lc]));
        }
        next(static_cast<Eigen::Index>(r)) = acc;
      }
      v.swap(next);
    }
    diagonal[col] = v(static_cast<Eigen::Index>(col));
  }
  Complex tr = 0.0;
  for (const auto& x : diagonal) tr += x;
  return tr / static_cast<double>(dim);
}

// ---------------------------------------------------------------------------
// System

const FiniteSystem& System::finite() const {
  if (const auto* f = std::get_if<FiniteSystem>(&backend_)) return *f;
  throw InvalidArgument("operation requires the finite backend");
}

const QuasiLocalSystem& System::quasi_local() const {
  if (const auto* q = std::get_if<QuasiLocalSystem>(&backend_)) return *q;
  throw InvalidArgument("operation requires the quasi-local backend");
}

std::size_t System::rank() const {
  return std::visit([](const auto& s) { return s.rank(); }, backend_);
}

bool System::tracial() const {
  if (is_finite()) return finite().tracial();
  return true;
}

std::string System::label() const {
  if (is_finite()) return finite().label();
  return "shift";
}

void System::check(const Observable& a) const {
  if (is_finite()) {
    const auto* m = std::get_if<Matrix>(&a);
    if (!m) throw InvalidArgument("finite backend expects a matrix observable");
    if (m->rows() != finite().dim() || m->cols() != finite().dim()) {
      throw InvalidArgument("observable dimension does not match the system");
    }
  } else {
    const auto* l = std::get_if<LocalObservable>(&a);
    if (!l) throw InvalidArgument("quasi-local backend expects a local observable");
    quasi_local().check(*l);
  }
}

Observable System::identity() const {
  if (is_finite()) return Matrix(Matrix::Identity(finite().dim(), finite().dim()));
  return quasi_local().identity();
}

Complex System::state(const Observable& a) const {
  check(a);
  if (is_finite()) return finite().state()(std::get<Matrix>(a));
  return quasi_local().state(std::get<LocalObservable>(a));
}

Observable System::act(const Observable& a, const GroupElement& g) const {
  check(a);
  if (is_finite()) return finite().act(std::get<Matrix>(a), g);
  return quasi_local().act(std::get<LocalObservable>(a), g);
}

Observable System::product(const Observable& a, const Observable& b) const {
  check(a);
  check(b);
  if (is_finite()) return Matrix(std::get<Matrix>(a) * std::get<Matrix>(b));
  return quasi_local().product(std::get<LocalObservable>(a), std::get<LocalObservable>(b));
}

Observable System::combine(Complex alpha, const Observable& a, Complex beta,
                           const Observable& b) const {
  check(a);
  check(b);
  if (is_finite()) return Matrix(alpha * std::get<Matrix>(a) + beta * std::get<Matrix>(b));
  return quasi_local().combine(alpha, std::get<LocalObservable>(a), beta,
                               std::get<LocalObservable>(b));
}

Observable System::adjoint(const Observable& a) const {
  check(a);
  if (is_finite()) return Matrix(std::get<Matrix>(a).adjoint());
  return quasi_local().adjoint(std::get<LocalObservable>(a));
}

double System::omega_norm(const Observable& a) const {
  const double v = state(product(adjoint(a), a)).real();
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double System::omega_distance(const Observable& a, const Observable& b) const {
  return omega_norm(combine(1.0, a, -1.0, b));
}

double System::operator_norm(const Observable& a) const {
  check(a);
  if (is_finite()) return ergodix::operator_norm(std::get<Matrix>(a));
  return ergodix::operator_norm(std::get<LocalObservable>(a).tensor());
}

double System::min_eigenvalue(const Observable& a) const {
  check(a);
  if (is_finite()) return min_hermitian_eigenvalue(std::get<Matrix>(a));
  return min_hermitian_eigenvalue(std::get<LocalObservable>(a).tensor());
}

Complex System::evaluate(std::span<const Factor> factors, const GroupElement& g) const {
  std::vector<Placed> placed;
  placed.reserve(factors.size());
  for (const auto& f : factors) placed.push_back({f.observable, f.hom(g)});
  return evaluate(placed);
}

Complex System::evaluate(std::span<const Placed> factors) const {
  if (factors.empty()) throw InvalidArgument("evaluate: empty factor list");
  if (is_finite()) {
    const auto& sys = finite();
    Matrix acc;
    bool first = true;
    for (const auto& f : factors) {
      check(f.observable.get());
      Matrix term = sys.act(std::get<Matrix>(f.observable.get()), f.at);
      if (first) {
        acc = std::move(term);
        first = false;
      } else {
        acc = acc * term;
      }
    }
    return sys.state()(acc);
  }
  const auto& sys = quasi_local();
  std::vector<LocalObservable> shifted;
  shifted.reserve(factors.size());
  for (const auto& f : factors) {
    check(f.observable.get());
    shifted.push_back(sys.act(std::get<LocalObservable>(f.observable.get()), f.at));
  }
  return sys.evaluate_product(shifted);
}

double System::commutator_norm(const Observable& a, const Observable& b, const Homomorphism& hom,
                               const GroupElement& g) const {
  check(a);
  check(b);
  if (is_finite()) {
    const Matrix& ma = std::get<Matrix>(a);
    const Matrix mb = finite().act(std::get<Matrix>(b), hom(g));
    return ergodix::operator_norm(commutator(ma, mb));
  }
  const auto& la = std::get<LocalObservable>(a);
  const auto lb = std::get<LocalObservable>(b).shifted(hom(g));
  std::vector<GroupElement> overlap;
  std::set_intersection(la.support().begin(), la.support().end(), lb.support().begin(),
                        lb.support().end(), std::back_inserter(overlap));
  if (overlap.empty()) return 0.0;
  const std::array<LocalObservable, 2> pair{la, lb};
  const auto window = union_support(pair);
  return ergodix::operator_norm(commutator(la.embed(window), lb.embed(window)));
}

// ---------------------------------------------------------------------------
// Constructors

Matrix clock_matrix(std::int64_t p, std::int64_t Q) {
  if (Q < 1) throw InvalidArgument("clock_matrix: Q must be positive");
  Matrix u = Matrix::Zero(Q, Q);
  for (std::int64_t j = 0; j < Q; ++j) {
    // Reduce the exponent first so phases are exact roots of unity.
    const std::int64_t e = ((p * j) % Q + Q) % Q;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(Q);
    u(j, j) = std::polar(1.0, angle);
  }
  return u;
}

Matrix shift_matrix(std::int64_t Q) {
  if (Q < 1) throw InvalidArgument("shift_matrix: Q must be positive");
  Matrix v = Matrix::Zero(Q, Q);
  for (std::int64_t j = 0; j < Q; ++j) v((j + 1) % Q, j) = 1.0;
  return v;
}

namespace {

void require_rotation_parameters(std::int64_t p, std::int64_t Q) {
  if (Q < 2) throw InvalidArgument("rotation algebra needs Q >= 2");
  if (std::gcd(p, Q) != 1) {
    throw InvalidArgument("rotation algebra needs gcd(p, Q) = 1");
  }
}

void check_commutation(const Matrix& u, const Matrix& v, std::int64_t p, std::int64_t Q) {
  const Complex zeta = std::polar(
      1.0, 2.0 * std::numbers::pi * static_cast<double>(((p % Q) + Q) % Q) / static_cast<double>(Q));
  if (max_abs(u * v - zeta * v * u) > 1e-12) {
    throw NumericalError("clock and shift matrices violate UV = ζVU");
  }
}

}  // namespace

FiniteSystem rotation_algebra_system(std::int64_t p, std::int64_t Q) {
  require_rotation_parameters(p, Q);
  Matrix u = clock_matrix(p, Q);
  Matrix v = shift_matrix(Q);
  check_commutation(u, v, p, Q);
  FiniteSystem sys({u}, State::trace(Q),
                   "rotation(" + std::to_string(p) + "/" + std::to_string(Q) + ")");
  sys.add_named("U", u);
  sys.add_named("V", v);
  return sys;
}

FiniteSystem clock_shift_system(std::int64_t p, std::int64_t Q) {
  require_rotation_parameters(p, Q);
  Matrix u = clock_matrix(p, Q);
  Matrix v = shift_matrix(Q);
  check_commutation(u, v, p, Q);
  FiniteSystem sys({u, v}, State::trace(Q),
                   "clock_shift(" + std::to_string(p) + "/" + std::to_string(Q) + ")");
  sys.add_named("U", u);
  sys.add_named("V", v);
  return sys;
}

FiniteSystem permutation_system(std::int64_t N) {
  if (N < 1) throw InvalidArgument("permutation_system: N must be positive");
  Matrix p = shift_matrix(N);
  FiniteSystem sys({p}, State::trace(N), "permutation(" + std::to_string(N) + ")");
  sys.add_named("P", p);
  for (std::int64_t i = 0; i < N; ++i) {
    Matrix e = Matrix::Zero(N, N);
    e(i, i) = 1.0;
    sys.add_named("E" + std::to_string(i), std::move(e));
  }
  return sys;
}

FiniteSystem product_system(const FiniteSystem& system) {
  std::vector<Matrix> gens;
  gens.reserve(system.rank());
  for (const auto& u : system.generators()) gens.push_back(tensor(u, conjugate_lift(u)));
  return FiniteSystem(std::move(gens), product_state(system.state()),
                      "product(" + system.label() + ")");
}

QuasiLocalSystem shift_system(std::size_t q, std::size_t d) { return QuasiLocalSystem(q, d); }

}  // namespace ergodix
