#pragma once

// Dynamical-system backends. A FiniteSystem is M_N with an invariant state
// and a Z^q-action by conjugation with phase-commuting unitaries. A
// QuasiLocalSystem is the spin lattice over Z^q with the product normalized
// trace and the lattice shift. `System` is the tagged union every statistic
// consumes.

#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergodix/lattice.hpp"
#include "ergodix/operator.hpp"

namespace ergodix {

class FiniteSystem {
 public:
  /// Validates unitarity, pairwise phase commutation and invariance of the
  /// state under every generator (tolerance 1e-10).
  FiniteSystem(std::vector<Matrix> generators, State state, std::string label = "finite");

  const std::string& label() const { return label_; }
  Eigen::Index dim() const { return state_.dim(); }
  std::size_t rank() const { return generators_.size(); }
  const std::vector<Matrix>& generators() const { return generators_; }
  const State& state() const { return state_; }
  bool tracial() const { return state_.tracial(); }

  /// The scalar c_ij with U_i U_j = c_ij U_j U_i.
  Complex commutation_phase(std::size_t i, std::size_t j) const;

  /// U^g = U_1^{g_1} ... U_q^{g_q}.
  Matrix unitary(const GroupElement& g) const;
  /// τ_g(a) = (U^g)* a U^g.
  Matrix act(const Matrix& a, const GroupElement& g) const;

  /// Named matrices available to configuration files (e.g. "U", "V").
  const std::map<std::string, Matrix>& named() const { return named_; }
  void add_named(const std::string& name, Matrix m);

 private:
  std::vector<Matrix> generators_;
  State state_;
  std::string label_;
  std::map<std::string, Matrix> named_;
};

/// Observable of the spin lattice with finite support. The support is kept
/// sorted and minimal: sites on which the tensor acts as the identity are
/// stripped at construction. The tensor acts on ⊗_{s in support} C^d with the
/// first support site as the most significant tensor leg.
class LocalObservable {
 public:
  LocalObservable(std::size_t rank, std::size_t site_dim, std::vector<GroupElement> sites,
                  Matrix tensor);

  static LocalObservable scalar(std::size_t rank, std::size_t site_dim, Complex value);
  /// Pauli string, e.g. sites {0,1} with "ZX". Requires site_dim 2.
  static LocalObservable pauli(std::size_t rank, const std::vector<GroupElement>& sites,
                               const std::string& letters);

  std::size_t rank() const { return rank_; }
  std::size_t site_dim() const { return site_dim_; }
  const std::vector<GroupElement>& support() const { return support_; }
  const Matrix& tensor() const { return tensor_; }

  LocalObservable shifted(const GroupElement& g) const;
  /// The tensor embedded into the ordered site list `window`, which must
  /// contain the support.
  Matrix embed(const std::vector<GroupElement>& window) const;

 private:
  void canonicalize();

  std::size_t rank_;
  std::size_t site_dim_;
  std::vector<GroupElement> support_;
  Matrix tensor_;
};

class QuasiLocalSystem {
 public:
  QuasiLocalSystem(std::size_t rank, std::size_t site_dim);

  std::size_t rank() const { return rank_; }
  std::size_t site_dim() const { return site_dim_; }

  /// Product normalized trace.
  Complex state(const LocalObservable& a) const;
  LocalObservable act(const LocalObservable& a, const GroupElement& g) const;
  LocalObservable product(const LocalObservable& a, const LocalObservable& b) const;
  LocalObservable combine(Complex alpha, const LocalObservable& a, Complex beta,
                          const LocalObservable& b) const;
  LocalObservable adjoint(const LocalObservable& a) const;
  LocalObservable identity() const;

  /// ω of the ordered product, contracted on the union of the supports.
  Complex evaluate_product(std::span<const LocalObservable> factors) const;

  void check(const LocalObservable& a) const;

 private:
  std::size_t rank_;
  std::size_t site_dim_;
};

using Observable = std::variant<Matrix, LocalObservable>;

/// One factor τ_{φ(g)}(a) of a multi-correlation ω(∏_j τ_{φ_j(g)}(a_j)).
struct Factor {
  std::reference_wrapper<const Observable> observable;
  Homomorphism hom;
};

/// An observable placed at an explicit group element: τ_g(a).
struct Placed {
  std::reference_wrapper<const Observable> observable;
  GroupElement at;
};

class System {
 public:
  System(FiniteSystem system) : backend_(std::move(system)) {}
  System(QuasiLocalSystem system) : backend_(std::move(system)) {}

  bool is_finite() const { return std::holds_alternative<FiniteSystem>(backend_); }
  const FiniteSystem& finite() const;
  const QuasiLocalSystem& quasi_local() const;

  std::size_t rank() const;
  bool tracial() const;
  std::string label() const;

  Observable identity() const;
  Complex state(const Observable& a) const;
  Observable act(const Observable& a, const GroupElement& g) const;
  Observable product(const Observable& a, const Observable& b) const;
  Observable combine(Complex alpha, const Observable& a, Complex beta, const Observable& b) const;
  Observable adjoint(const Observable& a) const;

  double omega_norm(const Observable& a) const;
  double omega_distance(const Observable& a, const Observable& b) const;
  double operator_norm(const Observable& a) const;
  /// Smallest eigenvalue of the Hermitian part (positivity test).
  double min_eigenvalue(const Observable& a) const;

  /// ω(∏_j τ_{φ_j(g)}(a_j)), evaluated exactly.
  Complex evaluate(std::span<const Factor> factors, const GroupElement& g) const;
  /// ω(∏_j τ_{g_j}(a_j)) for individually placed factors.
  Complex evaluate(std::span<const Placed> factors) const;
  /// ‖[a, τ_{φ(g)}(b)]‖.
  double commutator_norm(const Observable& a, const Observable& b, const Homomorphism& hom,
                         const GroupElement& g) const;

  /// Throws unless `a` belongs to this backend (right alternative, dims).
  void check(const Observable& a) const;

 private:
  std::variant<FiniteSystem, QuasiLocalSystem> backend_;
};

/// Clock matrix diag(1, ζ, ..., ζ^{Q-1}) with ζ = e^{2πi p/Q}.
Matrix clock_matrix(std::int64_t p, std::int64_t Q);
/// Cyclic shift V e_j = e_{j+1 mod Q}.
Matrix shift_matrix(std::int64_t Q);

/// Rotation algebra at θ = p/Q: Z-action τ^n = Ad((U*)^n) on M_Q with the
/// normalized trace. Named matrices "U", "V".
FiniteSystem rotation_algebra_system(std::int64_t p, std::int64_t Q);
/// Z^2-action on M_Q generated by conjugation with U and with V.
FiniteSystem clock_shift_system(std::int64_t p, std::int64_t Q);
/// Classical rotation of Z_N realized on the diagonal of M_N: cyclic
/// permutation unitary "P", uniform trace. Named projectors "E0".."E{N-1}".
FiniteSystem permutation_system(std::int64_t N);
/// Product system (A ⊗ Ā, ω ⊗ ω̄, τ ⊗ τ).
FiniteSystem product_system(const FiniteSystem& system);
/// Spin lattice Z^q with site dimension d >= 2.
QuasiLocalSystem shift_system(std::size_t q, std::size_t d);

}  // namespace ergodix
