#pragma once

// Dense complex matrix algebra, states and the seminorms they induce.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ergodix {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A state on M_N in density-matrix form: ω(a) = tr(ρ a).
///
/// Construction validates that ρ is Hermitian, positive semidefinite and of
/// unit trace. The tracial flag is computed, never taken on trust: ω is a
/// trace on M_N exactly when ρ = 1/N.
class State {
 public:
  explicit State(Matrix density);

  /// Normalized trace tr(a)/N.
  static State trace(Eigen::Index dim);
  /// Pure vector state |e_i><e_i|.
  static State basis(Eigen::Index dim, Eigen::Index i);

  Eigen::Index dim() const { return density_.rows(); }
  const Matrix& density() const { return density_; }
  bool tracial() const { return tracial_; }

  Complex operator()(const Matrix& a) const;

 private:
  Matrix density_;
  bool tracial_ = false;
};

/// tr(ρ a); throws on dimension mismatch.
Complex apply_state(const State& state, const Matrix& a);
/// sqrt(ω(a* a)), clamped at zero.
double omega_norm(const State& state, const Matrix& a);
/// Largest singular value.
double operator_norm(const Matrix& a);

/// a ↦ ‖a‖_ω for a fixed state.
class OmegaSeminorm {
 public:
  explicit OmegaSeminorm(const State& state) : state_(&state) {}
  double operator()(const Matrix& a) const { return omega_norm(*state_, a); }
  Complex inner(const Matrix& a, const Matrix& b) const;

 private:
  const State* state_;
};

/// Kronecker product a ⊗ b.
Matrix tensor(const Matrix& a, const Matrix& b);
/// Image of a in the conjugate algebra: entrywise conjugate.
Matrix conjugate_lift(const Matrix& a);
/// State ω ⊗ ω̄ on M_N ⊗ M_N.
State product_state(const State& state);

Matrix commutator(const Matrix& a, const Matrix& b);

/// Σ_j (∏_{l<j} c_l)(c_j − d_j)(∏_{l>j} d_l), which equals ∏c − ∏d.
Matrix telescope_decompose(std::span<const Matrix> c, std::span<const Matrix> d);

/// Product of a list of square matrices, left to right.
Matrix ordered_product(std::span<const Matrix> factors);

/// Smallest eigenvalue of the Hermitian part of a.
double min_hermitian_eigenvalue(const Matrix& a);

}  // namespace ergodix
