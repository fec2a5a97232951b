#pragma once

// GNS space, Koopman unitaries and their joint eigenspaces for finite
// systems; the eigenoperator factor and the weak-mixing/compact dichotomy;
// and the Szemerédi driver that picks the compact or the weakly mixing
// branch from the backend.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergodix/compactness.hpp"
#include "ergodix/error.hpp"
#include "ergodix/lattice.hpp"
#include "ergodix/systems.hpp"

namespace ergodix {

/// Raised by gns_build when ω has a null vector: ω(a*a) = 0 for a ≠ 0.
class NonFaithfulState : public InvalidArgument {
 public:
  NonFaithfulState(const std::string& what, Matrix null_vector)
      : InvalidArgument(what), null_vector_(std::move(null_vector)) {}
  const Matrix& null_vector() const { return null_vector_; }

 private:
  Matrix null_vector_;
};

/// M_N with ⟨a, b⟩ = ω(a*b). Coordinates are orthonormal: with vec the
/// column-major vectorization and G = L L* the Gram matrix, ι(a) = L* vec(a).
struct GnsSpace {
  Eigen::Index n = 0;
  Matrix gram;
  Matrix cholesky;
  double min_gram_eigenvalue = 0.0;

  Eigen::Index dim() const { return n * n; }
  Vector embed(const Matrix& a) const;
  Matrix pull_back(const Vector& x) const;
  /// ι(1).
  Vector omega() const { return embed(Matrix::Identity(n, n)); }
};

/// Requires a faithful state (Gram eigenvalues > 1e-10).
GnsSpace gns_build(const FiniteSystem& sys);

struct JointEigenspace {
  /// λ(e_j) for each generator.
  std::vector<Complex> character;
  /// Orthonormal columns in GNS coordinates.
  Matrix basis;
};

struct KoopmanSplitting {
  /// ι(a) ↦ ι(τ_{e_j}(a)) in GNS coordinates.
  std::vector<Matrix> koopman;
  std::vector<JointEigenspace> spaces;
  std::size_t dim_h1 = 0;
  std::size_t dim_h0 = 0;
  double commutator_residual = 0.0;
  double unitarity_residual = 0.0;
  double eigen_residual = 0.0;
};

/// Joint diagonalization by successive refinement: each generator's Koopman
/// map is Schur-decomposed on every current joint eigenspace, eigenvalues
/// within `tolerance` are grouped. Throws NumericalError when the Koopman
/// maps fail to commute or to be unitary to 1e-10.
KoopmanSplitting koopman_split(const FiniteSystem& sys, const GnsSpace& gns,
                               double tolerance = 1e-8);

struct CompactFactor {
  /// Eigenoperators pulled back from the joint eigenvectors.
  std::vector<Matrix> eigenoperators;
  std::vector<std::vector<Complex>> characters;
  /// Frobenius-orthonormal basis of the generated unital *-subalgebra.
  std::vector<Matrix> basis;
  std::size_t rounds = 0;

  std::size_t dimension() const { return basis.size(); }
  /// Frobenius distance from a to the span of the basis.
  double distance(const Matrix& a) const;
};

CompactFactor eigenoperator_factor(const FiniteSystem& sys, const GnsSpace& gns,
                                   const KoopmanSplitting& split);

/// Number of linearly independent eigenoperators (rank of their span).
std::size_t eigenoperator_rank(const CompactFactor& factor);

/// dim of {x : [x, s] = 0 for all s in `basis`} and of its commutant.
struct CommutantDims {
  std::size_t commutant = 0;
  std::size_t double_commutant = 0;
};
CommutantDims commutant_dims(const std::vector<Matrix>& basis, Eigen::Index n);

/// max over generators and basis elements of the distance from τ(b) to the
/// factor.
double factor_invariance_residual(const FiniteSystem& sys, const CompactFactor& factor);

enum class DichotomyKind { not_ergodic, weakly_mixing, compact_factor };

std::string to_string(DichotomyKind k);

struct DichotomyVerdict {
  DichotomyKind kind = DichotomyKind::not_ergodic;
  bool ergodic = false;
  bool trivial = false;
  std::size_t dim_h1 = 0;
  std::size_t dim_h0 = 0;
  std::size_t factor_dim = 0;
  std::string label;
};

DichotomyVerdict dichotomy_classify(const FiniteSystem& sys);

struct SzemerediDriverReport {
  /// "compact" or "weakly-mixing".
  std::string branch;
  bool ergodic = false;
  std::size_t dim_h1 = 0;
  std::size_t dim_h0 = 0;
  std::size_t factor_dim = 0;
  struct Point {
    std::int64_t n = 0;
    std::size_t window_size = 0;
    double average = 0.0;
    /// |average − ω(a)^{k+1}| on the weakly mixing branch.
    double deviation = 0.0;
    double bound = 0.0;
  };
  std::vector<Point> per_window;
  /// ω(a)^{k+1}.
  double reference = 0.0;
  /// c with deviation <= c / |Λ_n| (weakly mixing branch).
  double boundary_constant = 0.0;
  bool bound_holds = true;
  double tail_min = 0.0;
  /// Filled on the compact branch.
  std::optional<CompactSzemerediReport> compact;
};

/// Averages of |ω(a ∏_j τ_{m_j g}(a))|. Finite systems must be ergodic and
/// go through the compact branch; the lattice goes through the weakly
/// mixing branch, where the averages converge to ω(a)^{k+1} with a boundary
/// term counted from support collisions.
SzemerediDriverReport szemeredi_driver(const System& sys, const Observable& a,
                                       const std::vector<std::int64_t>& exponents,
                                       const WindowSchedule& windows);

}  // namespace ergodix
