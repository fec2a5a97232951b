#include "ergodix/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ergodix/error.hpp"

namespace ergodix {

namespace {

constexpr double kStateTolerance = 1e-12;

void require_dims(const State& state, const Matrix& a, const char* where) {
  if (a.rows() != state.dim() || a.cols() != state.dim()) {
    throw InvalidArgument(std::string(where) + ": dimension mismatch (state " +
                          std::to_string(state.dim()) + ", operator " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
  }
}

}  // namespace

State::State(Matrix density) : density_(std::move(density)) {
  if (density_.rows() == 0 || density_.rows() != density_.cols()) {
    throw InvalidArgument("density matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, density_.cwiseAbs().maxCoeff());
  if ((density_ - density_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  const Complex tr = density_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kStateTolerance * density_.rows()) {
    throw InvalidArgument("density matrix must have unit trace");
  }
  if (min_hermitian_eigenvalue(density_) < -kStateTolerance) {
    throw InvalidArgument("density matrix is not positive semidefinite");
  }
  const auto n = static_cast<double>(density_.rows());
  const Matrix uniform = Matrix::Identity(density_.rows(), density_.rows()) / n;
  tracial_ = (density_ - uniform).cwiseAbs().maxCoeff() <= 1e-12;
}

State State::trace(Eigen::Index dim) {
  if (dim <= 0) throw InvalidArgument("state dimension must be positive");
  return State(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

State State::basis(Eigen::Index dim, Eigen::Index i) {
  if (i < 0 || i >= dim) throw InvalidArgument("basis state index out of range");
  Matrix rho = Matrix::Zero(dim, dim);
  rho(i, i) = 1.0;
  return State(std::move(rho));
}

Complex State::operator()(const Matrix& a) const { return apply_state(*this, a); }

Complex apply_state(const State& state, const Matrix& a) {
  require_dims(state, a, "apply_state");
  // tr(ρ a) = Σ_ij ρ_ij a_ji
  return (state.density().cwiseProduct(a.transpose())).sum();
}

double omega_norm(const State& state, const Matrix& a) {
  require_dims(state, a, "omega_norm");
  const double v = apply_state(state, a.adjoint() * a).real();
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Complex OmegaSeminorm::inner(const Matrix& a, const Matrix& b) const {
  return apply_state(*state_, a.adjoint() * b);
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix conjugate_lift(const Matrix& a) { return a.conjugate(); }

State product_state(const State& state) {
  return State(tensor(state.density(), conjugate_lift(state.density())));
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix ordered_product(std::span<const Matrix> factors) {
  if (factors.empty()) throw InvalidArgument("ordered_product of an empty list");
  Matrix acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
  return acc;
}

Matrix telescope_decompose(std::span<const Matrix> c, std::span<const Matrix> d) {
  if (c.empty() || c.size() != d.size()) {
    throw InvalidArgument("telescope_decompose: need equal, nonempty factor lists");
  }
  const auto n = c.front().rows();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j].rows() != n || c[j].cols() != n || d[j].rows() != n || d[j].cols() != n) {
      throw InvalidArgument("telescope_decompose: factor dimension mismatch");
    }
  }
  const std::size_t k = c.size();
  // suffix[j] = d_j d_{j+1} ... d_{k-1}
  std::vector<Matrix> suffix(k + 1, Matrix::Identity(n, n));
  for (std::size_t j = k; j-- > 0;) suffix[j] = d[j] * suffix[j + 1];
  Matrix prefix = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < k; ++j) {
    out += prefix * (c[j] - d[j]) * suffix[j + 1];
    prefix = prefix * c[j];
  }
  return out;
}

double min_hermitian_eigenvalue(const Matrix& a) {
  const Matrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ergodix
