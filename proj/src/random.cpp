#include "ergodix/random.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>

#include "ergodix/error.hpp"

namespace ergodix {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

Vector random_vector(Rng& rng, Eigen::Index dim) { return random_matrix(rng, dim, 1).col(0); }

Matrix random_hermitian(Rng& rng, Eigen::Index dim) {
  const Matrix a = random_matrix(rng, dim, dim);
  return (a + a.adjoint()) / 2.0;
}

Matrix random_positive(Rng& rng, Eigen::Index dim) {
  const Matrix a = random_matrix(rng, dim, dim);
  return a.adjoint() * a;
}

Matrix random_unitary(Rng& rng, Eigen::Index dim) {
  const Matrix a = random_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix random_density(Rng& rng, Eigen::Index dim) {
  Matrix p = random_positive(rng, dim) + 0.1 * Matrix::Identity(dim, dim);
  p = (p + p.adjoint()) / 2.0;
  return p / p.trace().real();
}

double random_uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t random_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

FiniteSystem random_finite_system(Rng& rng, Eigen::Index dim, std::size_t q, bool tracial) {
  if (dim < 1 || q < 1) throw InvalidArgument("random systems need dim >= 1 and rank >= 1");
  const Matrix basis = random_unitary(rng, dim);
  std::vector<Matrix> generators;
  for (std::size_t j = 0; j < q; ++j) {
    Vector phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      phases(i) = std::polar(1.0, random_uniform(rng, 0.0, 2.0 * std::numbers::pi));
    }
    generators.push_back(basis * phases.asDiagonal() * basis.adjoint());
  }
  if (tracial) return FiniteSystem(std::move(generators), State::trace(dim), "random");
  Eigen::VectorXd weights(dim);
  for (Eigen::Index i = 0; i < dim; ++i) weights(i) = random_uniform(rng, 0.2, 1.0);
  weights /= weights.sum();
  Matrix rho = basis * weights.cast<Complex>().asDiagonal() * basis.adjoint();
  rho = (rho + rho.adjoint()) / 2.0;
  rho /= rho.trace().real();
  return FiniteSystem(std::move(generators), State(std::move(rho)), "random");
}

}  // namespace ergodix
