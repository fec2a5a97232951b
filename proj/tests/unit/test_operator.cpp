#include <doctest.h>

#include <cmath>
#include <vector>

#include "ergodix/error.hpp"
#include "ergodix/operator.hpp"
#include "ergodix/random.hpp"

using namespace ergodix;

TEST_CASE("state validation") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.25;
  rho(1, 1) = 0.75;
  State s(rho);
  CHECK_FALSE(s.tracial());
  CHECK(State::trace(3).tracial());
  CHECK_FALSE(State::basis(3, 1).tracial());

  Matrix bad = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(State{bad}, InvalidArgument);  // trace 2
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(State{neg}, InvalidArgument);
  Matrix nonherm = 0.5 * Matrix::Identity(2, 2);
  nonherm(0, 1) = 0.3;
  CHECK_THROWS_AS(State{nonherm}, InvalidArgument);
}

TEST_CASE("state values") {
  Matrix a(2, 2);
  a << 1.0, Complex(0, 2), 3.0, 4.0;
  CHECK(std::abs(State::trace(2)(a) - Complex(2.5, 0)) < 1e-15);
  CHECK(std::abs(State::basis(2, 1)(a) - Complex(4.0, 0)) < 1e-15);
  CHECK(std::abs(State::trace(3)(Matrix::Identity(3, 3)) - 1.0) < 1e-15);
  CHECK_THROWS_AS(apply_state(State::trace(3), a), InvalidArgument);
}

TEST_CASE("omega seminorm and operator norm") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;  // a*a = E11
  CHECK(omega_norm(State::trace(2), a) == doctest::Approx(std::sqrt(0.5)));
  CHECK(omega_norm(State::basis(2, 0), a) == 0.0);
  CHECK(omega_norm(State::basis(2, 1), a) == doctest::Approx(1.0));
  CHECK(operator_norm(a) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, -4.0, 2.0;
  CHECK(operator_norm(d) == doctest::Approx(4.0));
}

TEST_CASE("tensor matches explicit index formula") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_int(rng, 1, 3), q = random_int(rng, 1, 3);
    Matrix a = random_matrix(rng, p, p), b = random_matrix(rng, q, q);
    Matrix t = tensor(a, b);
    REQUIRE(t.rows() == p * q);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = 0; k < q; ++k)
          for (Eigen::Index l = 0; l < q; ++l)
            CHECK(std::abs(t(i * q + k, j * q + l) - a(i, j) * b(k, l)) < 1e-14);
  }
}

TEST_CASE("product state factorizes") {
  Rng rng(11);
  State s(random_density(rng, 3));
  State ss = product_state(s);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
    Complex lhs = ss(tensor(a, conjugate_lift(b)));
    Complex rhs = s(a) * std::conj(s(b));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("telescoping equals product difference") {
  Rng rng(3);
  for (std::size_t k = 1; k <= 5; ++k) {
    std::vector<Matrix> c, d;
    for (std::size_t j = 0; j < k; ++j) {
      c.push_back(random_matrix(rng, 3, 3));
      d.push_back(random_matrix(rng, 3, 3));
    }
    Matrix direct = ordered_product(c) - ordered_product(d);
    CHECK((telescope_decompose(c, d) - direct).norm() < 1e-11 * (1.0 + direct.norm()));
  }
  std::vector<Matrix> c, d;
  CHECK_THROWS(telescope_decompose(c, d));
}

TEST_CASE("commutator and cauchy-schwarz") {
  Rng rng(5);
  Matrix a = random_hermitian(rng, 4);
  CHECK(commutator(a, a).norm() < 1e-12);
  State s(random_density(rng, 4));
  OmegaSeminorm nrm(s);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x = random_matrix(rng, 4, 4), y = random_matrix(rng, 4, 4);
    CHECK(std::abs(nrm.inner(x, y)) <= nrm(x) * nrm(y) * (1 + 1e-12));
  }
}

TEST_CASE("min hermitian eigenvalue") {
  Rng rng(9);
  CHECK(min_hermitian_eigenvalue(random_positive(rng, 4)) >= -1e-12);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 3.0, -2.0;
  CHECK(min_hermitian_eigenvalue(d) == doctest::Approx(-2.0));
}
