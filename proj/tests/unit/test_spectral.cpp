#include <doctest.h>

#include <cmath>

#include "ergodix/error.hpp"
#include "ergodix/random.hpp"
#include "ergodix/spectral.hpp"

using namespace ergodix;

TEST_CASE("GNS embedding is isometric") {
  Rng rng(12);
  Matrix rho = Matrix::Zero(3, 3);
  rho.diagonal() << 0.5, 0.3, 0.2;
  FiniteSystem sys({clock_matrix(1, 3)}, State(rho));
  auto gns = gns_build(sys);
  CHECK(gns.dim() == 9);
  CHECK(gns.min_gram_eigenvalue == doctest::Approx(0.2));
  for (int t = 0; t < 10; ++t) {
    Matrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
    Complex ip = gns.embed(a).dot(gns.embed(b));
    CHECK(std::abs(ip - sys.state()(a.adjoint() * b)) < 1e-12);
    CHECK((gns.pull_back(gns.embed(a)) - a).norm() < 1e-12);
  }
  CHECK(std::abs(gns.omega().norm() - 1.0) < 1e-14);
}

TEST_CASE("non-faithful states are rejected with a null vector") {
  FiniteSystem sys({Matrix(Matrix::Identity(2, 2))}, State::basis(2, 0));
  try {
    gns_build(sys);
    FAIL("expected NonFaithfulState");
  } catch (const NonFaithfulState& e) {
    const Matrix& x = e.null_vector();
    CHECK(x.norm() > 0.5);
    CHECK(omega_norm(sys.state(), x) < 1e-8);
  }
}

TEST_CASE("clock-shift systems") {
  for (std::int64_t Q : {2, 3, 5}) {
    auto sys = clock_shift_system(1, Q);
    auto gns = gns_build(sys);
    auto split = koopman_split(sys, gns);
    CHECK(split.dim_h1 == 1);
    CHECK(split.dim_h0 == std::size_t(Q * Q));
    CHECK(split.spaces.size() == std::size_t(Q * Q));
    auto factor = eigenoperator_factor(sys, gns, split);
    CHECK(eigenoperator_rank(factor) == std::size_t(Q * Q));
    CHECK(factor.dimension() == std::size_t(Q * Q));
    CHECK(factor_invariance_residual(sys, factor) < 1e-10);
    auto cd = commutant_dims(factor.basis, Q);
    CHECK(cd.commutant == 1);
    CHECK(cd.double_commutant == std::size_t(Q * Q));
    auto v = dichotomy_classify(sys);
    CHECK(v.kind == DichotomyKind::compact_factor);
    CHECK(to_string(v.kind) == "has-nontrivial-compact-factor");
    CHECK(v.ergodic);
  }
}

TEST_CASE("rotation Z-action is not ergodic") {
  for (std::int64_t Q : {2, 3, 5}) {
    auto sys = rotation_algebra_system(1, Q);
    auto split = koopman_split(sys, gns_build(sys));
    CHECK(split.dim_h1 == std::size_t(Q));
    CHECK(split.dim_h0 == std::size_t(Q * Q));
    auto v = dichotomy_classify(sys);
    CHECK(v.kind == DichotomyKind::not_ergodic);
    CHECK_FALSE(v.ergodic);
    CHECK(to_string(v.kind) == "not-ergodic");
  }
}

TEST_CASE("eigenoperators transform by their characters") {
  auto sys = clock_shift_system(1, 3);
  auto gns = gns_build(sys);
  auto split = koopman_split(sys, gns);
  auto factor = eigenoperator_factor(sys, gns, split);
  REQUIRE(factor.eigenoperators.size() == factor.characters.size());
  for (std::size_t i = 0; i < factor.eigenoperators.size(); ++i) {
    const Matrix& e = factor.eigenoperators[i];
    for (std::size_t j = 0; j < sys.rank(); ++j) {
      GroupElement g = GroupElement::unit(2, j);
      CHECK((sys.act(e, g) - factor.characters[i][j] * e).norm() < 1e-9 * e.norm());
      CHECK(std::abs(std::abs(factor.characters[i][j]) - 1.0) < 1e-10);
    }
  }
  Rng rng(6);
  CHECK(factor.distance(random_matrix(rng, 3, 3)) < 1e-10);
}

TEST_CASE("Koopman maps are unitary and fix the cyclic vector") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    auto sys = random_finite_system(rng, random_int(rng, 2, 4), 2, t % 2 == 0);
    auto gns = gns_build(sys);
    auto split = koopman_split(sys, gns);
    Vector omega = gns.omega();
    for (const auto& k : split.koopman) {
      Eigen::Index d = k.rows();
      CHECK((k.adjoint() * k - Matrix::Identity(d, d)).norm() < 1e-9);
      CHECK((k * omega - omega).norm() < 1e-10);
    }
    // Diagonal unitaries in a common basis: every vector is an eigenvector.
    CHECK(split.dim_h0 == std::size_t(gns.dim()));
    CHECK(split.dim_h1 >= std::size_t(sys.dim()));
  }
}

TEST_CASE("trivial algebra is weakly mixing") {
  FiniteSystem one({Matrix(Matrix::Identity(1, 1))}, State::trace(1));
  auto v = dichotomy_classify(one);
  CHECK(v.kind == DichotomyKind::weakly_mixing);
  CHECK(v.trivial);
  CHECK(v.dim_h0 == 1);
}

TEST_CASE("szemeredi driver branches") {
  auto cs = clock_shift_system(1, 3);
  System fin(cs);
  Matrix U = cs.named().at("U");
  Observable a = Matrix(0.5 * (Matrix::Identity(3, 3) + 0.5 * (U + U.adjoint())));
  auto rep = szemeredi_driver(fin, a, {1, 2}, box_schedule(2, 1, 6));
  CHECK(rep.branch == "compact");
  CHECK(rep.ergodic);
  CHECK(rep.tail_min > 0.0);
  CHECK(rep.compact.has_value());

  System lat(shift_system(1, 2));
  QuasiLocalSystem ql(1, 2);
  Observable p = ql.combine(0.5, ql.identity(), 0.5, LocalObservable::pauli(1, {GroupElement{0}}, "Z"));
  auto wm = szemeredi_driver(lat, p, {1, 2}, box_schedule(1, 1, 20));
  CHECK(wm.branch == "weakly-mixing");
  CHECK(wm.reference == doctest::Approx(0.125));
  CHECK(wm.bound_holds);
  for (const auto& pt : wm.per_window) {
    CHECK(pt.deviation <= wm.boundary_constant / double(2 * pt.n + 1) + 1e-12);
    // Only g = 0 collides: average = (1/8)(2n) + 1/2 over 2n+1.
    double exact = (0.125 * double(2 * pt.n) + 0.5) / double(2 * pt.n + 1);
    CHECK(std::abs(pt.average - exact) < 1e-12);
  }

  System rot(rotation_algebra_system(1, 5));
  CHECK_THROWS_AS(szemeredi_driver(rot, Observable(Matrix(Matrix::Identity(5, 5))), {1, 2}, box_schedule(1, 1, 3)),
                  InvalidArgument);
}
