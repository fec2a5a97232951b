#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergodix/compactness.hpp"
#include "ergodix/error.hpp"
#include "ergodix/random.hpp"

using namespace ergodix;

namespace {

Matrix positive_rotation_element(const FiniteSystem& sys) {
  const Matrix& V = sys.named().at("V");
  Matrix n = Matrix::Identity(V.rows(), V.cols());
  return 0.5 * (n + 0.5 * (V + V.adjoint()));
}

}  // namespace

TEST_CASE("separated orbit set of the rotation") {
  System sys(rotation_algebra_system(1, 5));
  Observable v = sys.finite().named().at("V");
  auto cert = separated_orbit_set(sys, v, 0.1, box_window(1, 10));
  CHECK(cert.elements.size() == 5);
  CHECK(cert.covering_radius < 1e-12);
  CHECK(cert.separation == doctest::Approx(2 * std::sin(std::numbers::pi / 5)).epsilon(1e-12));
  CHECK(verify_certificate(sys, v, cert));
  // A coarse ε merges orbit points.
  auto coarse = separated_orbit_set(sys, v, 1.5, box_window(1, 10));
  CHECK(coarse.elements.size() < 5);
  CHECK(coarse.covering_radius < 1.5);
  CHECK(verify_certificate(sys, v, coarse));
  CHECK_THROWS_AS(separated_orbit_set(sys, v, 0.0, box_window(1, 3)), InvalidArgument);
}

TEST_CASE("tampered certificates are rejected") {
  System sys(rotation_algebra_system(1, 5));
  Observable v = sys.finite().named().at("V");
  auto cert = separated_orbit_set(sys, v, 0.1, box_window(1, 10));
  cert.elements.pop_back();
  cert.points.pop_back();
  CHECK_FALSE(verify_certificate(sys, v, cert));
}

TEST_CASE("certificates on random orbits") {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    auto fin = random_finite_system(rng, 3, 1, t % 2 == 0);
    System sys(fin);
    Observable a = random_matrix(rng, 3, 3);
    auto cert = separated_orbit_set(sys, a, 0.5, box_window(1, 12));
    CHECK(verify_certificate(sys, a, cert));
    CHECK(cert.covering_radius < 0.5);
  }
}

TEST_CASE("return set of the rotation is 5Z") {
  System sys(rotation_algebra_system(1, 5));
  Observable v = sys.finite().named().at("V");
  auto rs = return_set(sys, v, 0.1, {1, 2}, box_window(1, 50));
  std::vector<GroupElement> want;
  for (std::int64_t g = -50; g <= 50; ++g)
    if (g % 5 == 0) want.push_back(GroupElement{g});
  CHECK(rs.members == want);
  CHECK(rs.chain_certificate);
  for (double d : rs.member_distances) CHECK(d < 1e-12);
  auto set = rs.as_membership();
  CHECK(set(GroupElement{10}));
  CHECK_FALSE(set(GroupElement{11}));
  REQUIRE(rs.gap_witness.has_value());
  CHECK(rs.gap_witness->size() == 5);
}

TEST_CASE("chain inequality on random systems") {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    System sys(random_finite_system(rng, 3, 1, true));
    Observable a = random_matrix(rng, 3, 3);
    CHECK(return_set(sys, a, 1.0, {1, 2, 3}, box_window(1, 15)).chain_certificate);
  }
}

TEST_CASE("correlation lower bound") {
  auto fin = rotation_algebra_system(1, 5);
  System sys(fin);
  Observable a = positive_rotation_element(fin);
  std::vector<std::int64_t> ex{0, 1, 2};
  // ω(a³) for a = (1 + cos-part)/2 on the normalized trace.
  const Matrix& am = std::get<Matrix>(a);
  double w3 = (am * am * am).trace().real() / 5.0;
  double eps = 0.1 * w3;
  for (std::int64_t g = -20; g <= 20; g += 5) {
    auto b = correlation_lower_bound(sys, a, ex, eps, GroupElement{g});
    CHECK(b.in_return_set);
    CHECK(b.holds);
    CHECK(b.value >= b.bound);
    CHECK(b.bound == doctest::Approx(w3 - eps));
  }
  CHECK_THROWS_AS(correlation_lower_bound(sys, a, ex, 2 * w3, GroupElement{0}), InvalidArgument);
  Observable v = fin.named().at("V");
  CHECK_THROWS_AS(correlation_lower_bound(sys, v, ex, 0.01, GroupElement{0}), InvalidArgument);
  Matrix rho = Matrix::Zero(5, 5);
  rho.diagonal() << 0.4, 0.3, 0.1, 0.1, 0.1;
  FiniteSystem nontracial({clock_matrix(1, 5)}, State(rho));
  CHECK_THROWS_AS(correlation_lower_bound(System(nontracial), Observable(Matrix(Matrix::Identity(5, 5))), ex, 0.1,
                                          GroupElement{0}),
                  InvalidArgument);
}

TEST_CASE("compact szemeredi average on Z_3 matches brute force") {
  auto fin = permutation_system(3);
  System sys(fin);
  Observable e0 = fin.named().at("E0");
  const Matrix& E = fin.named().at("E0");
  auto windows = box_schedule(1, 1, 30);
  auto rep = szemeredi_average_compact(sys, e0, {1, 2}, windows);
  CHECK(std::abs(rep.tail_min - 1.0 / 9.0) < 1e-9);
  CHECK(rep.scope == "certified on scan window only");
  for (const auto& w : rep.per_window) {
    CHECK(w.e_density >= 1.0 / 3.0 - 1e-15);
    // Brute force: ω(E τ_g E τ_{2g} E) with explicit matrix products.
    double sum = 0;
    auto box = shift_window(box_window(1, w.n), w.shift);
    for (const auto& g : box) {
      Matrix p = E * fin.act(E, g) * fin.act(E, g * 2);
      sum += std::abs(p.trace()) / 3.0;
    }
    CHECK(std::abs(w.average - sum / double(box.size())) < 1e-12);
  }
  std::vector<GroupElement> cands{GroupElement{0}, GroupElement{1}, GroupElement{2}};
  auto given = szemeredi_average_compact(sys, e0, {1, 2}, windows, cands);
  CHECK(given.candidates == cands);
  CHECK(std::abs(given.tail_min - 1.0 / 9.0) < 1e-9);
  CHECK_THROWS_AS(szemeredi_average_compact(sys, e0, {2, 1}, windows), InvalidArgument);
}
