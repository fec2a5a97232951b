#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergodix/error.hpp"
#include "ergodix/random.hpp"
#include "ergodix/vdc.hpp"

using namespace ergodix;

namespace {

Vector unit2() {
  Vector v(2);
  v << Complex(0.6, 0), Complex(0, 0.8);
  return v;
}

VectorSequence random_table(Rng& rng, std::size_t dim, std::int64_t span) {
  std::vector<Vector> table;
  double bound = 0;
  for (std::int64_t i = -span; i <= span; ++i) {
    table.push_back(random_vector(rng, Eigen::Index(dim)));
    bound = std::max(bound, table.back().norm());
  }
  return VectorSequence(dim, bound, [table, span](const GroupElement& g) { return table.at(std::size_t(g[0] + span)); });
}

}  // namespace

TEST_CASE("declared bound is enforced") {
  VectorSequence f(1, 1.0, [](const GroupElement& g) { return Vector::Constant(1, double(g[0])); });
  CHECK_NOTHROW(f(GroupElement{1}));
  CHECK_THROWS_AS(f(GroupElement{2}), InvalidArgument);
}

TEST_CASE("averages against closed forms") {
  Vector v = unit2();
  for (std::int64_t n = 1; n <= 15; ++n) {
    auto w = box_window(1, n);
    CHECK((average_vector(constant_sequence(v), w) - v).norm() < 1e-14);
    // Σ_{-n}^{n} (-1)^g = (-1)^n.
    Vector alt = average_vector(alternating_sequence(v), w);
    CHECK((alt - v * (n % 2 == 0 ? 1.0 : -1.0) / double(2 * n + 1)).norm() < 1e-14);
    CHECK((average_vector(linear_phase_sequence(0.5, v), w) - alt).norm() < 1e-12);
    double alpha = std::sqrt(2.0) - 1.0;
    double dir = std::sin(std::numbers::pi * alpha * double(2 * n + 1)) / std::sin(std::numbers::pi * alpha);
    Vector lin = average_vector(linear_phase_sequence(alpha, v), w);
    CHECK((lin - v * (dir / double(2 * n + 1))).norm() < 1e-12);
  }
}

TEST_CASE("norm square bound") {
  Vector v = unit2();
  auto c = check_norm_square_bound(constant_sequence(v), box_window(1, 4));
  CHECK(c.lhs == doctest::Approx(81.0));
  CHECK(c.rhs == doctest::Approx(81.0));
  CHECK(c.holds);
  // Orthonormal values: f(g) = e_{g+2} on {-2..2}.
  VectorSequence ortho(5, 1.0, [](const GroupElement& g) {
    Vector e = Vector::Zero(5);
    e(g[0] + 2) = 1.0;
    return e;
  });
  auto o = check_norm_square_bound(ortho, box_window(1, 2));
  CHECK(o.lhs == doctest::Approx(5.0));
  CHECK(o.rhs == doctest::Approx(25.0));
  Rng rng(1);
  for (int t = 0; t < 100; ++t) CHECK(check_norm_square_bound(random_table(rng, 3, 8), box_window(1, 8)).holds);
}

TEST_CASE("double average bound") {
  Vector v = unit2();
  auto c = check_double_average_bound(constant_sequence(v), box_window(1, 2), box_window(1, 3));
  CHECK(c.lhs == doctest::Approx(25.0 * 49.0));
  CHECK(c.rhs == doctest::Approx(25.0 * 49.0));
  auto w = check_double_average_bound(weyl_quadratic_sequence(std::sqrt(2.0) - 1.0, v), box_window(1, 4),
                                      box_window(1, 4));
  CHECK(w.holds);
  CHECK(w.lhs < w.rhs * (1 - 1e-6));
  Rng rng(2);
  for (int t = 0; t < 100; ++t)
    CHECK(check_double_average_bound(random_table(rng, 2, 16), box_window(1, 4), box_window(1, 4)).holds);
}

TEST_CASE("difference set bound") {
  auto one = [](const GroupElement&) { return 1.0; };
  auto w = box_window(1, 3);
  auto c = check_difference_set_bound(one, w);
  CHECK(c.lhs == 49.0);
  CHECK(c.rhs == 7.0 * 13.0);
  FolnerWindow sparse(1, {GroupElement{-5}, GroupElement{0}, GroupElement{2}});
  auto s = check_difference_set_bound([](const GroupElement& h) { return double(h[0] * h[0]); }, sparse);
  // Pairs: differences 5,7,2 and negatives, squared sum 2(25+49+4)=156.
  CHECK(s.lhs == 156.0);
  CHECK(s.holds);
}

TEST_CASE("averaging gap is bounded by the folner defect") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    auto f = random_table(rng, 2, 20);
    auto gap = averaging_gap(f, box_window(1, 8), box_window(1, 3));
    CHECK(gap.holds);
    CHECK(gap.gap <= gap.bound + 1e-12);
  }
  auto c = averaging_gap(constant_sequence(unit2()), box_window(1, 5), box_window(1, 2));
  CHECK(c.gap < 1e-14);
}

TEST_CASE("van der corput report") {
  Vector v = unit2();
  auto windows = box_schedule(1, 250, 2000, 250);
  auto weyl = van_der_corput_report(weyl_quadratic_sequence(std::sqrt(2.0) - 1.0, v), windows);
  CHECK(weyl.gamma_window == 2000);
  CHECK(weyl.hypothesis_satisfied);
  CHECK(weyl.averages_vanish);
  CHECK(weyl.label == "hypothesis satisfied; averages vanish");
  for (const auto& g : weyl.gamma)
    if (g.h.is_zero()) CHECK(std::abs(g.value - 1.0) < 1e-12);

  auto lin = van_der_corput_report(linear_phase_sequence(std::sqrt(2.0) - 1.0, v), windows);
  CHECK_FALSE(lin.hypothesis_satisfied);
  CHECK(lin.label == "hypothesis not satisfied; conclusion not implied");
  for (const auto& p : lin.difference_set_statistic) CHECK(p.value >= 1.9);
  CHECK(lin.averages_vanish);

  auto cst = van_der_corput_report(constant_sequence(v), windows);
  CHECK_FALSE(cst.hypothesis_satisfied);
  CHECK_FALSE(cst.averages_vanish);
  for (const auto& p : cst.averages) CHECK(std::abs(p.value - 1.0) < 1e-12);
}
