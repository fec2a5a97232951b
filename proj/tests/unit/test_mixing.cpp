#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ergodix/error.hpp"
#include "ergodix/mixing.hpp"
#include "ergodix/random.hpp"

using namespace ergodix;

namespace {

Observable site_pauli(std::int64_t site, const char* letter) {
  return LocalObservable::pauli(1, {GroupElement{site}}, letter);
}

// Σ_{g=-n}^{n} e^{2πi θ g}, which is real.
double dirichlet(double theta, std::int64_t n) {
  return std::sin(std::numbers::pi * theta * double(2 * n + 1)) / std::sin(std::numbers::pi * theta);
}

}  // namespace

TEST_CASE("classification rule") {
  std::vector<StatisticPoint> decay, flat, mid;
  for (int n = 1; n <= 40; ++n) {
    decay.push_back({n, std::size_t(2 * n + 1), 1.0 / (n * n)});
    flat.push_back({n, std::size_t(2 * n + 1), 1.0});
    mid.push_back({n, std::size_t(2 * n + 1), 0.2});
  }
  mid.front().value = 1.0;
  CHECK(classify(decay).verdict == Verdict::decaying);
  CHECK(classify(flat).verdict == Verdict::non_decaying);
  CHECK(classify(mid).verdict == Verdict::inconclusive);
  std::vector<StatisticPoint> zero{{1, 3, 0.0}, {2, 5, 0.0}};
  CHECK(classify(zero).verdict == Verdict::decaying);
  CHECK(to_string(Verdict::non_decaying) == "non-decaying");
}

TEST_CASE("shift system exact weak mixing law") {
  System sys(shift_system(1, 2));
  auto z = site_pauli(0, "Z");
  // 1/(2n+1) falls below 5% of its first value 1/3 once n > 29.5, so the
  // tail of n <= 50 is needed for a decaying verdict.
  auto windows = box_schedule(1, 1, 50);
  auto wm = weak_mixing_defect(sys, z, z, Homomorphism::identity(1), windows);
  auto sq = square_defect(sys, z, z, Homomorphism::identity(1), windows);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    double exact = 1.0 / double(2 * windows[i].index() + 1);
    CHECK(std::abs(wm.per_window[i].value - exact) < 1e-12);
    CHECK(std::abs(sq.per_window[i].value - exact) < 1e-12);
  }
  CHECK(wm.verdict == Verdict::decaying);
  CHECK(sq.verdict == wm.verdict);
  auto avg = ergodic_average(sys, z, z, Homomorphism::identity(1), windows);
  for (const auto& p : avg.per_window) CHECK(std::abs(p.value - 1.0 / double(2 * p.n + 1)) < 1e-12);
}

TEST_CASE("b = 1 gives constant averages and zero defect") {
  System sys(rotation_algebra_system(1, 5));
  Observable v = sys.finite().named().at("V");
  Observable one = sys.identity();
  auto windows = box_schedule(1, 1, 8);
  auto avg = ergodic_average(sys, v, one, Homomorphism::identity(1), windows);
  for (const auto& p : avg.per_window) CHECK(std::abs(p.value - sys.state(v)) < 1e-14);
  for (const auto& p : weak_mixing_defect(sys, v, one, Homomorphism::identity(1), windows).per_window)
    CHECK(p.value < 1e-14);
  for (const auto& p : asymptotic_abelianness(sys, v, one, Homomorphism::identity(1), windows).per_window)
    CHECK(p.value < 1e-14);
}

TEST_CASE("rotation averages follow the geometric-sum oracle") {
  for (auto [p, Q] : std::vector<std::pair<int, int>>{{1, 5}, {2, 7}}) {
    System sys(rotation_algebra_system(p, Q));
    Matrix V = sys.finite().named().at("V");
    Observable a = Matrix(V.adjoint()), b = V;
    auto windows = box_schedule(1, 1, 25);
    auto avg = ergodic_average(sys, a, b, Homomorphism::identity(1), windows);
    for (const auto& pt : avg.per_window) {
      double want = dirichlet(double(p) / Q, pt.n) / double(2 * pt.n + 1);
      CHECK(std::abs(pt.value - want) < 1e-12);
    }
    auto wm = weak_mixing_defect(sys, a, b, Homomorphism::identity(1), windows);
    for (const auto& pt : wm.per_window) CHECK(std::abs(pt.value - 1.0) < 1e-12);
    CHECK(wm.verdict == Verdict::non_decaying);
    CHECK(square_defect(sys, a, b, Homomorphism::identity(1), windows).verdict == Verdict::non_decaying);
  }
}

TEST_CASE("asymptotic abelianness") {
  System lat(shift_system(1, 2));
  auto windows = box_schedule(1, 1, 12);
  auto st = asymptotic_abelianness(lat, site_pauli(0, "Z"), site_pauli(0, "X"), Homomorphism::identity(1),
                                   windows);
  for (const auto& p : st.per_window) CHECK(std::abs(p.value - 2.0 / double(2 * p.n + 1)) < 1e-12);
  System rot(rotation_algebra_system(1, 2));
  Observable u = rot.finite().named().at("U"), v = rot.finite().named().at("V");
  auto r = asymptotic_abelianness(rot, u, v, Homomorphism::identity(1), windows);
  for (const auto& p : r.per_window) CHECK(std::abs(p.value - 2.0) < 1e-12);
  CHECK(r.verdict == Verdict::non_decaying);
}

TEST_CASE("product-system integrand equals squared correlation") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto base = random_finite_system(rng, 3, 1, trial % 2 == 1);
    System sys(base);
    System prod(product_system(base));
    Matrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
    Observable aa = tensor(a, conjugate_lift(a)), bb = tensor(b, conjugate_lift(b));
    Observable oa = a, ob = b;
    for (std::int64_t g = -4; g <= 4; ++g) {
      HigherOrderSpec s1{{oa, ob}, {Homomorphism::identity(1)}};
      HigherOrderSpec s2{{aa, bb}, {Homomorphism::identity(1)}};
      Complex c = multi_correlation(sys, s1, GroupElement{g});
      Complex cc = multi_correlation(prod, s2, GroupElement{g});
      CHECK(std::abs(cc - std::norm(c)) < 1e-10 * (1 + std::norm(c)));
    }
  }
}

TEST_CASE("multi-correlation matches explicit matrix products") {
  Rng rng(5);
  auto base = random_finite_system(rng, 3, 2, false);
  System sys(base);
  std::vector<Observable> obs;
  std::vector<Matrix> mats;
  for (int j = 0; j < 3; ++j) {
    mats.push_back(random_matrix(rng, 3, 3));
    obs.push_back(mats.back());
  }
  HigherOrderSpec spec{obs, {Homomorphism::scalar(2, 1), Homomorphism(2, {0, 1, 1, 0})}};
  GroupElement g{2, -1};
  Matrix prod = mats[0] * base.act(mats[1], g) * base.act(mats[2], GroupElement{-1, 2});
  CHECK(std::abs(multi_correlation(sys, spec, g) - base.state()(prod)) < 1e-10);
}

TEST_CASE("spec validation") {
  System sys(shift_system(1, 2));
  auto z = site_pauli(0, "Z");
  HigherOrderSpec dup{{z, z, z}, {Homomorphism::scalar(1, 2), Homomorphism::scalar(1, 2)}};
  CHECK_THROWS_AS(dup.validate(sys), InvalidArgument);
  HigherOrderSpec count{{z, z}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 2)}};
  CHECK_THROWS_AS(count.validate(sys), InvalidArgument);
  HigherOrderSpec rank{{z, z}, {Homomorphism::scalar(2, 1)}};
  CHECK_THROWS_AS(rank.validate(sys), InvalidArgument);
}

TEST_CASE("higher-order defect on the shift system") {
  System sys(shift_system(1, 2));
  auto z = site_pauli(0, "Z");
  auto windows = box_schedule(1, 1, 50);
  // k = 1 reduces to the weak-mixing defect.
  HigherOrderSpec k1{{z, z}, {Homomorphism::identity(1)}};
  auto h1 = higher_order_defect(sys, k1, windows);
  auto w1 = weak_mixing_defect(sys, z, z, Homomorphism::identity(1), windows);
  for (std::size_t i = 0; i < windows.size(); ++i) CHECK(h1.per_window[i].value == w1.per_window[i].value);

  // k = 2: σ_z³ = σ_z, so even g = 0 contributes nothing.
  HigherOrderSpec k2{{z, z, z}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 2)}};
  auto h2 = higher_order_defect(sys, k2, windows);
  for (const auto& p : h2.per_window) CHECK(p.value == 0.0);

  HigherOrderSpec k3{{z, z, z, z},
                     {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 2), Homomorphism::scalar(1, 3)}};
  auto h3 = higher_order_defect(sys, k3, windows);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(std::abs(h3.per_window[i].value - 1.0 / double(2 * windows[i].index() + 1)) < 1e-12);
    auto cb = collision_bound(sys, k3, windows[i]);
    CHECK(h3.per_window[i].value <= cb.constant / double(windows[i].size()) + 1e-12);
    REQUIRE(cb.collisions.size() == 1);
    CHECK(cb.collisions[0] == GroupElement{0});
  }
  CHECK(h3.verdict == Verdict::decaying);

  auto one = sys.identity();
  HigherOrderSpec ones{{one, one, one}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, -1)}};
  for (const auto& p : higher_order_defect(sys, ones, windows).per_window) CHECK(p.value == 0.0);
}

TEST_CASE("higher-order defect with two-site observables obeys the collision bound") {
  System sys(shift_system(1, 2));
  Observable a = LocalObservable::pauli(1, {GroupElement{0}, GroupElement{1}}, "XZ");
  QuasiLocalSystem ql(1, 2);
  Observable p = ql.combine(0.5, ql.identity(), 0.5, LocalObservable::pauli(1, {GroupElement{0}}, "Z"));
  HigherOrderSpec spec{{p, a, a}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 3)}};
  for (const auto& w : box_schedule(1, 1, 15)) {
    auto st = higher_order_defect(sys, spec, {w});
    auto cb = collision_bound(sys, spec, w);
    CHECK(st.per_window[0].value <= cb.constant / double(w.size()) + 1e-12);
  }
}

TEST_CASE("gamma sequence") {
  System sys(shift_system(1, 2));
  auto z = site_pauli(0, "Z");
  HigherOrderSpec k1{{z, z}, {Homomorphism::identity(1)}};
  auto entries = gamma_sequence(sys, k1, box_window(1, 10), box_window(1, 3));
  REQUIRE(entries.size() == 7);
  for (const auto& e : entries) {
    Complex want = e.h.is_zero() ? 1.0 : 0.0;
    CHECK(std::abs(e.closed_form - want) < 1e-14);
    CHECK(std::abs(e.empirical - want) < 1e-14);
  }
  auto one = sys.identity();
  HigherOrderSpec ones{{one, one}, {Homomorphism::identity(1)}};
  CHECK(std::abs(gamma_closed_form(sys, ones, GroupElement{0})) < 1e-15);

  // k = 2 with a two-site observable: differences stay within the boundary bound.
  Observable a = LocalObservable::pauli(1, {GroupElement{0}, GroupElement{1}}, "XY");
  HigherOrderSpec k2{{one, a, z}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 2)}};
  for (const auto& e : gamma_sequence(sys, k2, box_window(1, 12), box_window(1, 4))) {
    REQUIRE(e.boundary_bound.has_value());
    CHECK(e.difference <= *e.boundary_bound + 1e-12);
  }
}

TEST_CASE("gamma sequence on finite systems converges to the closed form") {
  System sys(rotation_algebra_system(1, 5));
  Matrix U = sys.finite().named().at("U"), V = sys.finite().named().at("V");
  Observable u = U, v = V;
  HigherOrderSpec spec{{sys.identity(), v, u}, {Homomorphism::scalar(1, 1), Homomorphism::scalar(1, 2)}};
  // U is invariant and V picks up a phase, so ⟨u_g, u_{g+h}⟩ is independent of g.
  for (const auto& e : gamma_sequence(sys, spec, box_window(1, 6), box_window(1, 2)))
    CHECK(e.difference < 1e-9);
}

TEST_CASE("density limit check") {
  auto windows = box_schedule(1, 1, 200, 5);
  auto zero = density_limit_check([](const GroupElement&) { return 0.0; }, windows, {0.5});
  CHECK(zero.average_vanishes);
  CHECK(zero.densities_vanish);
  CHECK(zero.consistent);
  auto sq = MembershipSet::squares();
  auto squares = density_limit_check([&](const GroupElement& g) { return sq(g) ? 1.0 : 0.0; }, windows,
                                     {1.0, 0.5});
  CHECK(squares.average_vanishes);
  CHECK(squares.densities_vanish);
  CHECK(squares.consistent);
  auto ones = density_limit_check([](const GroupElement&) { return 1.0; }, windows, {0.5});
  CHECK_FALSE(ones.average_vanishes);
  CHECK_FALSE(ones.densities_vanish);
  CHECK(ones.consistent);
  CHECK(ones.levels[0].densities.back().value == 1.0);
}

TEST_CASE("weak mixing verdict is stable under shifted windows") {
  System sys(shift_system(1, 2));
  auto z = site_pauli(0, "Z");
  WindowSchedule shifted;
  for (const auto& w : box_schedule(1, 1, 30)) shifted.push_back(shift_window(w, GroupElement{w.index() % 4}));
  auto a = weak_mixing_defect(sys, z, z, Homomorphism::identity(1), box_schedule(1, 1, 30));
  auto b = weak_mixing_defect(sys, z, z, Homomorphism::identity(1), shifted);
  CHECK(a.verdict == b.verdict);
}
