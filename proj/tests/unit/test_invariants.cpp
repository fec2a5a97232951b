#include <doctest.h>

#include <map>

#include "ergodix/invariants.hpp"

using namespace ergodix;

TEST_CASE("every suite passes with the default trial counts") {
  auto results = run_invariant_suites(12345);
  REQUIRE(results.size() == suite_names().size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CHECK(r.failures == 0);
    CHECK(r.first_failure.empty());
    CHECK(r.trials == (r.name == "norm_square" || r.name == "double_average" || r.name == "difference_set"
                           ? 1000u
                           : 100u));
  }
}

TEST_CASE("suites are reproducible and independent of each other") {
  std::map<std::string, std::size_t> few;
  for (const auto& n : suite_names()) few[n] = 5;
  auto a = run_invariant_suites(7, few);
  auto b = run_invariant_suites(7, few);
  few["norm_square"] = 0;
  auto c = run_invariant_suites(7, few);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].worst == b[i].worst);
    if (a[i].name != "norm_square") CHECK(a[i].worst == c[i].worst);
  }
  CHECK(c[0].trials == 0);
}
