#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "ergodix/io.hpp"
#include "ergodix/random.hpp"

using namespace ergodix;

TEST_CASE("doubles round-trip through text") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    double x = std::ldexp(random_uniform(rng, -1.0, 1.0), int(random_int(rng, -300, 300)));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("matrix json round trip is exact") {
  Rng rng(2);
  Matrix m = random_matrix(rng, 3, 2);
  Json j = matrix_to_json(m);
  CHECK(j.size() == 3);
  CHECK(j[0].size() == 2);
  CHECK(j[0][0].size() == 2);
  Matrix back = matrix_from_json(Json::parse(j.dump()));
  CHECK(back == m);
  Vector v = random_vector(rng, 4);
  CHECK(vector_from_json(Json::parse(vector_to_json(v).dump())) == v);
  Complex z(1.5, -2.25);
  CHECK(complex_from_json(complex_to_json(z)) == z);
  CHECK(complex_from_json(Json(3.0)) == Complex(3.0, 0.0));
  CHECK_THROWS(matrix_from_json(Json::parse("[[1,2],[3]]")));
}

TEST_CASE("group elements") {
  GroupElement g{3, -4};
  CHECK(element_from_json(element_to_json(g), 2) == g);
  CHECK(element_from_json(Json(5), 1) == GroupElement{5});
  CHECK_THROWS(element_from_json(Json::parse("[1,2,3]"), 2));
}

TEST_CASE("csv layout") {
  std::vector<StatisticPoint> pts{{1, 3, 1.0 / 3.0}, {2, 5, 0.2}};
  CHECK(statistic_csv(pts) == "n,window_size,value\n1,3,0.33333333333333331\n2,5,0.20000000000000001\n");
  CHECK(table_csv({"a", "b"}, {{1.0, 0.5}}) == "a,b\n1,0.5\n");
}

TEST_CASE("reports carry the schema tag") {
  Json r = report_object();
  CHECK(r.begin().key() == "schema");
  CHECK(r["schema"] == kSchema);
  MixingStatistic s;
  s.per_window = {{1, 3, 0.5}};
  s.verdict = Verdict::decaying;
  Json j = to_json(s);
  CHECK(j["verdict"] == "decaying");
}

TEST_CASE("text files") {
  auto dir = std::filesystem::temp_directory_path() / "ergodix_io_test";
  std::filesystem::remove_all(dir);
  write_text(dir / "sub" / "x.txt", "hello\n");
  CHECK(read_text(dir / "sub" / "x.txt") == "hello\n");
  CHECK_THROWS(read_text(dir / "missing.txt"));
  std::filesystem::remove_all(dir);
}
