#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include "ergodix/error.hpp"
#include "ergodix/runner.hpp"

using namespace ergodix;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = ERGODIX_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "ergodix_runner_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunResult run_config(const std::string& file, const fs::path& out, std::size_t threads = 1) {
  Json cfg = Json::parse(read_text(kConfigs / file));
  RunOptions o;
  o.command = cfg.at("command").get<std::string>();
  o.config = cfg;
  o.out_dir = out;
  o.threads = threads;
  return run(o);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_text(e.path());
  return files;
}

int cli(const std::string& args) {
  const char* exe = std::getenv("ERGODIX_CLI");
  REQUIRE(exe != nullptr);
  std::string cmd = std::string(exe) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("every shipped config runs cleanly") {
  for (const auto& e : fs::directory_iterator(kConfigs)) {
    if (e.path().filename() == "invariants.json") continue;  // exercised by the acceptance run
    CAPTURE(e.path().filename().string());
    auto out = scratch("all_" + e.path().stem().string());
    auto r = run_config(e.path().filename().string(), out);
    CHECK(r.exit_code == 0);
    CHECK(r.failures.empty());
    CHECK_FALSE(r.artifacts.empty());
    CHECK_FALSE(fs::exists(out / "failures.json"));
  }
}

TEST_CASE("split artifacts") {
  auto out = scratch("split");
  run_config("split_clock_shift_3.json", out);
  Json j = Json::parse(read_text(out / "split.json"));
  CHECK(j["schema"] == "ergodix/1");
  CHECK(j["dim_H1"] == 1);
  CHECK(j["dim_H0"] == 9);
  CHECK(j["factor_dim"] == 9);
  CHECK(j["verdict"] == "has-nontrivial-compact-factor");
  CHECK(j["double_commutant_dim"] == 9);
  auto rot = scratch("split_rot");
  run_config("split_rotation.json", rot);
  Json r = Json::parse(read_text(rot / "split.json"));
  CHECK(r["dim_H1"] == 5);
  CHECK(r["ergodic"] == false);
}

TEST_CASE("outputs are byte-identical across thread counts and reruns") {
  for (std::string file : {"folner_q2.json", "mix_random.json", "higher_k3.json", "vdc_linear.json",
                           "compact_z3.json", "split_clock_shift_5.json", "szemeredi_lattice.json"}) {
    CAPTURE(file);
    auto a = scratch("det1_" + file), b = scratch("det8_" + file), c = scratch("det1b_" + file);
    run_config(file, a, 1);
    run_config(file, b, 8);
    run_config(file, c, 1);
    auto sa = snapshot(a);
    CHECK(sa == snapshot(b));
    CHECK(sa == snapshot(c));
  }
}

TEST_CASE("schema violations are configuration errors") {
  auto out = scratch("bad");
  RunOptions o;
  o.out_dir = out;
  o.command = "split";
  o.config = Json::parse(R"({"system": {"kind": "clock_shift", "p": 1, "Q": 3}, "bogus": 1})");
  CHECK_THROWS_AS(run(o), ConfigError);
  o.config = Json::parse(R"({"system": {"kind": "clock_shift", "p": 1, "Q": 3, "extra": 0}})");
  CHECK_THROWS_AS(run(o), ConfigError);
  o.config = Json::parse(R"({"system": {"kind": "random", "N": 3}})");
  CHECK_THROWS_AS(run(o), ConfigError);  // no seed
  o.command = "invariants";
  o.config = Json::parse(R"({})");
  CHECK_THROWS_AS(run(o), ConfigError);
  o.command = "folner";
  o.config = Json::parse(R"({"windows": {"n_min": 0, "n_max": 3}})");
  CHECK_THROWS_AS(run(o), ConfigError);
  o.config = Json::parse(R"({"command": "mix", "windows": {"n_min": 1, "n_max": 3}})");
  CHECK_THROWS_AS(run(o), ConfigError);
  o.command = "nonsense";
  o.config = Json::object();
  CHECK_THROWS_AS(run(o), ConfigError);
}

TEST_CASE("seeded randomized runs depend on the seed only") {
  Json cfg = Json::parse(read_text(kConfigs / "mix_random.json"));
  RunOptions o;
  o.command = "mix";
  o.config = cfg;
  auto a = scratch("seed_a"), b = scratch("seed_b");
  o.out_dir = a;
  o.seed = 11;
  run(o);
  o.out_dir = b;
  o.seed = 12;
  run(o);
  CHECK(snapshot(a) != snapshot(b));
}

TEST_CASE("parsers") {
  CHECK(parse_hom(Json(3), 2) == Homomorphism::scalar(2, 3));
  CHECK(parse_hom(Json::parse("[[1, 2], [0, 1]]"), 2) == Homomorphism(2, {1, 2, 0, 1}));
  CHECK_THROWS_AS(parse_hom(Json::parse("[[1, 2]]"), 2), ConfigError);
  auto w = parse_windows(Json::parse(R"({"n_values": [3, 5]})"), 1);
  REQUIRE(w.size() == 2);
  CHECK(w[1].size() == 11);
  auto s = parse_windows(Json::parse(R"({"shape": "box", "n_min": 2, "n_max": 10, "stride": 4})"), 2);
  CHECK(s.size() == 3);
  System sys = parse_system(Json::parse(R"({"kind": "shift", "q": 1, "d": 2})"));
  CHECK_FALSE(sys.is_finite());
  Observable z = parse_observable(sys, Json::parse(R"({"pauli": "Z", "sites": [0]})"));
  CHECK(std::abs(sys.state(sys.product(z, z)) - 1.0) < 1e-15);
  CHECK_THROWS_AS(parse_observable(sys, Json::parse(R"({"pauli": "Z", "sites": [0], "x": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_system(Json::parse(R"({"kind": "warp"})")), ConfigError);
}

TEST_CASE("command-line exit codes") {
  auto out = scratch("cli");
  auto cfg = (kConfigs / "split_clock_shift_2.json").string();
  CHECK(cli("split --config " + cfg + " --out " + (out / "ok").string()) == 0);
  CHECK(fs::exists(out / "ok" / "split.json"));
  CHECK(cli("split --config " + cfg + " --out " + (out / "t").string() + " --threads 8") == 0);
  CHECK(read_text(out / "ok" / "split.json") == read_text(out / "t" / "split.json"));

  write_text(out / "unknown.json", R"({"system": {"kind": "clock_shift", "p": 1, "Q": 2}, "surprise": true})");
  CHECK(cli("split --config " + (out / "unknown.json").string() + " --out " + out.string()) == 2);
  write_text(out / "broken.json", "{ not json");
  CHECK(cli("split --config " + (out / "broken.json").string()) == 2);
  CHECK(cli("split --config " + (out / "missing.json").string()) == 2);
  CHECK(cli("teleport --config " + cfg) == 2);
  CHECK(cli("split") == 2);
  write_text(out / "nf.json", R"({"system": {"kind": "finite", "generators": [[[[1,0],[0,0]],[[0,0],[1,0]]]],
                                   "state": {"kind": "basis", "index": 0}}})");
  CHECK(cli("split --config " + (out / "nf.json").string() + " --out " + out.string()) == 2);

  // A grouping tolerance wider than the spectrum merges distinct eigenvalues;
  // the residual check then fails and the run reports it.
  write_text(out / "wide.json", R"({"system": {"kind": "clock_shift", "p": 1, "Q": 3}, "tolerance": 10.0})");
  CHECK(cli("split --config " + (out / "wide.json").string() + " --out " + (out / "wide").string()) == 1);
  CHECK(fs::exists(out / "wide" / "failures.json"));
}
