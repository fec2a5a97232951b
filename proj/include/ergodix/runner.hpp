#pragma once

// Config-driven experiment runner behind the command-line tool. Each
// subcommand reads one JSON config, writes CSV/JSON artifacts into an output
// directory and reports the invariants it asserted.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ergodix/io.hpp"
#include "ergodix/systems.hpp"

namespace ergodix {

struct RunOptions {
  std::string command;
  Json config;
  std::filesystem::path out_dir = ".";
  /// Overrides the config's "seed".
  std::optional<std::uint64_t> seed;
  /// Worker threads; 0 leaves the current setting.
  std::size_t threads = 0;
};

struct RunResult {
  /// 0 when every asserted invariant passed, 1 otherwise.
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> failures;
};

const std::vector<std::string>& subcommands();

/// Throws ConfigError on schema violations (unknown keys, missing or
/// mistyped fields, a randomized run without a seed).
RunResult run(const RunOptions& options);

/// Command-line entry point: exit 2 on configuration errors, 1 on invariant
/// failures (with failures.json in the output directory), 0 otherwise.
int cli_main(int argc, char** argv);

System parse_system(const Json& j, std::optional<std::uint64_t> seed = std::nullopt);
Observable parse_observable(const System& sys, const Json& j);
WindowSchedule parse_windows(const Json& j, std::size_t q);
Homomorphism parse_hom(const Json& j, std::size_t q);

}  // namespace ergodix
