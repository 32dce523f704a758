#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace orlicz::runner {

enum ExitCode : int {
  kOk = 0,
  kCertificateFailure = 2,
  kNonConvergence = 3,
  kConfigError = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

const std::vector<std::string>& commands();

struct Experiment {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = kDefaultSeed;
};

/// A config file holds one experiment object or an array of them:
///   {"command": "psi", "params": {...}, "seed": 7}
/// "command" may be omitted (the CLI command applies) but must match if given.
/// seed_override (from --seed) wins over any per-entry seed.
/// Throws ConfigError; every entry's params are checked before returning.
std::vector<Experiment> parse_experiments(const std::string& command, const nlohmann::json& config,
                                          std::optional<std::uint64_t> seed_override);

/// Runs one experiment into dir (created) and returns its exit code.
/// Writes manifest.json, summary.txt and the command's CSV files.
int run_experiment(const Experiment& ex, const std::filesystem::path& dir, int threads,
                   std::ostream& log);

struct Invocation {
  std::string command;
  std::optional<std::filesystem::path> config;  ///< optional only for acceptance
  std::filesystem::path out = "out";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

/// Parses the config, then runs every experiment (concurrently up to jobs).
/// A single experiment writes into out; a list writes into out/NNN-command.
/// Returns the most severe exit code. Nothing is written if parsing fails.
int run(const Invocation& inv, std::ostream& log);

}  // namespace orlicz::runner
