#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace orlicz::acceptance {

struct Options {
  std::uint64_t seed = 20240611;
  /// Reduced tier: grids shrunk 4x, sample counts cut, tolerances loosened.
  bool smoke = false;

  /// Reads ORLICZ_VAR_SMOKE=1 from the environment.
  static Options from_environment(std::uint64_t seed);
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string measured;   ///< measured values against their tolerances
  double seconds = 0.0;
  double limit_seconds = 0.0;

  std::string line() const;
};

constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const Options& options);

std::vector<CriterionResult> run_all(const Options& options,
                                     const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace orlicz::acceptance
