#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "eie/config.hpp"

namespace eie {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  /// Files written, relative to the output directory, in creation order.
  std::vector<std::string> files;
  /// Contents of the command's summary JSON.
  nlohmann::json summary;
};

/// Runs one command with a resolved configuration, writing into
/// config.output.dir. Progress goes to `log`. Throws ConfigError for problems
/// only detectable at run time (for example a missing samples file).
RunOutcome run_command(Command command, const ExperimentConfig& config, std::ostream& log);

/// Plot and KDE window covering the mixture: center bounding box padded by
/// max(4 std, 1).
GridExtent default_extent(const MixtureSpec& spec);

/// Generator outputs for n fresh standard normal inputs.
SampleBatch generate_samples(const MlpModel& generator, int n, Rng& rng);

}  // namespace eie
