#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eie/datasets.hpp"
#include "eie/evalmetrics.hpp"
#include "eie/flow.hpp"
#include "eie/kernels.hpp"
#include "eie/spectral.hpp"
#include "eie/trainer.hpp"

namespace eie {

enum class Command { gan_train, eieg_train, flow, spectral, eval, kernel_probe };

Command command_from_string(const std::string& name);
std::string to_string(Command command);

/// Raised for malformed, unknown or out-of-range configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSettings {
  std::string preset;
  MixtureSpec spec;
};

struct EvalSettings {
  int num_samples = 2000;
  double threshold_sigmas = 4.0;
  int kde_resolution = 100;
  /// Plot and KDE window; derived from the mixture when absent.
  std::optional<GridExtent> extent;
  /// Input samples for the eval command.
  std::string samples;
};

struct SpectralProbe {
  spectral::FlowKind kind = spectral::FlowKind::generator;
  double epsilon = 0.0;
};

struct SpectralSettings {
  int grid = 64;
  double level = 1.0;
  double amplitude = 1e-3;
  std::int64_t steps = 200;
  /// 0 selects a step from the fastest relevant linear rate.
  double dt = 0.0;
  spectral::Integrator integrator = spectral::Integrator::exponential_euler;
  double stop_amplitude = 1e-2;
  double contamination_limit = 0.1;
  std::vector<std::pair<int, int>> modes{{1, 0}, {2, 0}};
  std::vector<SpectralProbe> probes{
      {spectral::FlowKind::generator, 0.0},
      {spectral::FlowKind::discriminator_raw, 0.0},
      {spectral::FlowKind::discriminator_stabilized, 1.0},
      {spectral::FlowKind::discriminator_stabilized, 0.2},
      {spectral::FlowKind::discriminator_stabilized, 0.05},
  };
};

struct KernelProbeSettings {
  KernelConfig kernel{2, 0.1};
  StabilizerConfig stabilizer{3, 0.8, 1.0};
  std::vector<double> radii{0.05, 0.1, 0.25, 0.5, 0.8, 1.0, 2.0};
};

struct OutputSettings {
  std::string dir = "out";
  bool svg = true;
  bool record_wall_time = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  DatasetSettings dataset;
  TrainConfig train;
  FlowConfig flow;
  SpectralSettings spectral;
  EvalSettings eval;
  KernelProbeSettings kernel_probe;
  OutputSettings output;
};

/// Defaults for a command: grid25 for training and eval, two_mode for the flow.
ExperimentConfig default_config(Command command);

/// Overlays a JSON document on the command defaults. Every object is checked
/// for unknown keys; values are range-checked. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, Command command);

/// Fully resolved configuration as JSON; parse_config(config_echo(c)) == c.
nlohmann::json config_echo(const ExperimentConfig& config, Command command);

}  // namespace eie
