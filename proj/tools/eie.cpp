#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "eie/commands.hpp"
#include "eie/io.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool timing = false;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "Seed (overrides the config)");
  sub->add_option("--out", opts.out_dir, "Output directory (overrides the config)");
  sub->add_flag("--timing", opts.timing, "Record wall-clock times in the training history");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic interaction energy experiments: training, particle flow, spectral rates, evaluation"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string samples;
  std::optional<int> probe_n, probe_m;
  std::optional<double> probe_R, probe_Rs, probe_eps;
  std::vector<double> probe_r;

  struct Entry {
    eie::Command command;
    const char* help;
  };
  const Entry entries[] = {
      {eie::Command::gan_train, "Train the generator against the elastic discriminator"},
      {eie::Command::eieg_train, "Train the generator directly on the data-space energy"},
      {eie::Command::flow, "Run the interacting-particle sampler"},
      {eie::Command::spectral, "Measure linear growth rates of the continuum flows"},
      {eie::Command::eval, "Mode coverage and KDE of a samples CSV"},
      {eie::Command::kernel_probe, "Tabulate kernel values and slopes"},
  };
  std::vector<std::pair<CLI::App*, eie::Command>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(eie::to_string(e.command), e.help);
    add_common(sub, opts);
    subs.emplace_back(sub, e.command);
    if (e.command == eie::Command::eval) {
      sub->add_option("--samples", samples, "Samples CSV (overrides eval.samples)");
    }
    if (e.command == eie::Command::kernel_probe) {
      sub->add_option("--n", probe_n, "Elastic kernel dimension n");
      sub->add_option("--R", probe_R, "Elastic cutoff radius");
      sub->add_option("--m", probe_m, "Stabilizer order m");
      sub->add_option("--Rs", probe_Rs, "Stabilizer cutoff radius");
      sub->add_option("--eps", probe_eps, "Stabilizer weight");
      sub->add_option("--r", probe_r, "Radii to tabulate")->delimiter(',');
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? eie::kExitOk : eie::kExitConfigError;
  }

  eie::Command command = eie::Command::gan_train;
  for (const auto& [sub, cmd] : subs) {
    if (sub->parsed()) command = cmd;
  }

  eie::ExperimentConfig config;
  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!opts.config_path.empty()) {
      try {
        doc = eie::io::read_json(opts.config_path);
      } catch (const nlohmann::json::exception& e) {
        throw eie::ConfigError(opts.config_path + ": " + e.what());
      }
    }
    config = eie::parse_config(doc, command);
    if (opts.seed) config.seed = *opts.seed;
    if (!opts.out_dir.empty()) config.output.dir = opts.out_dir;
    if (opts.timing) config.output.record_wall_time = true;
    if (!samples.empty()) config.eval.samples = samples;
    auto& probe = config.kernel_probe;
    if (probe_n) probe.kernel.dim_n = *probe_n;
    if (probe_R) probe.kernel.cutoff_R = *probe_R;
    if (probe_m) probe.stabilizer.order_m = *probe_m;
    if (probe_Rs) probe.stabilizer.cutoff_Rs = *probe_Rs;
    if (probe_eps) probe.stabilizer.weight_eps = *probe_eps;
    if (!probe_r.empty()) probe.radii = probe_r;
    // Re-validate after command-line overrides.
    config = eie::parse_config(eie::config_echo(config, command), command);
  } catch (const eie::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return eie::kExitConfigError;
  }

  try {
    const eie::RunOutcome outcome = eie::run_command(command, config, std::cout);
    std::cout << "wrote";
    for (const auto& f : outcome.files) std::cout << ' ' << f;
    std::cout << " to " << config.output.dir << '\n';
    return outcome.exit_code;
  } catch (const eie::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return eie::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return eie::kExitFailure;
  }
}
