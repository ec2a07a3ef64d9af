#include "eie/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "eie/io.hpp"
#include "eie/net.hpp"

namespace eie {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kDataColor = "#1f77b4";
constexpr const char* kModelColor = "#d62728";

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) { fs::create_directories(root_); }

  fs::path operator()(const std::string& name, RunOutcome& outcome) const {
    outcome.files.push_back(name);
    return root_ / name;
  }

 private:
  fs::path root_;
};

json abort_json(const std::optional<AbortRecord>& abort) {
  if (!abort) return nullptr;
  return {{"step", abort->step}, {"phase", abort->phase}, {"reason", abort->reason}};
}

RunOutcome run_training(Command command, const ExperimentConfig& c, std::ostream& log) {
  RunOutcome outcome;
  const OutputDir out(c.output.dir);
  const WallClock clock = c.output.record_wall_time ? steady_wall_clock() : zero_wall_clock();
  const DataSampler sampler = mixture_sampler(c.dataset.spec);
  Rng rng(c.seed);
  log << to_string(command) << ": " << c.train.generator_steps << " generator steps on '"
      << c.dataset.preset << "' (seed " << c.seed << ")\n";
  const TrainResult result = command == Command::gan_train
                                 ? train_gan(c.train, sampler, rng, clock)
                                 : train_eieg_generator(c.train, sampler, rng, clock);
  Rng sample_rng(rng.split());
  Rng data_rng(rng.split());

  io::write_history_csv(out("history.csv", outcome), result.history);
  if (c.train.snapshot_every > 0) io::write_snapshots_csv(out("snapshots.csv", outcome), result.history.snapshots());

  json& summary = outcome.summary;
  summary["command"] = to_string(command);
  summary["config"] = config_echo(c, command);
  summary["steps_completed"] = result.history.counters.generator_updates;
  summary["abort"] = abort_json(result.abort);
  if (!result.history.records().empty()) {
    summary["final_loss_d"] = result.history.records().back().loss_d;
    summary["final_loss_g"] = result.history.records().back().loss_g;
  }
  if (result.aborted()) {
    log << "training aborted at step " << result.abort->step << " (" << result.abort->phase
        << "): " << result.abort->reason << '\n';
    summary["coverage"] = nullptr;
    io::write_json(out("coverage.json", outcome), summary);
    outcome.exit_code = kExitNumericalAbort;
    return outcome;
  }

  const SampleBatch generated = generate_samples(result.generator, c.eval.num_samples, sample_rng);
  const SampleBatch data = sample(c.dataset.spec, static_cast<std::size_t>(c.eval.num_samples), data_rng);
  io::write_samples_csv(out("samples.csv", outcome), generated);
  save_mlp(result.generator, out("generator.ckpt", outcome).string());
  if (result.discriminator) {
    save_mlp(*result.discriminator, out("discriminator.ckpt", outcome).string());
    summary["real_feature_spread"] = mean_pairwise_distance(mlp_forward(*result.discriminator, data));
  }
  const CoverageReport report = mode_coverage(generated, c.dataset.spec, c.eval.threshold_sigmas);
  summary["coverage"] = io::to_json(report);
  summary["generated_spread"] = mean_pairwise_distance(generated);
  summary["data_spread"] = mean_pairwise_distance(data);
  io::write_json(out("coverage.json", outcome), summary);
  if (c.output.svg && c.dataset.spec.dim() == 2) {
    io::write_svg_scatter(out("scatter.svg", outcome),
                          {{data, kDataColor, "data"}, {generated, kModelColor, "generated"}},
                          c.eval.extent.value_or(default_extent(c.dataset.spec)),
                          to_string(command) + " seed " + std::to_string(c.seed));
  }
  log << "modes hit " << report.modes_hit << '/' << report.modes_total << ", high-quality fraction "
      << report.high_quality_fraction << '\n';
  return outcome;
}

RunOutcome run_flow_command(const ExperimentConfig& c, std::ostream& log) {
  RunOutcome outcome;
  const OutputDir out(c.output.dir);
  Rng rng(c.seed);
  const SampleBatch init = initial_particles(c.flow.n2, c.flow.dim_n, rng);
  log << "flow: " << c.flow.total_steps << " steps, " << c.flow.n2 << " particles on '"
      << c.dataset.preset << "' (seed " << c.seed << ")\n";
  const FlowResult result = run_flow(c.flow, init, mixture_sampler(c.dataset.spec), rng);

  io::write_energy_csv(out("energy.csv", outcome), result.energy);
  io::write_samples_csv(out("particles.csv", outcome), result.particles);
  io::write_snapshots_csv(out("snapshots.csv", outcome), result.snapshots);

  json& summary = outcome.summary;
  summary["command"] = to_string(Command::flow);
  summary["config"] = config_echo(c, Command::flow);
  const double e0 = result.energy.front().energy;
  const double e1 = result.energy.back().energy;
  summary["initial_energy"] = e0;
  summary["final_energy"] = e1;
  summary["energy_ratio"] = e0 != 0.0 ? json(e1 / e0) : json(nullptr);
  summary["steps_completed"] = result.energy.back().step;
  summary["displacement_warnings"] = result.displacement_warnings;
  summary["first_warning_step"] = result.first_warning_step;
  summary["abort"] = result.abort ? json{{"step", result.abort->step}, {"reason", result.abort->reason}}
                                  : json(nullptr);
  io::write_json(out("summary.json", outcome), summary);
  if (c.output.svg && c.flow.dim_n == 2) {
    Rng data_rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    const SampleBatch data = sample(c.dataset.spec, 512, data_rng);
    io::write_svg_scatter(out("flow.svg", outcome),
                          {{data, kDataColor, "data"}, {init, "#7f7f7f", "initial"},
                           {result.particles, kModelColor, "final"}},
                          default_extent(c.dataset.spec), "flow seed " + std::to_string(c.seed));
  }
  if (result.displacement_warnings > 0) {
    log << "warning: " << result.displacement_warnings << " steps moved a particle farther than "
        << c.flow.max_displacement_warn << " (first at step " << result.first_warning_step << ")\n";
  }
  if (result.abort) {
    log << "flow aborted at step " << result.abort->step << ": " << result.abort->reason << '\n';
    outcome.exit_code = kExitNumericalAbort;
  } else {
    log << "energy " << e0 << " -> " << e1 << '\n';
  }
  return outcome;
}

RunOutcome run_spectral_command(const ExperimentConfig& c, std::ostream& log) {
  using namespace spectral;
  RunOutcome outcome;
  const OutputDir out(c.output.dir);
  const SpectralSettings& s = c.spectral;
  json& summary = outcome.summary;
  summary["command"] = to_string(Command::spectral);
  summary["config"] = config_echo(c, Command::spectral);
  summary["critical_epsilon"] = critical_epsilon();
  summary["results"] = json::array();

  std::ofstream rates(out("rates.csv", outcome));
  rates << "kind,epsilon,k_x,k_y,xi,measured,predicted,rel_err,measured_over_level,stop_reason,steps\n";
  std::ofstream modes(out("modes.csv", outcome));
  modes << "probe,step,time,k_x,k_y,amplitude\n";
  double max_mass_drift = 0.0;
  int probe_index = 0;
  try {
    for (const SpectralProbe& probe : s.probes) {
      for (const auto& [kx, ky] : s.modes) {
        const double xi = std::numbers::pi * std::hypot(kx, ky);
        const double predicted = predicted_rate(probe.kind, s.level, xi, probe.epsilon);
        EvolveOptions o;
        o.kind = probe.kind;
        o.epsilon = probe.epsilon;
        o.integrator = s.integrator;
        o.steps = s.steps;
        o.tracked_modes = {{kx, ky}};
        o.stop_amplitude = s.stop_amplitude;
        o.contamination_limit = s.contamination_limit;
        if (s.dt > 0.0) {
          o.dt = s.dt;
        } else if (s.integrator == Integrator::explicit_euler) {
          o.dt = default_dt(max_grid_rate(probe.kind, s.level, probe.epsilon, s.grid, s.grid));
        } else {
          o.dt = default_dt(predicted != 0.0 ? predicted : s.level * xi);
        }
        const EvolveResult r =
            evolve(GridField::with_mode(s.grid, s.grid, s.level, s.amplitude, kx, ky), o);
        const auto& h = r.history;
        const double measured = measure_growth_rate(h.times, h.modes[0].amplitude, 0, h.times.size());
        const double rel_err = predicted != 0.0 ? std::abs(measured - predicted) / std::abs(predicted)
                                                : std::abs(measured);
        max_mass_drift = std::max(max_mass_drift, std::abs(r.final_mass - r.initial_mass));
        const std::int64_t steps_run = h.steps.back();
        rates << to_string(probe.kind) << ',' << io::format_double(probe.epsilon) << ',' << kx << ','
              << ky << ',' << io::format_double(xi) << ',' << io::format_double(measured) << ','
              << io::format_double(predicted) << ',' << io::format_double(rel_err) << ','
              << io::format_double(measured / s.level) << ',' << to_string(r.stop_reason) << ','
              << steps_run << '\n';
        for (std::size_t i = 0; i < h.steps.size(); ++i) {
          modes << probe_index << ',' << h.steps[i] << ',' << io::format_double(h.times[i]) << ',' << kx
                << ',' << ky << ',' << io::format_double(h.modes[0].amplitude[i]) << '\n';
        }
        summary["results"].push_back({{"probe", probe_index},
                                      {"kind", to_string(probe.kind)},
                                      {"epsilon", probe.epsilon},
                                      {"k_x", kx},
                                      {"k_y", ky},
                                      {"xi", xi},
                                      {"measured", measured},
                                      {"measured_over_level", measured / s.level},
                                      {"predicted", predicted},
                                      {"rel_err", rel_err},
                                      {"dt", o.dt},
                                      {"steps_run", steps_run},
                                      {"stop_reason", to_string(r.stop_reason)},
                                      {"negative_density_step", r.negative_density_step},
                                      {"mass_drift", r.final_mass - r.initial_mass}});
        log << to_string(probe.kind) << " eps=" << probe.epsilon << " k=(" << kx << ',' << ky
            << ") measured " << measured << " predicted " << predicted << '\n';
      }
      ++probe_index;
    }
  } catch (const std::domain_error& e) {
    log << "spectral run aborted: " << e.what() << '\n';
    summary["abort"] = e.what();
    outcome.exit_code = kExitNumericalAbort;
  }
  summary["max_mass_drift"] = max_mass_drift;
  io::write_json(out("summary.json", outcome), summary);
  return outcome;
}

RunOutcome run_eval_command(const ExperimentConfig& c, std::ostream& log) {
  if (c.eval.samples.empty()) throw ConfigError("eval: no samples file given");
  if (!fs::exists(c.eval.samples)) throw ConfigError("eval: samples file '" + c.eval.samples + "' not found");
  RunOutcome outcome;
  const SampleBatch samples = io::read_samples_csv(c.eval.samples);
  if (samples.cols() != c.dataset.spec.dim()) {
    throw ConfigError("eval: samples have " + std::to_string(samples.cols()) +
                      " columns but the dataset has dimension " + std::to_string(c.dataset.spec.dim()));
  }
  const OutputDir out(c.output.dir);
  const CoverageReport report = mode_coverage(samples, c.dataset.spec, c.eval.threshold_sigmas);
  json& summary = outcome.summary;
  summary["command"] = to_string(Command::eval);
  summary["config"] = config_echo(c, Command::eval);
  summary["num_samples"] = samples.rows();
  summary["coverage"] = io::to_json(report);
  if (samples.cols() == 2) {
    const GridExtent extent = c.eval.extent.value_or(default_extent(c.dataset.spec));
    const double bw = samples.rows() > 1 ? silverman_bandwidth(samples) : 0.0;
    summary["kde_bandwidth"] = bw;
    if (bw > 0.0) {
      const Matrix kde = kde_grid(samples, bw, extent, c.eval.kde_resolution);
      io::write_matrix_csv(out("kde.csv", outcome), kde);
      if (c.output.svg) io::write_svg_heatmap(out("kde.svg", outcome), kde, extent, "KDE");
    }
    if (c.output.svg) {
      io::write_svg_scatter(out("scatter.svg", outcome), {{samples, kModelColor, "samples"}}, extent,
                            "samples");
    }
  }
  io::write_json(out("coverage.json", outcome), summary);
  log << "modes hit " << report.modes_hit << '/' << report.modes_total << ", high-quality fraction "
      << report.high_quality_fraction << '\n';
  return outcome;
}

RunOutcome run_kernel_probe_command(const ExperimentConfig& c, std::ostream& log) {
  RunOutcome outcome;
  const OutputDir out(c.output.dir);
  const KernelProbeSettings& k = c.kernel_probe;
  const PairKernel elastic = PairKernel::elastic(k.kernel);
  const PairKernel combined = PairKernel::combined(k.kernel, k.stabilizer);
  std::ofstream csv(out("kernel_probe.csv", outcome));
  const std::string header = "r,elastic,elastic_slope,stabilizer,combined,combined_slope";
  csv << header << '\n';
  log << header << '\n';
  json rows = json::array();
  for (double r : k.radii) {
    const double e = elastic.value(r);
    const double e_slope = elastic.radial(r) * r;
    const double s = stabilizer_kernel(k.stabilizer, r);
    const double cmb = combined.value(r);
    const double c_slope = combined.radial(r) * r;
    std::string line = io::format_double(r);
    for (double v : {e, e_slope, s, cmb, c_slope}) line += "," + io::format_double(v);
    csv << line << '\n';
    log << line << '\n';
    rows.push_back({{"r", r}, {"elastic", e}, {"elastic_slope", e_slope}, {"stabilizer", s},
                    {"combined", cmb}, {"combined_slope", c_slope}});
  }
  outcome.summary = {{"command", to_string(Command::kernel_probe)},
                     {"config", config_echo(c, Command::kernel_probe)},
                     {"rows", rows}};
  io::write_json(out("kernel_probe.json", outcome), outcome.summary);
  return outcome;
}

}  // namespace

GridExtent default_extent(const MixtureSpec& spec) {
  double x0 = spec.centers.front()(0), x1 = x0;
  double y0 = spec.centers.front().size() > 1 ? spec.centers.front()(1) : 0.0, y1 = y0;
  for (const Vector& c : spec.centers) {
    x0 = std::min(x0, c(0));
    x1 = std::max(x1, c(0));
    const double y = c.size() > 1 ? c(1) : 0.0;
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  const double pad = std::max(4.0 * spec.component_std, 1.0);
  return {x0 - pad, x1 + pad, y0 - pad, y1 + pad};
}

SampleBatch generate_samples(const MlpModel& generator, int n, Rng& rng) {
  return mlp_forward(generator, rng.normal_matrix(n, generator.input_dim()));
}

RunOutcome run_command(Command command, const ExperimentConfig& config, std::ostream& log) {
  switch (command) {
    case Command::gan_train:
    case Command::eieg_train:
      return run_training(command, config, log);
    case Command::flow:
      return run_flow_command(config, log);
    case Command::spectral:
      return run_spectral_command(config, log);
    case Command::eval:
      return run_eval_command(config, log);
    case Command::kernel_probe:
      return run_kernel_probe_command(config, log);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace eie
