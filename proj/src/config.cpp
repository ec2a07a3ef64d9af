#include "eie/config.hpp"

#include <set>

namespace eie {

using nlohmann::json;

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommandNames[] = {
    {Command::gan_train, "gan-train"}, {Command::eieg_train, "eieg-train"},
    {Command::flow, "flow"},           {Command::spectral, "spectral"},
    {Command::eval, "eval"},           {Command::kernel_probe, "kernel-probe"},
};

// Reads keys from one JSON object; finish() rejects any key never asked for.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail(path_.empty() ? "config root" : path_, "expected an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception& e) {
      fail(where(key), std::string("wrong type: ") + e.what());
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key) ? &doc_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) fail(where(item.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_kernel(Section& parent, const std::string& key, KernelConfig& k) {
  if (const json* j = parent.child(key)) {
    Section s(*j, parent.where(key));
    s.read("dim_n", k.dim_n);
    s.read("cutoff_R", k.cutoff_R);
    s.finish();
  }
}

void read_stabilizer(Section& parent, const std::string& key, StabilizerConfig& k) {
  if (const json* j = parent.child(key)) {
    Section s(*j, parent.where(key));
    s.read("order_m", k.order_m);
    s.read("cutoff_Rs", k.cutoff_Rs);
    s.read("weight_eps", k.weight_eps);
    s.finish();
  }
}

void read_dataset(Section& root, DatasetSettings& d) {
  const json* j = root.child("dataset");
  if (j == nullptr) return;
  Section s(*j, "dataset");
  std::string preset = d.preset;
  s.read("preset", preset);
  if (preset != d.preset) {
    try {
      d.spec = spec_by_name(preset);
    } catch (const std::invalid_argument& e) {
      Section::fail("dataset.preset", e.what());
    }
    d.preset = preset;
  }
  std::vector<std::vector<double>> centers;
  s.read("centers", centers);
  if (!centers.empty()) {
    d.spec.centers.clear();
    for (const auto& c : centers) d.spec.centers.push_back(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size())));
    d.spec.weights.assign(centers.size(), 1.0 / static_cast<double>(centers.size()));
  }
  s.read("component_std", d.spec.component_std);
  s.read("weights", d.spec.weights);
  s.finish();
  try {
    d.spec.validate();
  } catch (const std::invalid_argument& e) {
    Section::fail("dataset", e.what());
  }
}

void read_train(Section& root, TrainConfig& t) {
  const json* j = root.child("train");
  if (j == nullptr) return;
  Section s(*j, "train");
  s.read("lr_G", t.lr_G);
  s.read("lr_D", t.lr_D);
  s.read("adam_beta1", t.adam_beta1);
  s.read("adam_beta2", t.adam_beta2);
  s.read("n_c", t.n_c);
  s.read("batch_B", t.batch_B);
  s.read("generator_steps", t.generator_steps);
  s.read("feature_dim", t.feature_dim);
  s.read("noise_dim", t.noise_dim);
  s.read("generator_hidden", t.generator_hidden);
  s.read("discriminator_hidden", t.discriminator_hidden);
  s.read("leaky_slope", t.leaky_slope);
  read_kernel(s, "kernel", t.kernel);
  read_stabilizer(s, "stabilizer", t.stabilizer);
  s.read("self_interaction", t.flags.self_interaction);
  s.read("stabilizer_in_generator_loss", t.flags.stabilizer_in_generator_loss);
  s.read("snapshot_every", t.snapshot_every);
  s.read("snapshot_size", t.snapshot_size);
  s.finish();
}

void read_flow(Section& root, FlowConfig& f) {
  const json* j = root.child("flow");
  if (j == nullptr) return;
  Section s(*j, "flow");
  s.read("mobility_M1", f.mobility_M1);
  s.read("mobility_M2", f.mobility_M2);
  s.read("dt", f.dt);
  s.read("cutoff_R", f.cutoff_R);
  s.read("total_steps", f.total_steps);
  s.read("n1", f.n1);
  s.read("n2", f.n2);
  s.read("dim_n", f.dim_n);
  s.read("record_every", f.record_every);
  s.read("energy_ref_size", f.energy_ref_size);
  s.read("snapshot_every", f.snapshot_every);
  s.read("max_displacement_warn", f.max_displacement_warn);
  s.finish();
}

void read_extent(Section& parent, std::optional<GridExtent>& extent) {
  const json* j = parent.child("extent");
  if (j == nullptr || j->is_null()) return;
  std::vector<double> v;
  try {
    v = j->get<std::vector<double>>();
  } catch (const json::exception&) {
  }
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
    Section::fail(parent.where("extent"), "expected [x_min, x_max, y_min, y_max] with min < max");
  }
  extent = GridExtent{v[0], v[1], v[2], v[3]};
}

void read_eval(Section& root, EvalSettings& e) {
  const json* j = root.child("eval");
  if (j == nullptr) return;
  Section s(*j, "eval");
  s.read("num_samples", e.num_samples);
  s.read("threshold_sigmas", e.threshold_sigmas);
  s.read("kde_resolution", e.kde_resolution);
  read_extent(s, e.extent);
  s.read("samples", e.samples);
  s.finish();
  if (e.num_samples < 1) Section::fail("eval.num_samples", "must be >= 1");
  if (!(e.threshold_sigmas > 0.0)) Section::fail("eval.threshold_sigmas", "must be positive");
  if (e.kde_resolution < 2) Section::fail("eval.kde_resolution", "must be >= 2");
}

void read_spectral(Section& root, SpectralSettings& sp) {
  const json* j = root.child("spectral");
  if (j == nullptr) return;
  Section s(*j, "spectral");
  s.read("grid", sp.grid);
  s.read("level", sp.level);
  s.read("amplitude", sp.amplitude);
  s.read("steps", sp.steps);
  s.read("dt", sp.dt);
  std::string integrator = sp.integrator == spectral::Integrator::explicit_euler ? "explicit_euler"
                                                                                 : "exponential_euler";
  s.read("integrator", integrator);
  if (integrator == "explicit_euler") {
    sp.integrator = spectral::Integrator::explicit_euler;
  } else if (integrator == "exponential_euler") {
    sp.integrator = spectral::Integrator::exponential_euler;
  } else {
    Section::fail("spectral.integrator", "expected explicit_euler or exponential_euler");
  }
  s.read("stop_amplitude", sp.stop_amplitude);
  s.read("contamination_limit", sp.contamination_limit);
  s.read("modes", sp.modes);
  if (const json* probes = s.child("probes")) {
    if (!probes->is_array()) Section::fail("spectral.probes", "expected an array");
    sp.probes.clear();
    for (std::size_t i = 0; i < probes->size(); ++i) {
      Section p((*probes)[i], "spectral.probes[" + std::to_string(i) + "]");
      std::string kind = "generator";
      SpectralProbe probe;
      p.read("kind", kind);
      p.read("epsilon", probe.epsilon);
      p.finish();
      try {
        probe.kind = spectral::flow_kind_from_string(kind);
      } catch (const std::invalid_argument& e) {
        Section::fail(p.where("kind"), e.what());
      }
      sp.probes.push_back(probe);
    }
  }
  s.finish();
  if (sp.grid < 2 || (sp.grid & (sp.grid - 1)) != 0) Section::fail("spectral.grid", "must be a power of two >= 2");
  if (!(sp.level > 0.0)) Section::fail("spectral.level", "must be positive");
  if (!(sp.amplitude > 0.0) || !(sp.amplitude < sp.level)) {
    Section::fail("spectral.amplitude", "must lie in (0, level)");
  }
  if (sp.steps < 1) Section::fail("spectral.steps", "must be >= 1");
  if (!(sp.dt >= 0.0)) Section::fail("spectral.dt", "must be >= 0");
  if (sp.modes.empty()) Section::fail("spectral.modes", "need at least one mode");
  for (const auto& [kx, ky] : sp.modes) {
    if ((kx == 0 && ky == 0) || std::abs(kx) >= sp.grid / 2 || std::abs(ky) >= sp.grid / 2) {
      Section::fail("spectral.modes", "modes must be nonzero and below the Nyquist index");
    }
  }
  for (const auto& p : sp.probes) {
    if (!(p.epsilon >= 0.0)) Section::fail("spectral.probes", "epsilon must be >= 0");
  }
}

void read_kernel_probe(Section& root, KernelProbeSettings& k) {
  const json* j = root.child("kernel_probe");
  if (j == nullptr) return;
  Section s(*j, "kernel_probe");
  read_kernel(s, "kernel", k.kernel);
  read_stabilizer(s, "stabilizer", k.stabilizer);
  s.read("radii", k.radii);
  s.finish();
}

void read_output(Section& root, OutputSettings& o) {
  const json* j = root.child("output");
  if (j == nullptr) return;
  Section s(*j, "output");
  s.read("dir", o.dir);
  s.read("svg", o.svg);
  s.read("record_wall_time", o.record_wall_time);
  s.finish();
}

bool uses_dataset(Command c) { return c != Command::spectral && c != Command::kernel_probe; }
bool uses_training(Command c) { return c == Command::gan_train || c == Command::eieg_train; }

void validate(const ExperimentConfig& c, Command command) {
  try {
    if (uses_training(command)) {
      TrainConfig t = c.train;
      t.data_dim = static_cast<int>(c.dataset.spec.dim());
      if (command == Command::eieg_train) t.flags.use_discriminator = false;
      t.validate();
    }
    if (command == Command::flow) {
      c.flow.validate();
      if (c.flow.dim_n != c.dataset.spec.dim()) {
        throw std::invalid_argument("flow dim_n must equal the dataset dimension");
      }
    }
    if (command == Command::kernel_probe) {
      c.kernel_probe.kernel.validate();
      c.kernel_probe.stabilizer.validate_against(c.kernel_probe.kernel);
      for (double r : c.kernel_probe.radii) {
        if (!(r >= 0.0)) throw std::invalid_argument("kernel_probe radii must be >= 0");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json kernel_json(const KernelConfig& k) { return {{"dim_n", k.dim_n}, {"cutoff_R", k.cutoff_R}}; }

json stabilizer_json(const StabilizerConfig& s) {
  return {{"order_m", s.order_m}, {"cutoff_Rs", s.cutoff_Rs}, {"weight_eps", s.weight_eps}};
}

}  // namespace

Command command_from_string(const std::string& name) {
  for (const auto& c : kCommandNames) {
    if (name == c.name) return c.command;
  }
  throw std::invalid_argument("unknown command '" + name + "'");
}

std::string to_string(Command command) {
  for (const auto& c : kCommandNames) {
    if (c.command == command) return c.name;
  }
  return "unknown";
}

ExperimentConfig default_config(Command command) {
  ExperimentConfig c;
  c.dataset.preset = command == Command::flow ? "two_mode" : "grid25";
  c.dataset.spec = spec_by_name(c.dataset.preset);
  return c;
}

ExperimentConfig parse_config(const json& doc, Command command) {
  ExperimentConfig c = default_config(command);
  Section root(doc, "");
  root.read("seed", c.seed);
  if (uses_dataset(command)) read_dataset(root, c.dataset);
  if (uses_training(command)) read_train(root, c.train);
  if (uses_training(command) || command == Command::eval) read_eval(root, c.eval);
  if (command == Command::flow) read_flow(root, c.flow);
  if (command == Command::spectral) read_spectral(root, c.spectral);
  if (command == Command::kernel_probe) read_kernel_probe(root, c.kernel_probe);
  read_output(root, c.output);
  root.finish();
  if (uses_training(command)) c.train.data_dim = static_cast<int>(c.dataset.spec.dim());
  validate(c, command);
  return c;
}

json config_echo(const ExperimentConfig& c, Command command) {
  json out;
  out["seed"] = c.seed;
  if (uses_dataset(command)) {
    json centers = json::array();
    for (const Vector& v : c.dataset.spec.centers) centers.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    out["dataset"] = {{"preset", c.dataset.preset},
                      {"centers", centers},
                      {"component_std", c.dataset.spec.component_std},
                      {"weights", c.dataset.spec.weights}};
  }
  if (uses_training(command)) {
    const TrainConfig& t = c.train;
    out["train"] = {{"lr_G", t.lr_G},
                    {"lr_D", t.lr_D},
                    {"adam_beta1", t.adam_beta1},
                    {"adam_beta2", t.adam_beta2},
                    {"n_c", t.n_c},
                    {"batch_B", t.batch_B},
                    {"generator_steps", t.generator_steps},
                    {"feature_dim", t.feature_dim},
                    {"noise_dim", t.noise_dim},
                    {"generator_hidden", t.generator_hidden},
                    {"discriminator_hidden", t.discriminator_hidden},
                    {"leaky_slope", t.leaky_slope},
                    {"kernel", kernel_json(t.kernel)},
                    {"stabilizer", stabilizer_json(t.stabilizer)},
                    {"self_interaction", t.flags.self_interaction},
                    {"stabilizer_in_generator_loss", t.flags.stabilizer_in_generator_loss},
                    {"snapshot_every", t.snapshot_every},
                    {"snapshot_size", t.snapshot_size}};
  }
  if (uses_training(command) || command == Command::eval) {
    const EvalSettings& e = c.eval;
    out["eval"] = {{"num_samples", e.num_samples},
                   {"threshold_sigmas", e.threshold_sigmas},
                   {"kde_resolution", e.kde_resolution},
                   {"samples", e.samples}};
    out["eval"]["extent"] = e.extent ? json{e.extent->x_min, e.extent->x_max, e.extent->y_min, e.extent->y_max}
                                     : json(nullptr);
  }
  if (command == Command::flow) {
    const FlowConfig& f = c.flow;
    out["flow"] = {{"mobility_M1", f.mobility_M1},
                   {"mobility_M2", f.mobility_M2},
                   {"dt", f.dt},
                   {"cutoff_R", f.cutoff_R},
                   {"total_steps", f.total_steps},
                   {"n1", f.n1},
                   {"n2", f.n2},
                   {"dim_n", f.dim_n},
                   {"record_every", f.record_every},
                   {"energy_ref_size", f.energy_ref_size},
                   {"snapshot_every", f.snapshot_every},
                   {"max_displacement_warn", f.max_displacement_warn}};
  }
  if (command == Command::spectral) {
    const SpectralSettings& s = c.spectral;
    json probes = json::array();
    for (const auto& p : s.probes) probes.push_back({{"kind", spectral::to_string(p.kind)}, {"epsilon", p.epsilon}});
    out["spectral"] = {{"grid", s.grid},
                       {"level", s.level},
                       {"amplitude", s.amplitude},
                       {"steps", s.steps},
                       {"dt", s.dt},
                       {"integrator", s.integrator == spectral::Integrator::explicit_euler
                                          ? "explicit_euler"
                                          : "exponential_euler"},
                       {"stop_amplitude", s.stop_amplitude},
                       {"contamination_limit", s.contamination_limit},
                       {"modes", s.modes},
                       {"probes", probes}};
  }
  if (command == Command::kernel_probe) {
    out["kernel_probe"] = {{"kernel", kernel_json(c.kernel_probe.kernel)},
                           {"stabilizer", stabilizer_json(c.kernel_probe.stabilizer)},
                           {"radii", c.kernel_probe.radii}};
  }
  out["output"] = {{"dir", c.output.dir}, {"svg", c.output.svg}, {"record_wall_time", c.output.record_wall_time}};
  return out;
}

}  // namespace eie
