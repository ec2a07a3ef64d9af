#include "eie/net.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eie {

std::size_t MlpModel::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    count += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return count;
}

void MlpModel::validate() const {
  if (layer_dims.size() < 2) throw std::invalid_argument("mlp: need at least two layer dims");
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw std::invalid_argument("mlp: layer count does not match layer_dims");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_dims[l] || weights[l].cols() != layer_dims[l + 1] ||
        biases[l].size() != layer_dims[l + 1]) {
      throw std::invalid_argument("mlp: weight shape does not match layer_dims");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw std::invalid_argument("mlp: non-finite parameter");
    }
  }
}

MlpGrads MlpGrads::zeros_like(const MlpModel& model) {
  MlpGrads g;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    g.weights.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    g.biases.push_back(RowVector::Zero(model.biases[l].size()));
  }
  return g;
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpModel mlp_init(std::uint64_t seed, const std::vector<int>& layer_dims, double slope) {
  if (layer_dims.size() < 2) throw std::invalid_argument("mlp_init: need at least two layer dims");
  for (int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("mlp_init: layer dims must be positive");
  }
  std::mt19937_64 engine(seed);
  // 53-bit uniform in [0, 1) from the raw engine output; std distributions are
  // not portable across standard libraries.
  auto uniform01 = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  MlpModel model;
  model.layer_dims = layer_dims;
  model.slope = slope;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = limit * (2.0 * uniform01() - 1.0);
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(RowVector::Zero(fan_out));
  }
  return model;
}

namespace {

void check_input(const MlpModel& model, const Matrix& inputs) {
  if (inputs.cols() != model.input_dim()) {
    throw std::invalid_argument("mlp: input width " + std::to_string(inputs.cols()) +
                                " does not match first layer dim " +
                                std::to_string(model.input_dim()));
  }
}

// Pre-activations of every layer; the last entry is the network output.
std::vector<Matrix> forward_preactivations(const MlpModel& model, const Matrix& inputs) {
  std::vector<Matrix> pre;
  pre.reserve(model.num_layers());
  Matrix act = inputs;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    Matrix z = act * model.weights[l];
    z.rowwise() += model.biases[l];
    if (l + 1 < model.num_layers()) {
      act = z.unaryExpr([s = model.slope](double v) { return leaky_relu(v, s); });
    }
    pre.push_back(std::move(z));
  }
  return pre;
}

}  // namespace

Matrix mlp_forward(const MlpModel& model, const Matrix& inputs) {
  check_input(model, inputs);
  return std::move(forward_preactivations(model, inputs).back());
}

MlpTape mlp_record(const MlpModel& model, const Matrix& inputs) {
  check_input(model, inputs);
  return MlpTape{inputs, forward_preactivations(model, inputs)};
}

MlpBackward mlp_backward(const MlpModel& model, const Matrix& inputs, const Matrix& upstream) {
  return mlp_backward(model, mlp_record(model, inputs), upstream);
}

MlpBackward mlp_backward(const MlpModel& model, const MlpTape& tape, const Matrix& upstream) {
  const std::vector<Matrix>& pre = tape.preactivations;
  if (pre.size() != model.num_layers() || tape.inputs.cols() != model.input_dim()) {
    throw std::invalid_argument("mlp_backward: tape does not belong to this model");
  }
  if (upstream.rows() != tape.inputs.rows() || upstream.cols() != model.output_dim()) {
    throw std::invalid_argument("mlp_backward: upstream gradient shape mismatch");
  }
  const std::size_t layers = model.num_layers();
  const double slope = model.slope;

  MlpBackward out{MlpGrads::zeros_like(model), Matrix()};
  Matrix delta = upstream;
  for (std::size_t l = layers; l-- > 0;) {
    if (l == 0) {
      out.params.weights[0].noalias() = tape.inputs.transpose() * delta;
    } else {
      const Matrix act =
          pre[l - 1].unaryExpr([slope](double v) { return leaky_relu(v, slope); });
      out.params.weights[l].noalias() = act.transpose() * delta;
    }
    out.params.biases[l] = delta.colwise().sum();
    Matrix back = delta * model.weights[l].transpose();
    if (l > 0) {
      delta = back.cwiseProduct(
          pre[l - 1].unaryExpr([slope](double v) { return v >= 0.0 ? 1.0 : slope; }));
    } else {
      out.inputs = std::move(back);
    }
  }
  return out;
}

AdamState AdamState::for_model(const MlpModel& model, double lr) {
  AdamState state;
  state.first_moment = MlpGrads::zeros_like(model);
  state.second_moment = MlpGrads::zeros_like(model);
  state.lr = lr;
  return state;
}

void adam_step(MlpModel& model, const MlpGrads& grads, AdamState& state, bool ascend) {
  if (grads.weights.size() != model.num_layers() ||
      state.first_moment.weights.size() != model.num_layers()) {
    throw std::invalid_argument("adam_step: gradient/state layer count mismatch");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const double sign = ascend ? 1.0 : -1.0;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      const double m_hat = m.data()[i] / correction1;
      const double v_hat = v.data()[i] / correction2;
      param.data()[i] += sign * state.lr * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
  };
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    update(model.weights[l], grads.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(model.biases[l], grads.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

namespace {

constexpr const char* kCheckpointMagic = "eie-mlp";
constexpr int kCheckpointVersion = 1;

void write_values(std::ostream& out, const double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    out << (i == 0 ? "" : " ") << std::hexfloat << data[i] << std::defaultfloat;
  }
  out << '\n';
}

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error("checkpoint: malformed number '" + token + "'");
  }
  return v;
}

void read_values(std::istream& in, double* data, Eigen::Index count) {
  std::string token;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> token)) throw std::runtime_error("checkpoint: truncated parameter block");
    data[i] = parse_double(token);
  }
}

}  // namespace

void save_mlp(const MlpModel& model, std::ostream& out) {
  model.validate();
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "layers " << model.layer_dims.size();
  for (int d : model.layer_dims) out << ' ' << d;
  out << '\n';
  out << "slope " << std::hexfloat << model.slope << std::defaultfloat << '\n';
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    out << "W " << l << '\n';
    write_values(out, model.weights[l].data(), model.weights[l].size());
    out << "b " << l << '\n';
    write_values(out, model.biases[l].data(), model.biases[l].size());
  }
}

MlpModel load_mlp(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: bad header");
  }
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "layers" || count < 2) {
    throw std::runtime_error("checkpoint: bad layers line");
  }
  MlpModel model;
  model.layer_dims.resize(count);
  for (auto& d : model.layer_dims) {
    if (!(in >> d) || d < 1) throw std::runtime_error("checkpoint: bad layer dim");
  }
  std::string slope_token;
  if (!(in >> tag >> slope_token) || tag != "slope") throw std::runtime_error("checkpoint: no slope");
  model.slope = parse_double(slope_token);
  for (std::size_t l = 0; l + 1 < count; ++l) {
    std::size_t index = 0;
    Matrix w(model.layer_dims[l], model.layer_dims[l + 1]);
    if (!(in >> tag >> index) || tag != "W" || index != l) {
      throw std::runtime_error("checkpoint: expected weight block " + std::to_string(l));
    }
    read_values(in, w.data(), w.size());
    RowVector b(model.layer_dims[l + 1]);
    if (!(in >> tag >> index) || tag != "b" || index != l) {
      throw std::runtime_error("checkpoint: expected bias block " + std::to_string(l));
    }
    read_values(in, b.data(), b.size());
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  model.validate();
  return model;
}

void save_mlp(const MlpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_mlp(model, out);
}

MlpModel load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_mlp(in);
}

}  // namespace eie
