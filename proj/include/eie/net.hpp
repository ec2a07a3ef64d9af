#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eie/linalg.hpp"

namespace eie {

/// Fully-connected network: affine -> leaky ReLU between layers, identity output.
/// weights[l] is (layer_dims[l] x layer_dims[l+1]); a batch X maps to X W + 1 b^T.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  double slope = 0.2;

  std::size_t num_layers() const { return weights.size(); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t parameter_count() const;

  /// Throws std::invalid_argument on shape mismatch or non-finite parameters.
  void validate() const;
};

/// Same shapes as the model parameters.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;

  static MlpGrads zeros_like(const MlpModel& model);
  MlpGrads& operator+=(const MlpGrads& other);
};

/// Glorot-uniform weights U(+-sqrt(6/(fan_in+fan_out))), zero biases.
MlpModel mlp_init(std::uint64_t seed, const std::vector<int>& layer_dims, double slope = 0.2);

inline double leaky_relu(double z, double slope) { return z >= 0.0 ? z : slope * z; }

Matrix mlp_forward(const MlpModel& model, const Matrix& inputs);

struct MlpBackward {
  MlpGrads params;
  Matrix inputs;
};

/// Exact reverse-mode gradients of sum(upstream .* forward(inputs)) with respect
/// to the parameters and the inputs. The leaky-ReLU derivative at 0 is 1.
MlpBackward mlp_backward(const MlpModel& model, const Matrix& inputs, const Matrix& upstream);

/// Forward pass that keeps the pre-activations for a later backward pass.
struct MlpTape {
  Matrix inputs;
  std::vector<Matrix> preactivations;

  const Matrix& output() const { return preactivations.back(); }
};

MlpTape mlp_record(const MlpModel& model, const Matrix& inputs);
MlpBackward mlp_backward(const MlpModel& model, const MlpTape& tape, const Matrix& upstream);

struct AdamState {
  std::int64_t step_count = 0;
  MlpGrads first_moment;
  MlpGrads second_moment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  double lr = 1e-4;

  static AdamState for_model(const MlpModel& model, double lr);
};

/// Bias-corrected Adam update in place. With ascend the step is added instead of subtracted.
void adam_step(MlpModel& model, const MlpGrads& grads, AdamState& state, bool ascend = false);

/// Text checkpoint: header line, dims, slope, then every parameter in row-major
/// order as a hexadecimal float, so loading reproduces the model bit for bit.
void save_mlp(const MlpModel& model, std::ostream& out);
MlpModel load_mlp(std::istream& in);
void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);

}  // namespace eie
