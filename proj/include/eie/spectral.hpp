#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eie/linalg.hpp"

namespace eie::spectral {

using ComplexGrid = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Periodic density on [-1,1]^2 sampled at x_i = -1 + 2i/n_x, y_j = -1 + 2j/n_y.
/// values(i, j) is the sample at (x_i, y_j). Admissible frequencies are
/// xi = pi (k_x, k_y) with integer k, so the smallest nonzero |xi| is pi.
struct GridField {
  Matrix values;
  double mean_level = 0.0;

  int nx() const { return static_cast<int>(values.rows()); }
  int ny() const { return static_cast<int>(values.cols()); }

  static GridField constant(int nx, int ny, double level);
  /// level + amplitude * cos(pi (k_x x + k_y y)).
  static GridField with_mode(int nx, int ny, double level, double amplitude, int kx, int ky);
  static GridField from_values(Matrix values);

  /// Throws std::invalid_argument unless both sides are powers of two >= 2 and values are finite.
  void validate() const;
};

/// Discrete transform convention used throughout this module:
///   c_k = (1 / (n_x n_y)) sum_j p_j exp(-i pi k . (x_j + 1))
/// for k in the FFT index range, k_x in [-n_x/2, n_x/2). A constant field C has
/// c_0 = C and a cos(pi x) mode of amplitude a has |c_(+-1,0)| = a/2. The phase
/// reference is the lower-left corner; moduli do not depend on it.
class Transform {
 public:
  Transform(int nx, int ny);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;
  Transform(Transform&&) noexcept;
  Transform& operator=(Transform&&) noexcept;

  ComplexGrid forward(const Matrix& values) const;
  /// Real part of the inverse transform.
  Matrix inverse(const ComplexGrid& coefficients) const;

  int nx() const;
  int ny() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Signed integer frequency for FFT index `index` on an n-point axis.
int wavenumber(int index, int n);

/// |xi| for the coefficient at FFT indices (i, j).
double xi_norm(int i, int j, int nx, int ny);

/// Inverse transform of m(|xi|) c_k with the xi = 0 coefficient set to 0.
GridField apply_multiplier(const GridField& field, const std::function<double(double)>& multiplier);

/// Riesz potential: multiplier 1/|xi|, zero-mean result.
GridField riesz_potential(const GridField& field);

/// sum over xi != 0 of |c_k|^2 / |xi| under the convention above.
double semi_h_minus_half_norm_sq(const GridField& field);

enum class FlowKind { generator, discriminator_raw, discriminator_stabilized };

FlowKind flow_kind_from_string(const std::string& name);
std::string to_string(FlowKind kind);

/// Closed-form linear rate of the xi mode around the constant state C:
///   generator            -C |xi|
///   discriminator_raw    +C |xi|
///   stabilized           +C (1 - eps |xi|^2) |xi|
/// and 0 for xi = 0.
double predicted_rate(FlowKind kind, double C, double xi, double eps = 0.0);

/// eps above which every admissible nonzero mode decays on [-1,1]^2: 1/pi^2.
double critical_epsilon();

enum class Integrator {
  /// P_hat += dt * RHS_hat with the full pseudo-spectral right-hand side.
  explicit_euler,
  /// Exponential Euler: the linear part about the current mean level is
  /// integrated exactly, the nonlinear remainder explicitly.
  exponential_euler,
};

struct EvolveOptions {
  FlowKind kind = FlowKind::generator;
  double epsilon = 0.0;
  double dt = 1e-3;
  std::int64_t steps = 1000;
  Integrator integrator = Integrator::exponential_euler;
  /// Modes (k_x, k_y) whose amplitude |c_k| is recorded each step.
  std::vector<std::pair<int, int>> tracked_modes{{1, 0}};
  /// Stop early once any tracked amplitude exceeds this (<= 0 disables).
  double stop_amplitude = 0.0;
  /// Stop early once any untracked nonzero mode exceeds this fraction of the
  /// largest tracked amplitude (<= 0 disables). Bounds the fit window to the
  /// linear regime when roundoff in fast modes grows faster than the probe.
  double contamination_limit = 0.0;
};

enum class StopReason { completed, amplitude, contamination };
std::string to_string(StopReason reason);

struct ModeTrack {
  int kx = 0;
  int ky = 0;
  std::vector<double> amplitude;
};

struct AmplitudeHistory {
  std::vector<std::int64_t> steps;
  std::vector<double> times;
  std::vector<ModeTrack> modes;
};

struct EvolveResult {
  GridField field;
  AmplitudeHistory history;
  /// Mass (c_0) before and after; equal up to rounding.
  double initial_mass = 0.0;
  double final_mass = 0.0;
  /// Step at which the density first went negative (-1 if never).
  std::int64_t negative_density_step = -1;
  StopReason stop_reason = StopReason::completed;
};

/// Pseudo-spectral evolution of dP/dt = s div(P grad psi) with
/// psi = K[P - C], K = 1/|xi| (generator, raw) or 1/|xi| - eps |xi| (stabilized),
/// s = +1 for the generator flow and -1 for the discriminator flows.
/// Throws std::domain_error if the field becomes non-finite.
EvolveResult evolve(const GridField& field, const EvolveOptions& options);

/// Largest |linear rate| over all grid modes for the given flow.
double max_grid_rate(FlowKind kind, double C, double eps, int nx, int ny);

/// 0.5 * 0.1 / |rate|: keeps |rate| dt at 0.05.
double default_dt(double rate);

/// Least-squares slope of log(amplitude) against time over [begin, end).
/// The window is truncated at the first amplitude <= floor (underflow).
/// Throws std::invalid_argument if fewer than two usable points remain.
double measure_growth_rate(const std::vector<double>& times, const std::vector<double>& amplitude,
                           std::size_t begin, std::size_t end, double floor = 1e-13);

}  // namespace eie::spectral
