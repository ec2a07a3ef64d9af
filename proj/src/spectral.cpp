#include "eie/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace eie::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

GridField GridField::constant(int nx, int ny, double level) {
  GridField f{Matrix::Constant(nx, ny, level), level};
  f.validate();
  return f;
}

GridField GridField::with_mode(int nx, int ny, double level, double amplitude, int kx, int ky) {
  Matrix v(nx, ny);
  for (int i = 0; i < nx; ++i) {
    const double x = -1.0 + 2.0 * i / nx;
    for (int j = 0; j < ny; ++j) {
      const double y = -1.0 + 2.0 * j / ny;
      v(i, j) = level + amplitude * std::cos(kPi * (kx * x + ky * y));
    }
  }
  return from_values(std::move(v));
}

GridField GridField::from_values(Matrix values) {
  const double mean = values.mean();
  GridField f{std::move(values), mean};
  f.validate();
  return f;
}

void GridField::validate() const {
  if (!is_power_of_two(nx()) || !is_power_of_two(ny())) {
    throw std::invalid_argument("grid resolution must be a power of two >= 2");
  }
  if (!values.allFinite()) throw std::invalid_argument("grid field holds non-finite values");
}

struct Transform::Impl {
  int nx;
  int ny;
  fftw_complex* buffer;
  fftw_plan forward_plan;
  fftw_plan backward_plan;

  Impl(int nx_, int ny_) : nx(nx_), ny(ny_) {
    buffer = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    // FFTW_ESTIMATE keeps the plan, and therefore the rounding, deterministic.
    forward_plan = fftw_plan_dft_2d(nx, ny, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan = fftw_plan_dft_2d(nx, ny, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(backward_plan);
    fftw_free(buffer);
  }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buffer); }
};

Transform::Transform(int nx, int ny) {
  if (!is_power_of_two(nx) || !is_power_of_two(ny)) {
    throw std::invalid_argument("transform size must be a power of two >= 2");
  }
  impl_ = std::make_unique<Impl>(nx, ny);
}

Transform::~Transform() = default;
Transform::Transform(Transform&&) noexcept = default;
Transform& Transform::operator=(Transform&&) noexcept = default;

int Transform::nx() const { return impl_->nx; }
int Transform::ny() const { return impl_->ny; }

ComplexGrid Transform::forward(const Matrix& values) const {
  const int nx = impl_->nx, ny = impl_->ny;
  if (values.rows() != nx || values.cols() != ny) throw std::invalid_argument("transform: shape mismatch");
  std::complex<double>* buf = impl_->data();
  for (Eigen::Index k = 0; k < values.size(); ++k) buf[k] = values.data()[k];
  fftw_execute(impl_->forward_plan);
  ComplexGrid out(nx, ny);
  const double scale = 1.0 / (static_cast<double>(nx) * ny);
  for (Eigen::Index k = 0; k < out.size(); ++k) out.data()[k] = buf[k] * scale;
  return out;
}

Matrix Transform::inverse(const ComplexGrid& coefficients) const {
  const int nx = impl_->nx, ny = impl_->ny;
  if (coefficients.rows() != nx || coefficients.cols() != ny) {
    throw std::invalid_argument("transform: shape mismatch");
  }
  std::complex<double>* buf = impl_->data();
  std::memcpy(static_cast<void*>(buf), coefficients.data(),
              sizeof(std::complex<double>) * static_cast<std::size_t>(coefficients.size()));
  fftw_execute(impl_->backward_plan);
  Matrix out(nx, ny);
  for (Eigen::Index k = 0; k < out.size(); ++k) out.data()[k] = buf[k].real();
  return out;
}

int wavenumber(int index, int n) { return index < n / 2 ? index : index - n; }

double xi_norm(int i, int j, int nx, int ny) {
  const double kx = wavenumber(i, nx);
  const double ky = wavenumber(j, ny);
  return kPi * std::sqrt(kx * kx + ky * ky);
}

namespace {

// Derivative symbol pi*k, zero on the Nyquist index where the odd derivative
// of a real field is not representable.
double derivative_symbol(int index, int n) {
  if (index == n / 2) return 0.0;
  return kPi * wavenumber(index, n);
}

std::function<double(double)> kernel_multiplier(FlowKind kind, double eps) {
  if (kind == FlowKind::discriminator_stabilized) {
    return [eps](double xi) { return 1.0 / xi - eps * xi; };
  }
  return [](double xi) { return 1.0 / xi; };
}

double flow_sign(FlowKind kind) { return kind == FlowKind::generator ? 1.0 : -1.0; }

// Linear symbol of s * div(C grad K[v]) under the discrete derivative.
double linear_symbol(FlowKind kind, double eps, double level, int i, int j, int nx, int ny) {
  if (i == 0 && j == 0) return 0.0;
  const double dx = derivative_symbol(i, nx);
  const double dy = derivative_symbol(j, ny);
  const double k = kernel_multiplier(kind, eps)(xi_norm(i, j, nx, ny));
  return -flow_sign(kind) * level * (dx * dx + dy * dy) * k;
}

std::size_t mode_index(int kx, int ky, int nx, int ny) {
  const int i = ((kx % nx) + nx) % nx;
  const int j = ((ky % ny) + ny) % ny;
  return static_cast<std::size_t>(i) * ny + j;
}

double largest_untracked(const ComplexGrid& coeffs, const std::vector<bool>& mask) {
  double out = 0.0;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    if (mask[static_cast<std::size_t>(k)]) out = std::max(out, std::abs(coeffs.data()[k]));
  }
  return out;
}

}  // namespace

GridField apply_multiplier(const GridField& field, const std::function<double(double)>& multiplier) {
  field.validate();
  const Transform t(field.nx(), field.ny());
  ComplexGrid c = t.forward(field.values);
  for (int i = 0; i < field.nx(); ++i) {
    for (int j = 0; j < field.ny(); ++j) {
      c(i, j) = (i == 0 && j == 0) ? 0.0 : c(i, j) * multiplier(xi_norm(i, j, field.nx(), field.ny()));
    }
  }
  return GridField::from_values(t.inverse(c));
}

GridField riesz_potential(const GridField& field) {
  return apply_multiplier(field, [](double xi) { return 1.0 / xi; });
}

double semi_h_minus_half_norm_sq(const GridField& field) {
  field.validate();
  const Transform t(field.nx(), field.ny());
  const ComplexGrid c = t.forward(field.values);
  double total = 0.0;
  for (int i = 0; i < field.nx(); ++i) {
    for (int j = 0; j < field.ny(); ++j) {
      if (i == 0 && j == 0) continue;
      total += std::norm(c(i, j)) / xi_norm(i, j, field.nx(), field.ny());
    }
  }
  return total;
}

FlowKind flow_kind_from_string(const std::string& name) {
  if (name == "generator") return FlowKind::generator;
  if (name == "discriminator_raw") return FlowKind::discriminator_raw;
  if (name == "discriminator_stabilized") return FlowKind::discriminator_stabilized;
  throw std::invalid_argument("unknown flow kind '" + name + "'");
}

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::generator: return "generator";
    case FlowKind::discriminator_raw: return "discriminator_raw";
    case FlowKind::discriminator_stabilized: return "discriminator_stabilized";
  }
  return "unknown";
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::completed: return "completed";
    case StopReason::amplitude: return "amplitude";
    case StopReason::contamination: return "contamination";
  }
  return "unknown";
}

double predicted_rate(FlowKind kind, double C, double xi, double eps) {
  if (xi == 0.0) return 0.0;
  const double a = std::abs(xi);
  switch (kind) {
    case FlowKind::generator: return -C * a;
    case FlowKind::discriminator_raw: return C * a;
    case FlowKind::discriminator_stabilized: return C * (1.0 - eps * a * a) * a;
  }
  return 0.0;
}

double critical_epsilon() { return 1.0 / (kPi * kPi); }

double max_grid_rate(FlowKind kind, double C, double eps, int nx, int ny) {
  double best = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      best = std::max(best, std::abs(linear_symbol(kind, eps, C, i, j, nx, ny)));
    }
  }
  return best;
}

double default_dt(double rate) {
  if (rate == 0.0) throw std::invalid_argument("default_dt: rate must be nonzero");
  return 0.5 * (0.1 / std::abs(rate));
}

EvolveResult evolve(const GridField& field, const EvolveOptions& options) {
  field.validate();
  if (!(options.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (options.steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
  const int nx = field.nx(), ny = field.ny();
  const Transform t(nx, ny);
  const auto multiplier = kernel_multiplier(options.kind, options.epsilon);
  const double sign = flow_sign(options.kind);

  ComplexGrid potential_symbol(nx, ny);
  ComplexGrid dx_symbol(nx, ny), dy_symbol(nx, ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      potential_symbol(i, j) = (i == 0 && j == 0) ? 0.0 : multiplier(xi_norm(i, j, nx, ny));
      dx_symbol(i, j) = std::complex<double>(0.0, derivative_symbol(i, nx));
      dy_symbol(i, j) = std::complex<double>(0.0, derivative_symbol(j, ny));
    }
  }

  EvolveResult result;
  Matrix p = field.values;
  ComplexGrid coeffs = t.forward(p);
  const double level = coeffs(0, 0).real();
  result.initial_mass = level;

  // Exponential-Euler factors for the linear part about the (conserved) mean.
  Matrix growth, phi;
  if (options.integrator == Integrator::exponential_euler) {
    growth.resize(nx, ny);
    phi.resize(nx, ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double z = linear_symbol(options.kind, options.epsilon, level, i, j, nx, ny) * options.dt;
        growth(i, j) = std::exp(z);
        phi(i, j) = z == 0.0 ? 1.0 : std::expm1(z) / z;
      }
    }
  }

  auto record = [&](std::int64_t step) {
    result.history.steps.push_back(step);
    result.history.times.push_back(static_cast<double>(step) * options.dt);
    for (std::size_t m = 0; m < options.tracked_modes.size(); ++m) {
      const auto [kx, ky] = options.tracked_modes[m];
      result.history.modes[m].amplitude.push_back(std::abs(coeffs.data()[mode_index(kx, ky, nx, ny)]));
    }
  };
  for (const auto& [kx, ky] : options.tracked_modes) result.history.modes.push_back({kx, ky, {}});
  std::vector<bool> untracked_mask(static_cast<std::size_t>(nx) * ny, true);
  untracked_mask[0] = false;
  for (const auto& [kx, ky] : options.tracked_modes) {
    // A real field carries each mode together with its conjugate.
    untracked_mask[mode_index(kx, ky, nx, ny)] = false;
    untracked_mask[mode_index(-kx, -ky, nx, ny)] = false;
  }
  record(0);

  for (std::int64_t step = 1; step <= options.steps; ++step) {
    const ComplexGrid psi = coeffs.cwiseProduct(potential_symbol);
    const Matrix grad_x = t.inverse(psi.cwiseProduct(dx_symbol));
    const Matrix grad_y = t.inverse(psi.cwiseProduct(dy_symbol));
    const ComplexGrid flux_x = t.forward(p.cwiseProduct(grad_x));
    const ComplexGrid flux_y = t.forward(p.cwiseProduct(grad_y));
    const ComplexGrid rhs = sign * (flux_x.cwiseProduct(dx_symbol) + flux_y.cwiseProduct(dy_symbol));

    if (options.integrator == Integrator::explicit_euler) {
      coeffs += options.dt * rhs;
    } else {
      for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
          const double lin = linear_symbol(options.kind, options.epsilon, level, i, j, nx, ny);
          const std::complex<double> nonlinear = rhs(i, j) - lin * coeffs(i, j);
          coeffs(i, j) = growth(i, j) * coeffs(i, j) + options.dt * phi(i, j) * nonlinear;
        }
      }
    }
    p = t.inverse(coeffs);
    if (!p.allFinite()) throw std::domain_error("evolve: field became non-finite");
    if (result.negative_density_step < 0 && p.minCoeff() < 0.0) result.negative_density_step = step;
    record(step);

    double tracked = 0.0;
    for (const auto& m : result.history.modes) tracked = std::max(tracked, m.amplitude.back());
    if (options.stop_amplitude > 0.0 && tracked > options.stop_amplitude) {
      result.stop_reason = StopReason::amplitude;
      break;
    }
    if (options.contamination_limit > 0.0 &&
        largest_untracked(coeffs, untracked_mask) > options.contamination_limit * tracked) {
      result.stop_reason = StopReason::contamination;
      break;
    }
  }
  result.final_mass = coeffs(0, 0).real();
  result.field = GridField{p, level};
  return result;
}

double measure_growth_rate(const std::vector<double>& times, const std::vector<double>& amplitude,
                           std::size_t begin, std::size_t end, double floor) {
  if (times.size() != amplitude.size()) throw std::invalid_argument("growth rate: length mismatch");
  end = std::min(end, amplitude.size());
  std::vector<double> t, y;
  for (std::size_t i = begin; i < end; ++i) {
    if (!(amplitude[i] > floor) || !std::isfinite(amplitude[i])) break;
    t.push_back(times[i]);
    y.push_back(std::log(amplitude[i]));
  }
  if (t.size() < 2) throw std::invalid_argument("growth rate: fewer than two usable samples");
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t_mean += t[i];
    y_mean += y[i];
  }
  t_mean /= static_cast<double>(t.size());
  y_mean /= static_cast<double>(t.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - t_mean) * (y[i] - y_mean);
    den += (t[i] - t_mean) * (t[i] - t_mean);
  }
  if (den == 0.0) throw std::invalid_argument("growth rate: degenerate time window");
  return num / den;
}

}  // namespace eie::spectral
