#include "eie/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace eie {

void KernelConfig::validate() const {
  if (dim_n < 2) throw std::invalid_argument("kernel dim_n must be >= 2");
  if (!(cutoff_R > 0.0) || !std::isfinite(cutoff_R)) {
    throw std::invalid_argument("kernel cutoff_R must be positive");
  }
}

void StabilizerConfig::validate() const {
  if (order_m < 2) throw std::invalid_argument("stabilizer order_m must be >= 2");
  if (!(cutoff_Rs > 0.0) || !std::isfinite(cutoff_Rs)) {
    throw std::invalid_argument("stabilizer cutoff_Rs must be positive");
  }
  if (!(weight_eps >= 0.0) || !std::isfinite(weight_eps)) {
    throw std::invalid_argument("stabilizer weight_eps must be non-negative");
  }
}

void StabilizerConfig::validate_against(const KernelConfig& kernel) const {
  validate();
  if (order_m <= kernel.dim_n) {
    throw std::invalid_argument("stabilizer order_m must exceed kernel dim_n");
  }
}

double cutoff_power_kernel(int order, double R, double r) {
  if (r > R) return 1.0 / ipow(r, order - 1);
  const double p = order;
  return ((p + 1.0) / p * ipow(R, order) - ipow(r, order) / p) / ipow(R, 2 * order - 1);
}

double cutoff_power_kernel_radial(int order, double R, double r) {
  // Outer: d/dr r^(1-p) = (1-p) r^-p, times (x-y)/r.
  // Inner: d/dr (-r^p / p) / R^(2p-1) = -r^(p-1) / R^(2p-1), times (x-y)/r.
  if (r > R) return -(order - 1.0) / ipow(r, order + 1);
  return -ipow(r, order - 2) / ipow(R, 2 * order - 1);
}

namespace {

Vector radial_gradient(double factor_at_r, const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y) {
  Vector diff = x - y;
  if (diff.isZero(0.0)) return Vector::Zero(diff.size());
  return factor_at_r * diff;
}

}  // namespace

double elastic_kernel(const KernelConfig& cfg, double r) {
  return cutoff_power_kernel(cfg.dim_n, cfg.cutoff_R, r);
}

Vector elastic_kernel_grad(const KernelConfig& cfg, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) {
  const double r = (x - y).norm();
  return radial_gradient(cutoff_power_kernel_radial(cfg.dim_n, cfg.cutoff_R, r), x, y);
}

double stabilizer_kernel(const StabilizerConfig& cfg, double r) {
  return cutoff_power_kernel(cfg.order_m, cfg.cutoff_Rs, r);
}

Vector stabilizer_kernel_grad(const StabilizerConfig& cfg, const Eigen::Ref<const Vector>& x,
                              const Eigen::Ref<const Vector>& y) {
  const double r = (x - y).norm();
  return radial_gradient(cutoff_power_kernel_radial(cfg.order_m, cfg.cutoff_Rs, r), x, y);
}

double combined_kernel(const KernelConfig& k, const StabilizerConfig& s, double r) {
  return elastic_kernel(k, r) - s.weight_eps * stabilizer_kernel(s, r);
}

Vector combined_kernel_grad(const KernelConfig& k, const StabilizerConfig& s,
                            const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  const double r = (x - y).norm();
  const double factor = cutoff_power_kernel_radial(k.dim_n, k.cutoff_R, r) -
                        s.weight_eps * cutoff_power_kernel_radial(s.order_m, s.cutoff_Rs, r);
  return radial_gradient(factor, x, y);
}

PairKernel PairKernel::elastic(const KernelConfig& k) {
  k.validate();
  return PairKernel(k, std::nullopt);
}

PairKernel PairKernel::combined(const KernelConfig& k, const StabilizerConfig& s) {
  k.validate();
  s.validate_against(k);
  return PairKernel(k, s);
}

double PairKernel::value(double r) const {
  const double e = cutoff_power_kernel(kernel_.dim_n, kernel_.cutoff_R, r);
  if (!stabilizer_) return e;
  return e - stabilizer_->weight_eps *
                 cutoff_power_kernel(stabilizer_->order_m, stabilizer_->cutoff_Rs, r);
}

double PairKernel::radial(double r) const {
  const double f = cutoff_power_kernel_radial(kernel_.dim_n, kernel_.cutoff_R, r);
  if (!stabilizer_) return f;
  return f - stabilizer_->weight_eps *
                 cutoff_power_kernel_radial(stabilizer_->order_m, stabilizer_->cutoff_Rs, r);
}

}  // namespace eie
