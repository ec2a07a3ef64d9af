#pragma once

#include <optional>

#include "eie/linalg.hpp"

namespace eie {

/// Cutoff elastic kernel parameters: exponent dimension n (kernel ~ 1/r^(n-1))
/// and cutoff radius R below which the singularity is replaced by a polynomial cap.
struct KernelConfig {
  int dim_n = 2;
  double cutoff_R = 0.1;

  void validate() const;
};

/// Steeper cutoff kernel subtracted with weight eps from the elastic kernel.
/// order_m must exceed the paired kernel's dim_n; weight_eps = 0 disables it.
struct StabilizerConfig {
  int order_m = 3;
  double cutoff_Rs = 0.8;
  double weight_eps = 1.0;

  void validate() const;
  void validate_against(const KernelConfig& kernel) const;
};

/// x^k for small non-negative integer k by repeated multiplication.
inline double ipow(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

/// Generic capped power kernel of order p:
///   1/r^(p-1)                              r > R
///   ((p+1)/p R^p - r^p/p) / R^(2p-1)       r <= R
double cutoff_power_kernel(int order, double R, double r);

/// Radial factor f(r) with grad_x k(|x-y|) = f(r) (x - y).
double cutoff_power_kernel_radial(int order, double R, double r);

double elastic_kernel(const KernelConfig& cfg, double r);
Vector elastic_kernel_grad(const KernelConfig& cfg, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y);

double stabilizer_kernel(const StabilizerConfig& cfg, double r);
Vector stabilizer_kernel_grad(const StabilizerConfig& cfg, const Eigen::Ref<const Vector>& x,
                              const Eigen::Ref<const Vector>& y);

/// e(r) - eps * e_s(r). Negative for small r once eps is large enough.
double combined_kernel(const KernelConfig& k, const StabilizerConfig& s, double r);
Vector combined_kernel_grad(const KernelConfig& k, const StabilizerConfig& s,
                            const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Radial pair kernel used by the energy sums: either the plain elastic kernel
/// or the stabilized combination. Cheap to copy.
class PairKernel {
 public:
  static PairKernel elastic(const KernelConfig& k);
  static PairKernel combined(const KernelConfig& k, const StabilizerConfig& s);

  double value(double r) const;
  /// f(r) such that the gradient w.r.t. the first point is f(r) * (x - y).
  double radial(double r) const;

  const KernelConfig& kernel() const { return kernel_; }
  const std::optional<StabilizerConfig>& stabilizer() const { return stabilizer_; }

 private:
  PairKernel(const KernelConfig& k, std::optional<StabilizerConfig> s)
      : kernel_(k), stabilizer_(s) {}

  KernelConfig kernel_;
  std::optional<StabilizerConfig> stabilizer_;
};

}  // namespace eie
