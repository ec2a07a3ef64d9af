#include "eie/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace eie {

namespace {

void check_pair(const SampleBatch& a, const SampleBatch& b, const char* what) {
  check_batch(a, what);
  check_batch(b, what);
  if (a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

double distance(const double* a, const double* b, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

bool same_batch(const SampleBatch& a, const SampleBatch& b) {
  return a.data() == b.data() && a.rows() == b.rows() && a.cols() == b.cols();
}

// out.row(i) += scale * sum_j f(|a_i - b_j|) (a_i - b_j)
void accumulate_radial(const SampleBatch& a, const SampleBatch& b, const PairKernel& kernel,
                       double scale, SampleBatch& out) {
  const Eigen::Index d = a.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  if (same_batch(a, b)) {
    // Antisymmetric pair terms: visit each unordered pair once.
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double* ai = pa + i * d;
      for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
        const double* aj = pa + j * d;
        const double r = distance(ai, aj, d);
        if (r == 0.0) continue;
        const double f = scale * kernel.radial(r);
        for (Eigen::Index k = 0; k < d; ++k) {
          const double t = f * (ai[k] - aj[k]);
          po[i * d + k] += t;
          po[j * d + k] -= t;
        }
      }
    }
    return;
  }
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double* ai = pa + i * d;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double* bj = pb + j * d;
      const double r = distance(ai, bj, d);
      if (r == 0.0) continue;
      const double f = kernel.radial(r);
      for (Eigen::Index k = 0; k < d; ++k) acc[static_cast<std::size_t>(k)] += f * (ai[k] - bj[k]);
    }
    for (Eigen::Index k = 0; k < d; ++k) po[i * d + k] += scale * acc[static_cast<std::size_t>(k)];
  }
}

}  // namespace

double pair_sum(const SampleBatch& a, const SampleBatch& b, const PairKernel& kernel) {
  const Eigen::Index d = a.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double total = 0.0;
  if (same_batch(a, b)) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < a.rows(); ++j) off += kernel.value(distance(pa + i * d, pa + j * d, d));
    }
    return 2.0 * off + static_cast<double>(a.rows()) * kernel.value(0.0);
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) total += kernel.value(distance(pa + i * d, pb + j * d, d));
  }
  return total;
}

double eieg_estimate(const SampleBatch& x, const SampleBatch& y, const PairKernel& kernel) {
  check_pair(x, y, "eieg_estimate");
  const double n = static_cast<double>(x.rows());
  const double m = static_cast<double>(y.rows());
  const double xx = pair_sum(x, x, kernel) / (n * n);
  const double yy = pair_sum(y, y, kernel) / (m * m);
  const double xy = pair_sum(x, y, kernel) / (n * m);
  return (xx + yy) - 2.0 * xy;
}

SampleBatch eieg_grad_wrt(const SampleBatch& y, const SampleBatch& x, const PairKernel& kernel) {
  check_pair(x, y, "eieg_grad_wrt");
  const double n = static_cast<double>(x.rows());
  const double m = static_cast<double>(y.rows());
  SampleBatch grad = SampleBatch::Zero(y.rows(), y.cols());
  accumulate_radial(y, y, kernel, 2.0 / (m * m), grad);
  accumulate_radial(y, x, kernel, -2.0 / (n * m), grad);
  return grad;
}

double generator_loss(const SampleBatch& x_feat, const SampleBatch& g_feat, const PairKernel& kernel,
                      bool self_interaction) {
  check_pair(x_feat, g_feat, "generator_loss");
  const double n = static_cast<double>(x_feat.rows());
  const double m = static_cast<double>(g_feat.rows());
  const double cross = -2.0 * pair_sum(x_feat, g_feat, kernel) / (n * m);
  if (!self_interaction) return cross;
  return pair_sum(g_feat, g_feat, kernel) / (m * m) + cross;
}

SampleBatch generator_loss_grad(const SampleBatch& x_feat, const SampleBatch& g_feat,
                                const PairKernel& kernel, bool self_interaction) {
  check_pair(x_feat, g_feat, "generator_loss_grad");
  const double n = static_cast<double>(x_feat.rows());
  const double m = static_cast<double>(g_feat.rows());
  SampleBatch grad = SampleBatch::Zero(g_feat.rows(), g_feat.cols());
  if (self_interaction) accumulate_radial(g_feat, g_feat, kernel, 2.0 / (m * m), grad);
  accumulate_radial(g_feat, x_feat, kernel, -2.0 / (n * m), grad);
  return grad;
}

double discriminator_objective(const SampleBatch& x_feat, const SampleBatch& g_feat,
                               const KernelConfig& kernel, const StabilizerConfig& stabilizer) {
  return eieg_estimate(x_feat, g_feat, PairKernel::combined(kernel, stabilizer));
}

DiscriminatorObjectiveGrad discriminator_objective_grad(const SampleBatch& x_feat,
                                                        const SampleBatch& g_feat,
                                                        const KernelConfig& kernel,
                                                        const StabilizerConfig& stabilizer) {
  const PairKernel k = PairKernel::combined(kernel, stabilizer);
  return {eieg_grad_wrt(x_feat, g_feat, k), eieg_grad_wrt(g_feat, x_feat, k)};
}

double mmd_gaussian(const SampleBatch& x, const SampleBatch& y, double bandwidth) {
  check_pair(x, y, "mmd_gaussian");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd_gaussian: bandwidth must be positive");
  auto gram_sum = [bandwidth](const SampleBatch& a, const SampleBatch& b) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.rows(); ++j) {
        total += std::exp(-(a.row(i) - b.row(j)).squaredNorm() / bandwidth);
      }
    }
    return total;
  };
  const double n = static_cast<double>(x.rows());
  const double m = static_cast<double>(y.rows());
  return gram_sum(x, x) / (n * n) + gram_sum(y, y) / (m * m) - 2.0 * gram_sum(x, y) / (n * m);
}

}  // namespace eie
