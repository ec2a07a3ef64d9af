#pragma once

#include "eie/kernels.hpp"
#include "eie/linalg.hpp"

namespace eie {

/// Sum over all ordered pairs (i, j), diagonal included, of k(|a_i - b_j|).
/// Fixed summation order: i outer, j inner.
double pair_sum(const SampleBatch& a, const SampleBatch& b, const PairKernel& kernel);

/// V-statistic estimate of the elastic-energy discrepancy
///   1/N^2 sum k(x_i,x_j) + 1/M^2 sum k(y_i,y_j) - 2/(NM) sum k(x_i,y_j).
/// Symmetric in (X, Y); identical batches give exactly zero.
double eieg_estimate(const SampleBatch& x, const SampleBatch& y, const PairKernel& kernel);

/// Gradient of eieg_estimate(x, y) with respect to the rows of y.
/// Row k: 2/M^2 sum_j grad k(y_k, y_j) - 2/(NM) sum_i grad k(y_k, x_i).
SampleBatch eieg_grad_wrt(const SampleBatch& y, const SampleBatch& x, const PairKernel& kernel);

/// Generator loss on (feature) points: the data self term is dropped since it is
/// constant for the generator. With self_interaction off only the cross term remains.
double generator_loss(const SampleBatch& x_feat, const SampleBatch& g_feat, const PairKernel& kernel,
                      bool self_interaction = true);

/// Gradient of generator_loss with respect to the rows of g_feat.
SampleBatch generator_loss_grad(const SampleBatch& x_feat, const SampleBatch& g_feat,
                                const PairKernel& kernel, bool self_interaction = true);

/// Full three-term estimate with the stabilized kernel e - eps * e_s. The
/// discriminator ascends this value.
double discriminator_objective(const SampleBatch& x_feat, const SampleBatch& g_feat,
                               const KernelConfig& kernel, const StabilizerConfig& stabilizer);

struct DiscriminatorObjectiveGrad {
  SampleBatch wrt_x;
  SampleBatch wrt_g;
};

DiscriminatorObjectiveGrad discriminator_objective_grad(const SampleBatch& x_feat,
                                                        const SampleBatch& g_feat,
                                                        const KernelConfig& kernel,
                                                        const StabilizerConfig& stabilizer);

/// Gaussian-kernel MMD^2 (V-statistic) with k(x,y) = exp(-|x-y|^2 / bandwidth).
double mmd_gaussian(const SampleBatch& x, const SampleBatch& y, double bandwidth);

}  // namespace eie
