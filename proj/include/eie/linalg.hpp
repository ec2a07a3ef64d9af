#pragma once

#include <Eigen/Dense>

namespace eie {

/// Row-major dense matrix; batches store one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// N x d batch of sample points (data space or feature space).
using SampleBatch = Matrix;

/// Throws std::invalid_argument if the batch is empty or holds a non-finite entry.
void check_batch(const SampleBatch& batch, const char* what);

}  // namespace eie
