#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "eie/linalg.hpp"
#include "eie/rng.hpp"

namespace eie::testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

// Relative error on vectors, measured against the larger norm.
inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// Central differences of a scalar function of a matrix argument.
inline Matrix numeric_grad(const std::function<double(const Matrix&)>& f, const Matrix& at,
                           double h = 1e-5) {
  Matrix grad(at.rows(), at.cols());
  Matrix probe = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = f(probe);
      probe(i, j) = saved - h;
      const double down = f(probe);
      probe(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

inline Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

}  // namespace eie::testing
