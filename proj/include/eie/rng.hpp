#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "eie/linalg.hpp"

namespace eie {

/// Seeded random stream with a fixed, portable variate recipe:
///   engine   std::mt19937_64 (bit-exact across standard libraries)
///   uniform  (engine() >> 11) * 2^-53, in [0, 1)
///   normal   Marsaglia polar method, second variate cached
/// std::*_distribution is avoided because its output is implementation-defined.
/// One stream per consumer; never share an Rng across logical consumers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

  /// Index drawn from a discrete distribution given by cumulative weights
  /// (last entry is the total mass).
  std::size_t categorical(const std::vector<double>& cumulative);

  /// rows x cols matrix of independent standard normals, filled row by row.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  /// Derives an independent child seed; used to split a master seed into streams.
  std::uint64_t split() { ++draws_; return engine_(); }

  /// Number of uniform words consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eie
