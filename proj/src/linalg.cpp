#include "eie/linalg.hpp"

#include <stdexcept>
#include <string>

namespace eie {

void check_batch(const SampleBatch& batch, const char* what) {
  if (batch.rows() < 1 || batch.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": batch must be non-empty");
  }
  if (!batch.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": batch holds non-finite entries");
  }
}

}  // namespace eie
