#pragma once

#include <stdexcept>
#include <string>

namespace manyiv {

// Error taxonomy mirrored by the CLI exit codes: config -> 2, data -> 3,
// numerical -> 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct convergence_error : numerical_error {
  using numerical_error::numerical_error;
};

struct singular_weight_error : numerical_error {
  using numerical_error::numerical_error;
};

}  // namespace manyiv
