#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

// Input violates a documented precondition (bad matrix shape, weights that do
// not sum to one, malformed state-set file, ...).
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iterative routine could not reach its requested accuracy.
struct numerics_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qsd
