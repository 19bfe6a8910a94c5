#pragma once

#include <stdexcept>

namespace equiset {

// Raised when a computation leaves the finite range (NaN/Inf losses,
// eigensolver non-convergence). The CLI maps this to exit code 3;
// invalid_argument / domain_error map to exit code 2.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace equiset
