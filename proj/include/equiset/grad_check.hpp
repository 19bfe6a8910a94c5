#pragma once

#include <functional>
#include <span>

#include "equiset/matrix.hpp"
#include "equiset/tape.hpp"

namespace equiset {

// A scalar-valued function of a parameter list, expressed as a tape program.
// Must return a 1x1 Var.
using ScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

// Compares reverse-mode gradients against central differences with the given
// step. Returns the max over all parameter entries of
//   |autodiff - central| / (|autodiff| + |central| + 1e-12).
double grad_check(const ScalarFn& f, std::span<const Matrix> params, double step);

}  // namespace equiset
