#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "equiset/tape.hpp"

namespace equiset::layers {

// X A + (1/n) 1 1^T X B + 1 c^T. The B term is the only cross-row mixing;
// omitting it gives a strictly per-row affine map. Omitting c drops the bias.
Var affine_equivariant(Tape& tape, Var x, Var a, std::optional<Var> b, std::optional<Var> c);

// X W1 + 1 1^T X W2 + (1 1^T X)⊙(1 1^T X) W3 + (X⊙X) W4 + (1 1^T X)⊙X W5.
// Row sums are unnormalized here, unlike the affine layer's 1/n term.
Var quadratic_equivariant(Tape& tape, Var x, const std::array<Var, 5>& w);

// P X W2 + X W1 + 1 c^T. The propagation matrix P is a fixed constant (no
// gradient flows into it); pass a normalized adjacency for graph convolution.
Var graph_conv(Tape& tape, Var x, const Matrix& propagation, Var w1, Var w2,
               std::optional<Var> c);

// Ensures unit self-loops, then returns D^{-1/2} (A + I) D^{-1/2} where D is
// the degree matrix of the self-looped adjacency. Input must be a symmetric
// 0/1 matrix.
Matrix normalize_adjacency(const Matrix& adjacency);

// Columnwise maximum over rows as a 1 x k matrix. The differentiable version
// is Tape::col_max.
Matrix max_pool(const Matrix& x);

// k_out + k_in + C(n + k_in, k_in): a per-row feature width sufficient for a
// single-transmission network to approximate any equivariant map on n x k_in
// inputs.
std::uint64_t width_bound(std::size_t n, std::size_t k_in, std::size_t k_out);

}  // namespace equiset::layers
