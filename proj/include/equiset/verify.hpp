#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "equiset/model.hpp"

namespace equiset::verify {

// Outcome of one property suite: a pass flag plus one human-readable line per
// check. Lines for failed checks start with "FAIL" and carry a counterexample
// where one exists.
struct SuiteReport {
    bool pass = true;
    std::vector<std::string> lines;

    void ok(std::string line);
    void fail(std::string line);
};

struct EquivarianceParams {
    std::size_t n = 8;
    std::size_t k_in = 4;
    std::size_t k_out = 3;
    std::size_t width = 32;
    std::size_t depth = 6;
    std::size_t trials = 100;
    double tol = 1e-6;
    std::uint64_t seed = 20240601;
    // Empty means every architecture except the non-equivariant Mlp baseline.
    std::vector<Architecture> architectures;
};

// Randomly initialized models of each architecture, checked for
// F(perm(X)) == perm(F(X)) over random inputs and permutations. GraphNet
// rebuilds its propagation matrix from each (possibly permuted) input, which
// is the operating mode the equivariance claim covers.
SuiteReport equivariance_suite(const EquivarianceParams& params);

struct SumFitParams {
    std::size_t n = 5;
    std::size_t depth = 3;
    std::size_t width = 16;
    std::size_t train_examples = 256;
    std::size_t epochs = 150;
    std::uint64_t seed = 7;
};

// Per-row networks cannot represent the row sum: at the pair of inputs e_1
// and 0 (which differ only in row 1), every row past the first produces
// bit-identical outputs, so some row misses h(X) = 1 1^T X by at least 1/2.
// Checked on an untrained model and again after fitting h by gradient
// descent.
SuiteReport sum_fit_suite(const SumFitParams& params);

struct DecompositionParams {
    std::size_t polys_per_shape = 20;
    std::size_t term_count = 4;
    int degree_cap = 2;
    double roundtrip_tol = 1e-6;
    double symmetrize_tol = 1e-9;
    std::size_t basis_limit = 8;  // t-count cross-check covers n, k <= this
    std::size_t n_filter = 0;     // restrict round-trip shapes to this n (0 = all)
    std::size_t k_filter = 0;     // restrict round-trip shapes to this k (0 = all)
    std::uint64_t seed = 11;
};

// Facts about the power-sum machinery: random equivariant polynomials
// round-trip through sampling + least-squares decomposition; the map
// X -> 1 1^T X decomposes as the constant monomial vector times the first
// power sum; symmetrizing an arbitrary (row-dependent) map yields an
// equivariant one; the basis size matches C(n+k, k) counted by enumeration.
SuiteReport decomposition_suite(const DecompositionParams& params);

// width_bound against an independent Pascal-triangle binomial for all
// n, k_in <= 10 and several k_out, plus the (5, 3, 1) -> 60 spot value.
SuiteReport width_bound_suite();

struct GradCheckParams {
    std::size_t configs = 50;
    double tol = 1e-4;
    double step = 1e-6;
    std::uint64_t seed = 3;
};

// Reverse-mode gradients of loss(model(X)) against central differences over
// random architectures, shapes and losses.
SuiteReport grad_check_suite(const GradCheckParams& params);

}  // namespace equiset::verify
