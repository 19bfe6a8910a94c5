#pragma once

// Deliberately naive reference implementations for tests. Kept out of the
// library so the shipped code never depends on them.

#include <array>
#include <cstdint>
#include <vector>

#include "equiset/knapsack.hpp"
#include "equiset/matrix.hpp"

namespace oracles {

// Exhaustive scan over all 2^n subsets in ascending bit-mask order, keeping a
// subset only on strict value improvement. Bit i of the mask is z_i, so the
// first optimum found is the one with z_i = 0 at the largest index where two
// optima differ, matching the solver's canonical tie rule.
inline equiset::datasets::KnapsackSolution brute_force_knapsack(
    const equiset::Matrix& x, const std::array<long long, 3>& budgets) {
    const std::size_t n = x.rows();
    equiset::datasets::KnapsackSolution best;
    best.z.assign(n, 0);
    best.value = 0;

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        long long value = 0;
        std::array<long long, 3> used{0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                value += static_cast<long long>(x(i, 0));
                for (std::size_t b = 0; b < 3; ++b) {
                    used[b] += static_cast<long long>(x(i, b + 1));
                }
            }
        }
        if (used[0] <= budgets[0] && used[1] <= budgets[1] && used[2] <= budgets[2] &&
            value > best.value) {
            best.value = value;
            for (std::size_t i = 0; i < n; ++i) {
                best.z[i] = (mask & (std::uint64_t{1} << i)) ? 1 : 0;
            }
        }
    }
    return best;
}

}  // namespace oracles
