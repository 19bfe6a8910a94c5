#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "equiset/matrix.hpp"

namespace equiset::datasets {

// One labeled multidimensional knapsack instance. Column 0 of x holds item
// values, columns 1..3 the three cost kinds; all entries are non-negative
// integers stored as doubles.
struct KnapsackInstance {
    Matrix x;  // n x 4
    std::array<long long, 3> budgets{100, 80, 50};
    std::vector<int> z_star;  // 0/1 per item, the canonical optimal subset
    long long v_star = 0;     // optimal total value
};

struct KnapsackSolution {
    std::vector<int> z;
    long long value = 0;
};

// Exact optimum by dynamic programming over the 3-d budget lattice. Among
// equal-value optima, returns the one preferring z_i = 0 at the largest index
// where candidates differ. Entries must be non-negative integers.
KnapsackSolution solve_knapsack_dp(const Matrix& x, const std::array<long long, 3>& budgets);

// True iff pred satisfies all three budgets and reaches at least 90% of the
// optimal value (boundary inclusive; compared in exact integer arithmetic).
bool knapsack_success(std::span<const int> pred, const KnapsackInstance& instance);

// Per instance: V ~ U{1..value_cap} then n value draws from U{1..V};
// C ~ U{1..cost_cap} then 3n cost draws from U{1..C} (row-major across the
// cost columns); labels from solve_knapsack_dp.
std::vector<KnapsackInstance> gen_knapsack(std::uint64_t seed, std::size_t n, std::size_t count,
                                           long long value_cap = 100, long long cost_cap = 25,
                                           std::array<long long, 3> budgets = {100, 80, 50});

}  // namespace equiset::datasets
