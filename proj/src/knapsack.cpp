#include "equiset/knapsack.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "equiset/rng.hpp"

namespace equiset::datasets {

namespace {

long long integer_entry(double v, const char* what, std::size_t row, std::size_t col) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
        throw std::domain_error(std::string(what) + " must be a non-negative integer, got " +
                                std::to_string(v) + " at (" + std::to_string(row) + ", " +
                                std::to_string(col) + ")");
    }
    return static_cast<long long>(v);
}

}  // namespace

KnapsackSolution solve_knapsack_dp(const Matrix& x, const std::array<long long, 3>& budgets) {
    const std::size_t n = x.rows();
    if (x.cols() != 4) {
        throw std::invalid_argument("solve_knapsack_dp: expected n x 4 input, got " +
                                    x.shape_str());
    }
    for (long long w : budgets) {
        if (w < 0) throw std::invalid_argument("solve_knapsack_dp: budgets must be >= 0");
    }

    std::vector<long long> value(n);
    std::vector<std::array<long long, 3>> cost(n);
    std::array<long long, 3> cost_sum{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        value[i] = integer_entry(x(i, 0), "item value", i, 0);
        for (std::size_t j = 0; j < 3; ++j) {
            cost[i][j] = integer_entry(x(i, j + 1), "item cost", i, j + 1);
            cost_sum[j] += cost[i][j];
        }
    }

    KnapsackSolution solution;
    solution.z.assign(n, 0);

    bool all_fit = true;
    bool all_valued = true;
    for (std::size_t j = 0; j < 3; ++j) all_fit = all_fit && cost_sum[j] <= budgets[j];
    for (std::size_t i = 0; i < n; ++i) all_valued = all_valued && value[i] > 0;
    if (all_fit && all_valued) {
        // Unique optimum: every item carries positive value and they all fit.
        for (std::size_t i = 0; i < n; ++i) {
            solution.z[i] = 1;
            solution.value += value[i];
        }
        return solution;
    }

    // Budget axes clamped to the total cost; larger budgets change nothing.
    std::array<std::size_t, 3> w{};
    for (std::size_t j = 0; j < 3; ++j) {
        w[j] = static_cast<std::size_t>(std::min(budgets[j], cost_sum[j]));
    }
    const std::size_t d1 = w[1] + 1;
    const std::size_t d2 = w[2] + 1;
    const std::size_t states = (w[0] + 1) * d1 * d2;
    if (states > 300'000'000) {
        throw std::invalid_argument("solve_knapsack_dp: budget lattice of " +
                                    std::to_string(states) + " states is too large");
    }

    std::vector<long long> dp(states, 0);
    // One take/leave bit per (item, state), for backtracking the subset.
    std::vector<std::uint64_t> taken((n * states + 63) / 64, 0);

    for (std::size_t i = 0; i < n; ++i) {
        const long long v = value[i];
        const std::size_t c0 = static_cast<std::size_t>(cost[i][0]);
        const std::size_t c1 = static_cast<std::size_t>(cost[i][1]);
        const std::size_t c2 = static_cast<std::size_t>(cost[i][2]);
        if (c0 > w[0] || c1 > w[1] || c2 > w[2]) continue;  // can never be packed
        const std::size_t offset = (c0 * d1 + c1) * d2 + c2;
        const std::size_t bit_base = i * states;
        // Descending states read the previous item's row in place; a strict
        // improvement test leaves ties at z_i = 0, which backtracks to the
        // optimum preferring 0 at the largest differing index.
        for (std::size_t b0 = w[0]; b0 >= c0; --b0) {
            for (std::size_t b1 = w[1]; b1 >= c1; --b1) {
                std::size_t idx = (b0 * d1 + b1) * d2 + w[2];
                for (std::size_t b2 = w[2]; b2 >= c2; --b2, --idx) {
                    const long long cand = dp[idx - offset] + v;
                    if (cand > dp[idx]) {
                        dp[idx] = cand;
                        const std::size_t bit = bit_base + idx;
                        taken[bit >> 6] |= std::uint64_t{1} << (bit & 63);
                    }
                    if (b2 == c2) break;
                }
                if (b1 == c1) break;
            }
            if (b0 == c0) break;
        }
    }

    std::array<std::size_t, 3> state{w[0], w[1], w[2]};
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t idx = (state[0] * d1 + state[1]) * d2 + state[2];
        const std::size_t bit = i * states + idx;
        if (taken[bit >> 6] >> (bit & 63) & 1) {
            solution.z[i] = 1;
            solution.value += value[i];
            state[0] -= static_cast<std::size_t>(cost[i][0]);
            state[1] -= static_cast<std::size_t>(cost[i][1]);
            state[2] -= static_cast<std::size_t>(cost[i][2]);
        }
    }
    return solution;
}

bool knapsack_success(std::span<const int> pred, const KnapsackInstance& instance) {
    const std::size_t n = instance.x.rows();
    if (pred.size() != n) {
        throw std::invalid_argument("knapsack_success: prediction length " +
                                    std::to_string(pred.size()) + " vs " + std::to_string(n) +
                                    " items");
    }
    long long total_value = 0;
    std::array<long long, 3> total_cost{0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        if (pred[i] == 0) continue;
        total_value += static_cast<long long>(instance.x(i, 0));
        for (std::size_t j = 0; j < 3; ++j) {
            total_cost[j] += static_cast<long long>(instance.x(i, j + 1));
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        if (total_cost[j] > instance.budgets[j]) return false;
    }
    // value >= 0.9 * v_star, boundary inclusive, in exact integer arithmetic.
    return 10 * total_value >= 9 * instance.v_star;
}

std::vector<KnapsackInstance> gen_knapsack(std::uint64_t seed, std::size_t n, std::size_t count,
                                           long long value_cap, long long cost_cap,
                                           std::array<long long, 3> budgets) {
    if (n == 0) throw std::invalid_argument("gen_knapsack: n must be >= 1");
    if (value_cap < 1 || cost_cap < 1) {
        throw std::invalid_argument("gen_knapsack: caps must be >= 1");
    }
    Rng rng(seed);
    std::vector<KnapsackInstance> instances;
    instances.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        KnapsackInstance instance;
        instance.budgets = budgets;
        instance.x = Matrix(n, 4);
        const long long value_range = rng.uniform_int(1, value_cap);
        for (std::size_t i = 0; i < n; ++i) {
            instance.x(i, 0) = static_cast<double>(rng.uniform_int(1, value_range));
        }
        const long long cost_range = rng.uniform_int(1, cost_cap);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 1; j <= 3; ++j) {
                instance.x(i, j) = static_cast<double>(rng.uniform_int(1, cost_range));
            }
        }
        KnapsackSolution solution = solve_knapsack_dp(instance.x, budgets);
        instance.z_star = std::move(solution.z);
        instance.v_star = solution.value;
        instances.push_back(std::move(instance));
    }
    return instances;
}

}  // namespace equiset::datasets
