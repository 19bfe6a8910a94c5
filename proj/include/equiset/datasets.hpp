#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "equiset/knapsack.hpp"
#include "equiset/matrix.hpp"

namespace equiset::datasets {

enum class Task { Knapsack, Quadratic, Fiedler, GcnApprox };

const char* task_name(Task task);
Task parse_task(std::string_view name);

struct Example {
    Matrix x;  // n x k_in
    Matrix y;  // n x k_out (knapsack: the 0/1 subset column)
};

struct Dataset {
    Task task = Task::Quadratic;
    std::size_t n = 0;
    std::size_t k_in = 0;
    std::size_t k_out = 0;
    std::vector<Example> examples;
    // Knapsack only: full instances aligned with examples (budgets and the
    // optimal value are needed by the success metric).
    std::vector<KnapsackInstance> instances;

    std::size_t size() const { return examples.size(); }
};

// Every output row holds the same scalar sum_ij (x_ij - 1/2)^2.
Matrix quadratic_target(const Matrix& x);

Dataset knapsack_dataset(std::uint64_t seed, std::size_t n, std::size_t count,
                         long long value_cap = 100, long long cost_cap = 25,
                         std::array<long long, 3> budgets = {100, 80, 50});

// X entries i.i.d. Normal(mean 1/2, std 1); target quadratic_target.
Dataset quadratic_dataset(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t count);

// Sampled point clouds labeled with the absolute Fiedler eigenvector of their
// k-nearest-neighbor graph.
Dataset fiedler_dataset(std::uint64_t seed, std::size_t n, std::size_t count,
                        std::size_t k_neighbors = 10);

// One graph convolution layer with parameters drawn once from layer_seed
// labels clouds of Normal(1/2, 1) features; the propagation matrix is the
// normalized adjacency of each example's own k-nearest-neighbor graph. Use
// the same layer_seed with different data_seeds for train/test splits.
Dataset gcn_regression_dataset(std::uint64_t layer_seed, std::uint64_t data_seed,
                               std::size_t count = 1000, std::size_t n = 100,
                               std::size_t k_in = 3, std::size_t k_out = 10,
                               std::size_t k_neighbors = 10);

// Textual container: one header line, then one whitespace-separated record
// per example (x row-major, y row-major; knapsack records append the three
// budgets and the optimal value). 17 significant digits, lossless.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace equiset::datasets
