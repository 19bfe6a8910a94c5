#include "equiset/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "equiset/sympoly.hpp"

namespace equiset::layers {

Var affine_equivariant(Tape& tape, Var x, Var a, std::optional<Var> b, std::optional<Var> c) {
    const std::size_t n = tape.value(x).rows();
    Var out = tape.matmul(x, a);
    if (b) {
        const Var mean_row = tape.col_mean(x);  // 1 x k
        const Var mixed = tape.matmul(mean_row, *b);
        out = tape.add(out, tape.broadcast_rows(mixed, n));
    }
    if (c) {
        out = tape.add(out, tape.broadcast_rows(*c, n));
    }
    return out;
}

Var quadratic_equivariant(Tape& tape, Var x, const std::array<Var, 5>& w) {
    const std::size_t n = tape.value(x).rows();
    const Var sums = tape.broadcast_rows(tape.col_sum(x), n);  // 1 1^T X
    Var out = tape.matmul(x, w[0]);
    out = tape.add(out, tape.matmul(sums, w[1]));
    out = tape.add(out, tape.matmul(tape.hadamard(sums, sums), w[2]));
    out = tape.add(out, tape.matmul(tape.hadamard(x, x), w[3]));
    out = tape.add(out, tape.matmul(tape.hadamard(sums, x), w[4]));
    return out;
}

Var graph_conv(Tape& tape, Var x, const Matrix& propagation, Var w1, Var w2,
               std::optional<Var> c) {
    const std::size_t n = tape.value(x).rows();
    if (propagation.rows() != n || propagation.cols() != n) {
        throw std::invalid_argument("graph_conv: propagation " + propagation.shape_str() +
                                    " does not match " + std::to_string(n) + " rows");
    }
    const Var p = tape.constant(propagation);
    Var out = tape.add(tape.matmul(tape.matmul(p, x), w2), tape.matmul(x, w1));
    if (c) {
        out = tape.add(out, tape.broadcast_rows(*c, n));
    }
    return out;
}

Matrix normalize_adjacency(const Matrix& adjacency) {
    const std::size_t n = adjacency.rows();
    if (n == 0 || adjacency.cols() != n) {
        throw std::invalid_argument("normalize_adjacency: need a square matrix, got " +
                                    adjacency.shape_str());
    }
    Matrix a = adjacency;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a(i, j);
            if (v != 0.0 && v != 1.0) {
                throw std::invalid_argument("normalize_adjacency: entries must be 0 or 1");
            }
            if (v != a(j, i)) {
                throw std::invalid_argument("normalize_adjacency: adjacency must be symmetric");
            }
        }
        a(i, i) = 1.0;  // self-loop; idempotent when already present
    }

    std::vector<double> inv_sqrt_degree(n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) degree += a(i, j);
        inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);  // >= 1 thanks to the self-loop
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) *= inv_sqrt_degree[i] * inv_sqrt_degree[j];
        }
    }
    return a;
}

Matrix max_pool(const Matrix& x) {
    if (x.rows() == 0) throw std::invalid_argument("max_pool: empty input");
    return col_max(x);
}

std::uint64_t width_bound(std::size_t n, std::size_t k_in, std::size_t k_out) {
    if (n == 0 || k_in == 0 || k_out == 0) {
        throw std::invalid_argument("width_bound: all arguments must be >= 1");
    }
    return static_cast<std::uint64_t>(k_out) + static_cast<std::uint64_t>(k_in) +
           sympoly::binomial(n + k_in, k_in);
}

}  // namespace equiset::layers
