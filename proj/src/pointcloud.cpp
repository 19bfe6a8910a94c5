#include "equiset/pointcloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "equiset/errors.hpp"
#include "equiset/rng.hpp"

namespace equiset::datasets {

Graph knn_graph(const Matrix& points, std::size_t k_neighbors) {
    const std::size_t n = points.rows();
    if (k_neighbors == 0) throw std::invalid_argument("knn_graph: k_neighbors must be >= 1");
    if (n <= k_neighbors) {
        throw std::domain_error("knn_graph: need more than " + std::to_string(k_neighbors) +
                                " points, got " + std::to_string(n));
    }
    Graph graph;
    graph.n = n;
    graph.adjacency = Matrix(n, n);

    std::vector<std::pair<double, std::size_t>> candidates(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < points.cols(); ++c) {
                const double d = points(i, c) - points(j, c);
                d2 += d * d;
            }
            candidates[m++] = {d2, j};
        }
        // Distance ties resolved toward the smaller index by the pair order.
        std::partial_sort(candidates.begin(), candidates.begin() + k_neighbors,
                          candidates.end());
        for (std::size_t r = 0; r < k_neighbors; ++r) {
            const std::size_t j = candidates[r].second;
            graph.adjacency(i, j) = 1.0;
            graph.adjacency(j, i) = 1.0;  // union symmetrization
        }
    }
    return graph;
}

Matrix graph_laplacian(const Graph& graph) {
    const std::size_t n = graph.n;
    if (graph.adjacency.rows() != n || graph.adjacency.cols() != n) {
        throw std::invalid_argument("graph_laplacian: adjacency " + graph.adjacency.shape_str() +
                                    " does not match n=" + std::to_string(n));
    }
    Matrix lap(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            degree += graph.adjacency(i, j);
            lap(i, j) = -graph.adjacency(i, j);
        }
        lap(i, i) += degree;
    }
    return lap;
}

SymmetricEigen jacobi_eigen(Matrix a, std::size_t max_sweeps) {
    const std::size_t n = a.rows();
    if (a.cols() != n || n == 0) {
        throw std::invalid_argument("jacobi_eigen: need a non-empty square matrix, got " +
                                    a.shape_str());
    }
    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, scale)) {
                throw std::invalid_argument("jacobi_eigen: matrix is not symmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }

    Matrix vectors = Matrix::identity(n);
    const double tol = 1e-14 * std::max(1.0, scale);
    bool converged = false;
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        }
        if (std::sqrt(2.0 * off) <= tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(p, i) = a(i, p);
                    a(i, q) = s * aip + c * aiq;
                    a(q, i) = a(i, q);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = vectors(i, p);
                    const double viq = vectors(i, q);
                    vectors(i, p) = c * vip - s * viq;
                    vectors(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged) {
        // Re-test once more; the final sweep may have finished the job.
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        }
        if (std::sqrt(2.0 * off) > tol) {
            throw numeric_error("jacobi_eigen: no convergence after " +
                                std::to_string(max_sweeps) + " sweeps");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    SymmetricEigen result;
    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        result.values[r] = a(order[r], order[r]);
        for (std::size_t i = 0; i < n; ++i) result.vectors(i, r) = vectors(i, order[r]);
    }
    return result;
}

FiedlerPair fiedler_pair(const Graph& graph) {
    if (graph.n < 2) {
        throw std::invalid_argument("fiedler_pair: need at least 2 nodes");
    }
    const SymmetricEigen eigen = jacobi_eigen(graph_laplacian(graph));
    FiedlerPair pair;
    pair.value = eigen.values[1];
    pair.vector = Matrix(graph.n, 1);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < graph.n; ++i) {
        pair.vector(i, 0) = eigen.vectors(i, 1);
        norm2 += pair.vector(i, 0) * pair.vector(i, 0);
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw numeric_error("fiedler_pair: eigenvector collapsed to zero");
    for (std::size_t i = 0; i < graph.n; ++i) pair.vector(i, 0) /= norm;
    return pair;
}

Matrix fiedler_of_graph(const Graph& graph) {
    FiedlerPair pair = fiedler_pair(graph);
    for (double& v : pair.vector.data()) v = std::abs(v);
    return pair.vector;
}

Matrix fiedler_target(const Matrix& points, std::size_t k_neighbors) {
    return fiedler_of_graph(knn_graph(points, k_neighbors));
}

Matrix sample_point_cloud(std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample_point_cloud: n must be >= 1");
    Rng rng(seed);

    std::array<double, 3> sphere_center;
    for (double& c : sphere_center) c = rng.uniform(0.4, 0.6);
    const double sphere_radius = rng.uniform(0.15, 0.3);

    std::array<double, 3> box_center;
    for (double& c : box_center) c = rng.uniform(0.4, 0.6);
    std::array<double, 3> box_extent;
    for (double& e : box_extent) e = rng.uniform(0.08, 0.17);

    // Rotation composed from axis rotations; any orientation bias is harmless
    // here, the clouds only need variety.
    const double ax = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double ay = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double cx = std::cos(ax), sx = std::sin(ax);
    const double cy = std::cos(ay), sy = std::sin(ay);
    const double cz = std::cos(az), sz = std::sin(az);
    const double rot[3][3] = {
        {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx},
        {sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx},
        {-sy, cy * sx, cy * cx},
    };

    Matrix points(n, 3);
    const std::size_t sphere_count = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < sphere_count) {
            double d[3];
            double norm = 0.0;
            do {
                norm = 0.0;
                for (double& v : d) {
                    v = rng.normal();
                    norm += v * v;
                }
                norm = std::sqrt(norm);
            } while (norm < 1e-12);
            for (std::size_t c = 0; c < 3; ++c) {
                points(i, c) = sphere_center[c] + sphere_radius * d[c] / norm;
            }
        } else {
            const long long face = rng.uniform_int(0, 5);
            const std::size_t axis = static_cast<std::size_t>(face / 2);
            double local[3];
            local[axis] = (face % 2 == 0) ? -1.0 : 1.0;
            local[(axis + 1) % 3] = rng.uniform(-1.0, 1.0);
            local[(axis + 2) % 3] = rng.uniform(-1.0, 1.0);
            for (std::size_t c = 0; c < 3; ++c) local[c] *= box_extent[c];
            for (std::size_t r = 0; r < 3; ++r) {
                double v = 0.0;
                for (std::size_t c = 0; c < 3; ++c) v += rot[r][c] * local[c];
                points(i, r) = box_center[r] + v;
            }
        }
    }
    return points;
}

}  // namespace equiset::datasets
