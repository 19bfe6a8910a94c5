#pragma once

#include <cstdint>
#include <vector>

#include "equiset/matrix.hpp"

namespace equiset::datasets {

// Undirected simple graph as a symmetric 0/1 adjacency with zero diagonal.
struct Graph {
    std::size_t n = 0;
    Matrix adjacency;
};

// Each point is linked to its k_neighbors nearest others (Euclidean, ties by
// smaller index), then the directed relation is symmetrized by union.
// Requires points.rows() > k_neighbors.
Graph knn_graph(const Matrix& points, std::size_t k_neighbors);

// Combinatorial Laplacian L = D - A.
Matrix graph_laplacian(const Graph& graph);

// Eigenvalues ascending; vectors.column(j) is the unit eigenvector for
// values[j].
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

// Cyclic Jacobi rotations on a symmetric matrix. Throws numeric_error if the
// off-diagonal mass has not vanished after max_sweeps.
SymmetricEigen jacobi_eigen(Matrix a, std::size_t max_sweeps = 64);

struct FiedlerPair {
    double value = 0.0;
    Matrix vector;  // n x 1, unit norm, sign unspecified
};

// Eigenpair of the second-smallest Laplacian eigenvalue.
FiedlerPair fiedler_pair(const Graph& graph);

// Entrywise absolute value of the Fiedler eigenvector, n x 1.
Matrix fiedler_of_graph(const Graph& graph);
Matrix fiedler_target(const Matrix& points, std::size_t k_neighbors = 10);

// n x 3 cloud in [0,1]^3: points split between a sphere surface and a rotated
// box surface with overlapping placement, deterministic per seed.
Matrix sample_point_cloud(std::uint64_t seed, std::size_t n = 512);

}  // namespace equiset::datasets
