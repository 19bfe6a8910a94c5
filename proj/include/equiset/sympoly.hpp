#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "equiset/matrix.hpp"

namespace equiset::sympoly {

// Exponent vector over the k feature coordinates.
struct MultiIndex {
    std::vector<int> exponents;

    int degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
    std::size_t dims() const { return exponents.size(); }
    bool operator==(const MultiIndex& other) const = default;
};

// All multi-indices alpha in N^k with |alpha| <= n, in graded order
// (ascending degree, descending lexicographic within a degree). This puts the
// zero index at slot 0 and the k unit indices at slots 1..k, so the feature
// coordinates occupy a fixed slice.
struct PowerSumBasis {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<MultiIndex> indices;  // size t = C(n+k, k)

    std::size_t size() const { return indices.size(); }
    // Slot of a given multi-index; throws if absent.
    std::size_t slot(const MultiIndex& alpha) const;
};

PowerSumBasis enumerate_multi_indices(std::size_t n, std::size_t k);

// Number of multi-indices with |alpha| <= n over k coordinates: C(n+k, k).
// Computed independently of the enumeration for cross-checking.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// prod_j x_j^(alpha_j), with 0^0 = 1.
double eval_monomial(std::span<const double> x, const MultiIndex& alpha);

enum class Normalization { None, OverN };

// s_alpha(X) = sum_i x_i^alpha, divided by n when normalized.
double power_sum(const Matrix& x, const MultiIndex& alpha,
                 Normalization norm = Normalization::None);

// All t power sums of x in basis slot order.
std::vector<double> power_sum_values(const Matrix& x, const PowerSumBasis& basis,
                                     Normalization norm = Normalization::None);

// Per-row monomial values (x_1^alpha, ..., x_n^alpha); equivariant in the rows.
std::vector<double> row_monomials(const Matrix& x, const MultiIndex& alpha);

// Polynomial in the t power sums, stored sparsely as exponent-vector (length
// t, slot order) -> coefficient.
struct InvariantPoly {
    std::map<std::vector<int>, double> terms;

    double eval(std::span<const double> power_sums) const;
    bool empty() const { return terms.empty(); }
};

// Equivariant polynomial map in the row-monomial basis: for each retained
// alpha, one InvariantPoly per output column; the map sends X to
// sum_alpha row_monomials(X, alpha) * (q_alpha,1(s), ..., q_alpha,l(s)).
struct EquivariantPoly {
    PowerSumBasis basis;
    std::size_t out_dim = 1;
    std::map<std::vector<int>, std::vector<InvariantPoly>> terms;  // alpha exponents -> l polys

    void validate() const;  // alpha degrees <= n, exponent vectors length t
};

Matrix eval_equivariant_poly(const EquivariantPoly& poly, const Matrix& x);

// Random sparse instance for round-trip testing. Coefficients are uniform in
// [-1, 1]; q-monomials have total degree <= max_q_degree and never use the
// constant power sum slot.
EquivariantPoly random_equivariant_poly(const PowerSumBasis& basis, std::size_t out_dim,
                                        std::size_t term_count, int max_q_degree,
                                        std::uint64_t seed);

using MatrixFn = std::function<Matrix(const Matrix&)>;

// Averages sigma * F(sigma^-1 * X) over all of S_n. Capped at n <= 8.
Matrix symmetrize(const MatrixFn& f, const Matrix& x);

struct EquivarianceReport {
    double max_deviation = 0.0;
    Matrix worst_input;                    // X achieving the max
    std::vector<std::size_t> worst_perm;   // row gather vector
};

// Max over trials and permutations of ||F(perm(X)) - perm(F(X))||_inf with
// X uniform in [0,1]^(n x k). Enumerates all permutations when n <= 6, else
// samples a few per trial.
EquivarianceReport check_equivariance(const MatrixFn& f, std::size_t n, std::size_t k,
                                      std::size_t trials, std::uint64_t seed);

struct DecomposeResult {
    EquivariantPoly poly;
    double residual = 0.0;  // max over samples of ||fit - value||_inf
};

// Least-squares fit of {row_monomials(alpha) x (monomial in the power sums of
// degree <= degree_cap)} to the given (X, P(X)) samples, via normal equations
// with ridge 1e-10 on unit-scaled columns. Throws when the sample equations
// cannot determine the coefficients.
DecomposeResult decompose_equivariant_poly(
    std::span<const std::pair<Matrix, Matrix>> samples, std::size_t n, std::size_t k,
    int degree_cap);

}  // namespace equiset::sympoly
