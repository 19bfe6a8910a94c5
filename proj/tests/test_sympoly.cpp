#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "equiset/matrix.hpp"
#include "equiset/rng.hpp"
#include "equiset/sympoly.hpp"

using namespace equiset;
using namespace equiset::sympoly;

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform();
    return m;
}

}  // namespace

TEST_CASE("multi-index enumeration order at n=2, k=2") {
    const PowerSumBasis basis = enumerate_multi_indices(2, 2);
    const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1},
                                                 {2, 0}, {1, 1}, {0, 2}};
    REQUIRE(basis.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(basis.indices[i].exponents == expected[i]);
    }

    // slot() is the inverse of the enumeration.
    for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(basis.slot(basis.indices[i]) == i);
    }
    CHECK_THROWS_AS(basis.slot(MultiIndex{{3, 3}}), std::invalid_argument);
}

TEST_CASE("enumeration size matches the closed-form count") {
    for (std::size_t n = 1; n <= 6; ++n) {
        for (std::size_t k = 1; k <= 6; ++k) {
            const PowerSumBasis basis = enumerate_multi_indices(n, k);
            CHECK(basis.size() == binomial(n + k, k));
            // Slot 0 is the zero index; slots 1..k are the unit indices.
            CHECK(basis.indices[0].degree() == 0);
            for (std::size_t j = 1; j <= k; ++j) {
                CHECK(basis.indices[j].degree() == 1);
                CHECK(basis.indices[j].exponents[j - 1] == 1);
            }
        }
    }
}

TEST_CASE("binomial spot values") {
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(8, 4) == 70);
    CHECK(binomial(10, 5) == 252);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(4, 5) == 0);
}

TEST_CASE("monomials and power sums on a hand example") {
    const Matrix x{{1.0, 2.0}, {3.0, 4.0}};

    const MultiIndex a11{{1, 1}};
    CHECK(power_sum(x, a11) == 14.0);  // 1*2 + 3*4
    CHECK(power_sum(x, a11, Normalization::OverN) == 7.0);

    const MultiIndex a20{{2, 0}};
    CHECK(power_sum(x, a20) == 10.0);  // 1 + 9

    const std::vector<double> rows = row_monomials(x, a11);
    CHECK(rows == std::vector<double>{2.0, 12.0});

    // 0^0 = 1 keeps the constant power sum equal to n.
    const MultiIndex zero{{0, 0}};
    CHECK(power_sum(x, zero) == 2.0);
    const std::vector<double> z{0.0, 0.0};
    CHECK(eval_monomial(z, zero) == 1.0);
}

TEST_CASE("power sums are invariant and row monomials equivariant") {
    Rng rng(31);
    const std::size_t n = 5, k = 3;
    const Matrix x = random_matrix(rng, n, k);
    const std::vector<std::size_t> perm = Rng(32).permutation(n);
    const Matrix px = permute_rows(x, perm);

    const PowerSumBasis basis = enumerate_multi_indices(n, k);
    const std::vector<double> s = power_sum_values(x, basis);
    const std::vector<double> ps = power_sum_values(px, basis);
    REQUIRE(s.size() == basis.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i] == doctest::Approx(ps[i]).epsilon(1e-12));
    }

    const MultiIndex alpha{{2, 1, 0}};
    const std::vector<double> b = row_monomials(x, alpha);
    const std::vector<double> pb = row_monomials(px, alpha);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(pb[i] == b[perm[i]]);  // gather semantics, exact
    }
}

TEST_CASE("invariant polynomial evaluation") {
    // q(s) = 2 s_1 s_2 + 3 over power sums (s_0, s_1, s_2).
    InvariantPoly q;
    q.terms[{0, 1, 1}] = 2.0;
    q.terms[{0, 0, 0}] = 3.0;
    const std::vector<double> s{5.0, 2.0, 4.0};
    CHECK(q.eval(s) == 19.0);
}

TEST_CASE("equivariant polynomial evaluation commutes with permutations") {
    const std::size_t n = 3, k = 2;
    const PowerSumBasis basis = enumerate_multi_indices(n, k);
    const EquivariantPoly poly = random_equivariant_poly(basis, 2, 4, 2, 77);
    poly.validate();

    Rng rng(33);
    for (std::size_t trial = 0; trial < 5; ++trial) {
        const Matrix x = random_matrix(rng, n, k);
        const Matrix y = eval_equivariant_poly(poly, x);
        std::vector<std::size_t> perm{0, 1, 2};
        do {
            const Matrix py = eval_equivariant_poly(poly, permute_rows(x, perm));
            CHECK(max_abs_diff(py, permute_rows(y, perm)) <= 1e-9);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("symmetrize hand oracle at n=2") {
    // P(X) = (x_1, 0)^T averages to (x_1/2, x_2/2)^T.
    const MatrixFn raw = [](const Matrix& x) {
        Matrix y(2, 1);
        y(0, 0) = x(0, 0);
        return y;
    };
    const Matrix x{{3.0}, {5.0}};
    const Matrix g = symmetrize(raw, x);
    CHECK(g(0, 0) == 1.5);
    CHECK(g(1, 0) == 2.5);
}

TEST_CASE("symmetrize fixes maps that are already equivariant") {
    const MatrixFn doubler = [](const Matrix& x) { return scale(x, 2.0); };
    Rng rng(34);
    const Matrix x = random_matrix(rng, 3, 2);
    // Averaging 3! identical values rounds in the last bit.
    CHECK(max_abs_diff(symmetrize(doubler, x), scale(x, 2.0)) <= 1e-14);
}

TEST_CASE("symmetrize refuses large sets") {
    const MatrixFn identity_fn = [](const Matrix& x) { return x; };
    CHECK_THROWS_AS(symmetrize(identity_fn, Matrix(9, 1)), std::domain_error);
}

TEST_CASE("check_equivariance flags a row-dependent map") {
    const MatrixFn biased = [](const Matrix& x) {
        Matrix y = x;
        y(0, 0) += 1.0;  // only the first row is shifted
        return y;
    };
    const EquivarianceReport report = check_equivariance(biased, 3, 1, 10, 35);
    CHECK(report.max_deviation >= 0.5);
    CHECK(report.worst_input.rows() == 3);
    CHECK(report.worst_perm.size() == 3);

    const MatrixFn fine = [](const Matrix& x) { return scale(x, -1.0); };
    CHECK(check_equivariance(fine, 3, 1, 10, 36).max_deviation == 0.0);
}

TEST_CASE("decomposition recovers q_0 = s_(1) for the row-sum map") {
    Rng rng(37);
    std::vector<std::pair<Matrix, Matrix>> samples;
    for (std::size_t s = 0; s < 50; ++s) {
        const Matrix x = random_matrix(rng, 2, 1);
        samples.emplace_back(x, Matrix::full(2, 1, x(0, 0) + x(1, 0)));
    }
    const DecomposeResult res = decompose_equivariant_poly(samples, 2, 1, 1);
    CHECK(res.residual <= 1e-6);

    const std::vector<int> alpha_zero{0};
    std::vector<int> s1{0, 1, 0};
    double s1_coef = 0.0, stray = 0.0;
    for (const auto& [alpha, polys] : res.poly.terms) {
        for (const InvariantPoly& q : polys) {
            for (const auto& [expo, coef] : q.terms) {
                if (alpha == alpha_zero && expo == s1) {
                    s1_coef = coef;
                } else {
                    stray = std::max(stray, std::abs(coef));
                }
            }
        }
    }
    CHECK(s1_coef == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(stray <= 1e-6);
}

TEST_CASE("decomposition round-trips a random equivariant polynomial") {
    const std::size_t n = 2, k = 2;
    const PowerSumBasis basis = enumerate_multi_indices(n, k);
    const EquivariantPoly poly = random_equivariant_poly(basis, 2, 3, 2, 88);

    Rng rng(38);
    std::vector<std::pair<Matrix, Matrix>> samples;
    for (std::size_t s = 0; s < 600; ++s) {
        const Matrix x = random_matrix(rng, n, k);
        samples.emplace_back(x, eval_equivariant_poly(poly, x));
    }
    const DecomposeResult res = decompose_equivariant_poly(samples, n, k, 2);
    CHECK(res.residual <= 1e-6);

    // The recovered polynomial reproduces the original on fresh inputs; the
    // agreement bound is looser than the fit residual because these points
    // were not part of the least-squares system.
    for (std::size_t s = 0; s < 20; ++s) {
        const Matrix x = random_matrix(rng, n, k);
        CHECK(max_abs_diff(eval_equivariant_poly(res.poly, x),
                           eval_equivariant_poly(poly, x)) <= 1e-5);
    }
}

TEST_CASE("decomposition rejects underdetermined sample sets") {
    Rng rng(39);
    std::vector<std::pair<Matrix, Matrix>> samples;
    for (std::size_t s = 0; s < 3; ++s) {
        const Matrix x = random_matrix(rng, 3, 2);
        samples.emplace_back(x, x);
    }
    CHECK_THROWS_AS(decompose_equivariant_poly(samples, 3, 2, 2), std::invalid_argument);
}

TEST_CASE("equivariant polynomial validation") {
    const PowerSumBasis basis = enumerate_multi_indices(2, 1);
    EquivariantPoly poly;
    poly.basis = basis;
    poly.out_dim = 1;
    InvariantPoly q;
    q.terms[{0, 0}] = 1.0;  // wrong exponent-vector length (t = 3)
    poly.terms[{1}] = {q};
    CHECK_THROWS_AS(poly.validate(), std::invalid_argument);
}
