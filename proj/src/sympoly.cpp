#include "equiset/sympoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "equiset/rng.hpp"

namespace equiset::sympoly {

namespace {

double pow_int(double base, int exponent) {
    // 0^0 = 1 by the empty-product convention.
    double acc = 1.0;
    for (int i = 0; i < exponent; ++i) acc *= base;
    return acc;
}

// Descending-lex enumeration of all alpha with |alpha| = degree over k slots.
void collect_fixed_degree(int degree, std::size_t k, std::vector<int>& prefix,
                          std::vector<MultiIndex>& out) {
    if (prefix.size() + 1 == k) {
        prefix.push_back(degree);
        out.push_back(MultiIndex{prefix});
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        collect_fixed_degree(degree - e, k, prefix, out);
        prefix.pop_back();
    }
}

// Least squares min |a x - b| by Householder QR with column pivoting.
// Diagonals below rank_tol (columns are expected pre-scaled to unit norm)
// mark dependent columns, whose coefficients are set to zero; this keeps the
// solution bounded on the strongly correlated monomial dictionaries where
// normal equations would lose half the working precision.
Matrix qr_least_squares(Matrix a, Matrix b, double rank_tol) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    const std::size_t out = b.cols();
    const std::size_t steps = std::min(rows, cols);

    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> colnorm2(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) colnorm2[c] += a(r, c) * a(r, c);
    }

    std::vector<double> v(rows);
    std::size_t rank = steps;
    for (std::size_t k = 0; k < steps; ++k) {
        // Pivot the column with the largest remaining mass to the front.
        std::size_t pivot = k;
        for (std::size_t c = k + 1; c < cols; ++c) {
            if (colnorm2[c] > colnorm2[pivot]) pivot = c;
        }
        if (pivot != k) {
            for (std::size_t r = 0; r < rows; ++r) std::swap(a(r, k), a(r, pivot));
            std::swap(colnorm2[k], colnorm2[pivot]);
            std::swap(perm[k], perm[pivot]);
        }

        double norm2 = 0.0;
        for (std::size_t r = k; r < rows; ++r) norm2 += a(r, k) * a(r, k);
        const double norm = std::sqrt(norm2);
        if (norm <= rank_tol) {
            rank = k;
            break;
        }

        // Householder vector v maps the column onto alpha e_k.
        const double alpha = a(k, k) > 0.0 ? -norm : norm;
        v[k] = a(k, k) - alpha;
        for (std::size_t r = k + 1; r < rows; ++r) v[r] = a(r, k);
        const double vnorm2 = norm2 - 2.0 * alpha * a(k, k) + alpha * alpha;
        const double beta = 2.0 / vnorm2;
        a(k, k) = alpha;
        for (std::size_t r = k + 1; r < rows; ++r) a(r, k) = 0.0;

        for (std::size_t c = k + 1; c < cols; ++c) {
            double dot = 0.0;
            for (std::size_t r = k; r < rows; ++r) dot += v[r] * a(r, c);
            const double s = beta * dot;
            for (std::size_t r = k; r < rows; ++r) a(r, c) -= s * v[r];
            colnorm2[c] -= a(k, c) * a(k, c);
            if (colnorm2[c] < 0.0) colnorm2[c] = 0.0;
        }
        for (std::size_t c = 0; c < out; ++c) {
            double dot = 0.0;
            for (std::size_t r = k; r < rows; ++r) dot += v[r] * b(r, c);
            const double s = beta * dot;
            for (std::size_t r = k; r < rows; ++r) b(r, c) -= s * v[r];
        }
    }

    // Back substitution on the leading rank x rank triangle.
    Matrix coef(cols, out);
    for (std::size_t c = 0; c < out; ++c) {
        for (std::size_t i = rank; i-- > 0;) {
            double value = b(i, c);
            for (std::size_t j = i + 1; j < rank; ++j) value -= a(i, j) * coef(perm[j], c);
            coef(perm[i], c) = value / a(i, i);
        }
    }
    return coef;
}

// All monomial exponent vectors over t slots with total degree <= cap and
// slot 0 unused. The power sum at slot 0 is the constant n; admitting it
// would make the dictionary exactly collinear and the least-norm solution
// would smear coefficients across equivalent monomials.
void collect_q_monomials(std::size_t t, int cap, std::size_t slot, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (slot == t) {
        out.push_back(current);
        return;
    }
    int budget = cap;
    for (std::size_t s = 1; s < slot; ++s) budget -= current[s];
    const int limit = (slot == 0) ? 0 : budget;
    for (int e = 0; e <= limit; ++e) {
        current[slot] = e;
        collect_q_monomials(t, cap, slot + 1, current, out);
    }
    current[slot] = 0;
}

}  // namespace

std::size_t PowerSumBasis::slot(const MultiIndex& alpha) const {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] == alpha) return i;
    }
    throw std::invalid_argument("PowerSumBasis::slot: multi-index not in basis");
}

PowerSumBasis enumerate_multi_indices(std::size_t n, std::size_t k) {
    if (n == 0 || k == 0) {
        throw std::domain_error("enumerate_multi_indices: n and k must be at least 1");
    }
    PowerSumBasis basis;
    basis.n = n;
    basis.k = k;
    std::vector<int> prefix;
    for (int degree = 0; degree <= static_cast<int>(n); ++degree) {
        collect_fixed_degree(degree, k, prefix, basis.indices);
    }
    return basis;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

double eval_monomial(std::span<const double> x, const MultiIndex& alpha) {
    if (x.size() != alpha.dims()) {
        throw std::invalid_argument("eval_monomial: vector length " + std::to_string(x.size()) +
                                    " vs multi-index length " + std::to_string(alpha.dims()));
    }
    double acc = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc *= pow_int(x[j], alpha.exponents[j]);
    return acc;
}

double power_sum(const Matrix& x, const MultiIndex& alpha, Normalization norm) {
    if (x.cols() != alpha.dims()) {
        throw std::invalid_argument("power_sum: matrix " + x.shape_str() +
                                    " vs multi-index length " + std::to_string(alpha.dims()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        acc += eval_monomial(std::span(x.row_ptr(i), x.cols()), alpha);
    }
    if (norm == Normalization::OverN) acc /= static_cast<double>(x.rows());
    return acc;
}

std::vector<double> power_sum_values(const Matrix& x, const PowerSumBasis& basis,
                                     Normalization norm) {
    std::vector<double> values(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        values[j] = power_sum(x, basis.indices[j], norm);
    }
    return values;
}

std::vector<double> row_monomials(const Matrix& x, const MultiIndex& alpha) {
    if (x.cols() != alpha.dims()) {
        throw std::invalid_argument("row_monomials: matrix " + x.shape_str() +
                                    " vs multi-index length " + std::to_string(alpha.dims()));
    }
    std::vector<double> values(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        values[i] = eval_monomial(std::span(x.row_ptr(i), x.cols()), alpha);
    }
    return values;
}

double InvariantPoly::eval(std::span<const double> power_sums) const {
    double acc = 0.0;
    for (const auto& [exponents, coef] : terms) {
        if (exponents.size() != power_sums.size()) {
            throw std::invalid_argument("InvariantPoly::eval: exponent vector length " +
                                        std::to_string(exponents.size()) + " vs " +
                                        std::to_string(power_sums.size()) + " power sums");
        }
        double m = coef;
        for (std::size_t j = 0; j < exponents.size(); ++j) {
            m *= pow_int(power_sums[j], exponents[j]);
        }
        acc += m;
    }
    return acc;
}

void EquivariantPoly::validate() const {
    for (const auto& [alpha, polys] : terms) {
        if (alpha.size() != basis.k) {
            throw std::invalid_argument("EquivariantPoly: multi-index length mismatch");
        }
        int degree = 0;
        for (int e : alpha) degree += e;
        if (degree > static_cast<int>(basis.n)) {
            throw std::invalid_argument("EquivariantPoly: |alpha| exceeds n");
        }
        if (polys.size() != out_dim) {
            throw std::invalid_argument("EquivariantPoly: wrong number of output polynomials");
        }
        for (const InvariantPoly& q : polys) {
            for (const auto& [exponents, coef] : q.terms) {
                (void)coef;
                if (exponents.size() != basis.size()) {
                    throw std::invalid_argument(
                        "EquivariantPoly: q exponent vector length must equal t");
                }
            }
        }
    }
}

Matrix eval_equivariant_poly(const EquivariantPoly& poly, const Matrix& x) {
    if (x.rows() != poly.basis.n || x.cols() != poly.basis.k) {
        throw std::invalid_argument("eval_equivariant_poly: input " + x.shape_str() +
                                    " does not match basis (n=" + std::to_string(poly.basis.n) +
                                    ", k=" + std::to_string(poly.basis.k) + ")");
    }
    const std::vector<double> s = power_sum_values(x, poly.basis);
    Matrix out(x.rows(), poly.out_dim);
    for (const auto& [alpha_exp, polys] : poly.terms) {
        const std::vector<double> b = row_monomials(x, MultiIndex{alpha_exp});
        for (std::size_t j = 0; j < poly.out_dim; ++j) {
            if (polys[j].empty()) continue;
            const double q = polys[j].eval(s);
            if (q == 0.0) continue;
            for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) += b[i] * q;
        }
    }
    return out;
}

EquivariantPoly random_equivariant_poly(const PowerSumBasis& basis, std::size_t out_dim,
                                        std::size_t term_count, int max_q_degree,
                                        std::uint64_t seed) {
    Rng rng(seed);
    EquivariantPoly poly;
    poly.basis = basis;
    poly.out_dim = out_dim;
    const std::size_t t = basis.size();

    std::vector<std::size_t> slots = rng.permutation(t);
    slots.resize(std::min(term_count, t));
    for (std::size_t slot : slots) {
        std::vector<InvariantPoly> polys(out_dim);
        for (std::size_t j = 0; j < out_dim; ++j) {
            const int monomials = static_cast<int>(rng.uniform_int(1, 2));
            for (int m = 0; m < monomials; ++m) {
                std::vector<int> exponents(t, 0);
                int degree = static_cast<int>(rng.uniform_int(0, max_q_degree));
                while (degree > 0 && t > 1) {
                    exponents[static_cast<std::size_t>(rng.uniform_int(1, static_cast<long long>(t) - 1))] += 1;
                    --degree;
                }
                polys[j].terms[exponents] += rng.uniform(-1.0, 1.0);
            }
        }
        poly.terms[basis.indices[slot].exponents] = std::move(polys);
    }
    poly.validate();
    return poly;
}

Matrix symmetrize(const MatrixFn& f, const Matrix& x) {
    const std::size_t n = x.rows();
    if (n > 8) {
        throw std::domain_error("symmetrize: n=" + std::to_string(n) +
                                " exceeds the factorial enumeration cap of 8");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    Matrix acc;
    std::size_t count = 0;
    do {
        const Matrix permuted = permute_rows(x, perm);
        Matrix value = f(permuted);
        const std::vector<std::size_t> inverse = invert_permutation(perm);
        Matrix back = permute_rows(value, inverse);
        if (count == 0) {
            acc = std::move(back);
        } else {
            add_in_place(acc, back);
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));

    return scale(acc, 1.0 / static_cast<double>(count));
}

EquivarianceReport check_equivariance(const MatrixFn& f, std::size_t n, std::size_t k,
                                      std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("check_equivariance: trials must be >= 1");
    Rng rng(seed);
    EquivarianceReport report;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        Matrix x(n, k);
        for (double& v : x.data()) v = rng.uniform();
        const Matrix base = f(x);

        auto test_perm = [&](std::span<const std::size_t> perm) {
            const Matrix lhs = f(permute_rows(x, perm));
            const Matrix rhs = permute_rows(base, perm);
            const double dev = max_abs_diff(lhs, rhs);
            if (dev > report.max_deviation) {
                report.max_deviation = dev;
                report.worst_input = x;
                report.worst_perm.assign(perm.begin(), perm.end());
            }
        };

        if (n <= 6) {
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                test_perm(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
        } else {
            for (int s = 0; s < 4; ++s) test_perm(rng.permutation(n));
        }
    }
    return report;
}

DecomposeResult decompose_equivariant_poly(
    std::span<const std::pair<Matrix, Matrix>> samples, std::size_t n, std::size_t k,
    int degree_cap) {
    if (degree_cap < 0) throw std::invalid_argument("decompose: degree_cap must be >= 0");
    if (samples.empty()) throw std::invalid_argument("decompose: no samples");

    const PowerSumBasis basis = enumerate_multi_indices(n, k);
    const std::size_t t = basis.size();
    const std::size_t out_dim = samples[0].second.cols();
    for (const auto& [x, y] : samples) {
        if (x.rows() != n || x.cols() != k) {
            throw std::invalid_argument("decompose: sample input " + x.shape_str() +
                                        " does not match n=" + std::to_string(n) +
                                        ", k=" + std::to_string(k));
        }
        if (y.rows() != n || y.cols() != out_dim) {
            throw std::invalid_argument("decompose: sample output " + y.shape_str() +
                                        " inconsistent with first sample");
        }
    }

    std::vector<std::vector<int>> q_monomials;
    {
        std::vector<int> current(t, 0);
        collect_q_monomials(t, degree_cap, 0, current, q_monomials);
    }
    const std::size_t features = t * q_monomials.size();
    const std::size_t equations = samples.size() * n;
    if (equations < features) {
        throw std::invalid_argument(
            "decompose: underdetermined system, " + std::to_string(equations) + " equations for " +
            std::to_string(features) + " coefficients; add samples or lower degree_cap");
    }

    // Design matrix: one row per (sample, set row), one column per
    // (alpha slot, q monomial).
    Matrix design(equations, features);
    Matrix target(equations, out_dim);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Matrix& x = samples[s].first;
        const Matrix& y = samples[s].second;
        const std::vector<double> sums = power_sum_values(x, basis);
        std::vector<double> mono_values(q_monomials.size());
        for (std::size_t m = 0; m < q_monomials.size(); ++m) {
            double acc = 1.0;
            for (std::size_t j = 0; j < t; ++j) acc *= pow_int(sums[j], q_monomials[m][j]);
            mono_values[m] = acc;
        }
        for (std::size_t a = 0; a < t; ++a) {
            const std::vector<double> b = row_monomials(x, basis.indices[a]);
            for (std::size_t i = 0; i < n; ++i) {
                double* row = design.row_ptr(s * n + i);
                for (std::size_t m = 0; m < q_monomials.size(); ++m) {
                    row[a * q_monomials.size() + m] = b[i] * mono_values[m];
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < out_dim; ++j) target(s * n + i, j) = y(i, j);
        }
    }

    // Scale columns to unit norm so the rank cutoff is relative to the
    // dictionary's own magnitude.
    std::vector<double> column_scale(features, 1.0);
    for (std::size_t c = 0; c < features; ++c) {
        double norm2 = 0.0;
        for (std::size_t r = 0; r < equations; ++r) norm2 += design(r, c) * design(r, c);
        const double norm = std::sqrt(norm2);
        if (norm > 0.0) {
            column_scale[c] = norm;
            for (std::size_t r = 0; r < equations; ++r) design(r, c) /= norm;
        }
    }

    const Matrix coef = qr_least_squares(design, target, 1e-9);

    // Residual of the fit, max over all sample entries.
    const Matrix fitted = matmul(design, coef);
    double residual = 0.0;
    for (std::size_t r = 0; r < equations; ++r) {
        for (std::size_t j = 0; j < out_dim; ++j) {
            residual = std::max(residual, std::abs(fitted(r, j) - target(r, j)));
        }
    }

    DecomposeResult result;
    result.residual = residual;
    result.poly.basis = basis;
    result.poly.out_dim = out_dim;
    for (std::size_t a = 0; a < t; ++a) {
        std::vector<InvariantPoly> polys(out_dim);
        bool any = false;
        for (std::size_t m = 0; m < q_monomials.size(); ++m) {
            const std::size_t c = a * q_monomials.size() + m;
            for (std::size_t j = 0; j < out_dim; ++j) {
                const double value = coef(c, j) / column_scale[c];
                if (value != 0.0) {
                    polys[j].terms[q_monomials[m]] = value;
                    any = true;
                }
            }
        }
        if (any) result.poly.terms[basis.indices[a].exponents] = std::move(polys);
    }
    result.poly.validate();
    return result;
}

}  // namespace equiset::sympoly
