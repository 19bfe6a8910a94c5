#include "equiset/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include "equiset/datasets.hpp"
#include "equiset/grad_check.hpp"
#include "equiset/layers.hpp"
#include "equiset/losses.hpp"
#include "equiset/pointcloud.hpp"
#include "equiset/rng.hpp"
#include "equiset/sympoly.hpp"
#include "equiset/train.hpp"

namespace equiset::verify {

namespace {

template <typename... Args>
std::string strf(const char* format, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return std::string(buf);
}

std::string matrix_brief(const Matrix& m) {
    std::ostringstream out;
    out << m.shape_str() << " [";
    const std::size_t limit = 24;
    auto data = m.data();
    for (std::size_t i = 0; i < data.size() && i < limit; ++i) {
        if (i) out << ' ';
        out << strf("%.6g", data[i]);
    }
    if (data.size() > limit) out << " ...";
    out << ']';
    return out.str();
}

}  // namespace

void SuiteReport::ok(std::string line) { lines.push_back("ok   " + std::move(line)); }

void SuiteReport::fail(std::string line) {
    pass = false;
    lines.push_back("FAIL " + std::move(line));
}

SuiteReport equivariance_suite(const EquivarianceParams& params) {
    SuiteReport report;
    std::vector<Architecture> archs = params.architectures;
    if (archs.empty()) {
        for (Architecture a : all_architectures()) {
            if (a != Architecture::Mlp) archs.push_back(a);
        }
    }
    // Small enough that the n=8 inputs always have more rows than neighbors.
    const std::size_t neighbors = std::min<std::size_t>(3, params.n - 1);

    for (std::size_t ai = 0; ai < archs.size(); ++ai) {
        const Architecture arch = archs[ai];
        ModelSpec spec;
        spec.architecture = arch;
        spec.depth = params.depth;
        spec.width = params.width;
        spec.k_in = params.k_in;
        spec.k_out = params.k_out;
        spec.n = params.n;
        const Model model = make_model(spec, params.seed + 101 * ai);

        sympoly::MatrixFn fn;
        if (arch == Architecture::GraphNet) {
            fn = [&](const Matrix& x) {
                const Matrix prop =
                    layers::normalize_adjacency(datasets::knn_graph(x, neighbors).adjacency);
                return model_apply(model, x, &prop);
            };
        } else {
            fn = [&](const Matrix& x) { return model_apply(model, x); };
        }

        const sympoly::EquivarianceReport rep =
            sympoly::check_equivariance(fn, params.n, params.k_in, params.trials,
                                        params.seed + 13 * ai);
        if (rep.max_deviation <= params.tol) {
            report.ok(strf("%-12s max |F(pX) - pF(X)| = %.3e over %zu trials (tol %.1e)",
                           architecture_name(arch), rep.max_deviation, params.trials,
                           params.tol));
        } else {
            std::string perm;
            for (std::size_t p : rep.worst_perm) perm += std::to_string(p) + " ";
            report.fail(strf("%-12s deviation %.3e > %.1e at X = %s, perm = [%s]",
                             architecture_name(arch), rep.max_deviation, params.tol,
                             matrix_brief(rep.worst_input).c_str(), perm.c_str()));
        }
    }
    return report;
}

namespace {

// Max deviation from h(X) = 1 1^T X over the probe pair, plus whether every
// row past the first agrees bitwise between the two probes.
struct SumProbe {
    double error = 0.0;
    bool tail_rows_identical = true;
};

SumProbe probe_sum_fit(const Model& model, std::size_t n) {
    Matrix e1(n, 1);
    e1(0, 0) = 1.0;
    const Matrix zero(n, 1);

    const Matrix ya = model_apply(model, e1);   // target: every row 1
    const Matrix yb = model_apply(model, zero); // target: every row 0

    SumProbe probe;
    for (std::size_t i = 0; i < n; ++i) {
        probe.error = std::max(probe.error, std::abs(ya(i, 0) - 1.0));
        probe.error = std::max(probe.error, std::abs(yb(i, 0)));
        if (i > 0 && ya(i, 0) != yb(i, 0)) probe.tail_rows_identical = false;
    }
    return probe;
}

}  // namespace

SuiteReport sum_fit_suite(const SumFitParams& params) {
    SuiteReport report;
    const std::size_t n = params.n;
    const double bound = 0.5 - 1e-9;

    ModelSpec spec;
    spec.architecture = Architecture::PointNet;
    spec.depth = params.depth;
    spec.width = params.width;
    spec.k_in = 1;
    spec.k_out = 1;

    const auto check_model = [&](const Model& model, const char* label) {
        const SumProbe probe = probe_sum_fit(model, n);
        if (probe.tail_rows_identical) {
            report.ok(strf("%s: rows 2..%zu bit-identical at inputs e1 and 0", label, n));
        } else {
            report.fail(strf("%s: some row past the first differs between e1 and 0", label));
        }
        if (probe.error >= bound) {
            report.ok(strf("%s: max error against the row-sum target is %.6f >= %.9f", label,
                           probe.error, bound));
        } else {
            report.fail(strf("%s: max error %.12f below the 1/2 floor", label, probe.error));
        }
    };

    check_model(make_model(spec, params.seed), "untrained");

    // Fit the row-sum target as well as gradient descent allows; the floor
    // must survive training.
    const auto make_split = [&](std::uint64_t seed, std::size_t count) {
        datasets::Dataset set;
        set.task = datasets::Task::Quadratic;  // plain regression container
        set.n = n;
        set.k_in = 1;
        set.k_out = 1;
        Rng rng(seed);
        for (std::size_t e = 0; e < count; ++e) {
            Matrix x(n, 1);
            for (double& v : x.data()) v = rng.uniform();
            double total = 0.0;
            for (double v : x.data()) total += v;
            set.examples.push_back({x, Matrix::full(n, 1, total)});
        }
        return set;
    };
    const datasets::Dataset train = make_split(params.seed + 1, params.train_examples);
    const datasets::Dataset test = make_split(params.seed + 2, 64);

    training::TrainConfig config;
    config.lr = 0.01;
    config.epochs = params.epochs;
    config.loss = training::LossKind::Mse;
    config.seed = params.seed;

    const training::TrainResult result = training::train_model(spec, train, test, config);
    const double final_mse = result.history.empty() ? -1.0 : result.history.back().train_loss;
    report.ok(strf("trained %zu epochs on %zu examples, final train mse %.4f", params.epochs,
                   params.train_examples, final_mse));
    check_model(result.model, "trained");
    return report;
}

SuiteReport decomposition_suite(const DecompositionParams& params) {
    SuiteReport report;

    // Basis size: the enumeration must agree with the closed-form count, and
    // slots 1..k must be the unit indices.
    bool count_ok = true;
    for (std::size_t n = 1; n <= params.basis_limit && count_ok; ++n) {
        for (std::size_t k = 1; k <= params.basis_limit; ++k) {
            const sympoly::PowerSumBasis basis = sympoly::enumerate_multi_indices(n, k);
            if (basis.size() != sympoly::binomial(n + k, k)) {
                report.fail(strf("basis count at n=%zu k=%zu: %zu != C(%zu,%zu)", n, k,
                                 basis.size(), n + k, k));
                count_ok = false;
                break;
            }
            for (std::size_t j = 1; j <= k; ++j) {
                if (basis.indices[j].degree() != 1 ||
                    basis.indices[j].exponents[j - 1] != 1) {
                    report.fail(strf("slot %zu at n=%zu k=%zu is not a unit index", j, n, k));
                    count_ok = false;
                    break;
                }
            }
        }
    }
    if (count_ok) {
        report.ok(strf("basis size equals C(n+k, k) for all n, k <= %zu", params.basis_limit));
    }

    // Round-trip: sample random equivariant polynomials, then recover them by
    // least squares from input/output pairs alone. All polynomials of one
    // shape share a sample set and enter a single decomposition as separate
    // output columns, so each shape costs one factorization. Shapes whose
    // basis exceeds 10 slots drop the invariant-factor degree to 1 to keep
    // the dictionary size quadratic in the basis count.
    for (std::size_t n = 2; n <= 4; ++n) {
        for (std::size_t k = 1; k <= 3; ++k) {
            if (params.n_filter != 0 && n != params.n_filter) continue;
            if (params.k_filter != 0 && k != params.k_filter) continue;
            const sympoly::PowerSumBasis basis = sympoly::enumerate_multi_indices(n, k);
            const int cap = basis.size() <= 10 ? params.degree_cap : std::min(params.degree_cap, 1);
            const std::size_t monomials = static_cast<std::size_t>(
                sympoly::binomial(basis.size() - 1 + cap, cap));
            const std::size_t features = basis.size() * monomials;
            const std::size_t sample_count = std::max<std::size_t>(200, 2 * features / n + 1);

            Rng rng(params.seed + 1000 * n + k);
            std::vector<sympoly::EquivariantPoly> polys;
            polys.reserve(params.polys_per_shape);
            std::size_t out_dim = 0;
            for (std::size_t p = 0; p < params.polys_per_shape; ++p) {
                polys.push_back(sympoly::random_equivariant_poly(basis, 2, params.term_count,
                                                                 cap, rng.next_u64()));
                out_dim += polys.back().out_dim;
            }
            std::vector<std::pair<Matrix, Matrix>> samples;
            samples.reserve(sample_count);
            for (std::size_t s = 0; s < sample_count; ++s) {
                Matrix x(n, k);
                for (double& v : x.data()) v = rng.uniform();
                Matrix y(n, out_dim);
                std::size_t col = 0;
                for (const sympoly::EquivariantPoly& poly : polys) {
                    const Matrix part = sympoly::eval_equivariant_poly(poly, x);
                    for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t j = 0; j < part.cols(); ++j) y(i, col + j) = part(i, j);
                    }
                    col += part.cols();
                }
                samples.emplace_back(std::move(x), std::move(y));
            }
            const sympoly::DecomposeResult res =
                sympoly::decompose_equivariant_poly(samples, n, k, cap);
            if (res.residual <= params.roundtrip_tol) {
                report.ok(strf("round-trip at (n=%zu, k=%zu, degree %d): worst residual %.3e "
                               "over %zu polys",
                               n, k, cap, res.residual, params.polys_per_shape));
            } else {
                report.fail(strf("round-trip at (n=%zu, k=%zu, degree %d): residual %.3e > %.1e",
                                 n, k, cap, res.residual, params.roundtrip_tol));
            }
        }
    }

    // Named recovery: decomposing samples of X -> 1 1^T X at (n=2, k=1) must
    // place all the weight on the constant monomial vector times s_(1).
    if ((params.n_filter == 0 || params.n_filter == 2) &&
        (params.k_filter == 0 || params.k_filter == 1)) {
        const std::size_t n = 2, k = 1;
        Rng rng(params.seed + 5);
        std::vector<std::pair<Matrix, Matrix>> samples;
        for (std::size_t s = 0; s < 60; ++s) {
            Matrix x(n, k);
            for (double& v : x.data()) v = rng.uniform();
            const double total = x(0, 0) + x(1, 0);
            samples.emplace_back(x, Matrix::full(n, 1, total));
        }
        const sympoly::DecomposeResult res =
            sympoly::decompose_equivariant_poly(samples, n, k, 1);
        const sympoly::PowerSumBasis basis = sympoly::enumerate_multi_indices(n, k);
        const std::vector<int> alpha_zero{0};
        std::vector<int> s1_expo(basis.size(), 0);
        s1_expo[1] = 1;

        double s1_coef = 0.0;
        double stray = 0.0;
        for (const auto& [alpha, polys] : res.poly.terms) {
            for (const sympoly::InvariantPoly& q : polys) {
                for (const auto& [expo, coef] : q.terms) {
                    if (alpha == alpha_zero && expo == s1_expo) {
                        s1_coef = coef;
                    } else {
                        stray = std::max(stray, std::abs(coef));
                    }
                }
            }
        }
        if (std::abs(s1_coef - 1.0) <= 1e-6 && stray <= 1e-6 &&
            res.residual <= params.roundtrip_tol) {
            report.ok(strf("row-sum map recovers q_0 = s_(1): coefficient %.9f, stray %.2e",
                           s1_coef, stray));
        } else {
            report.fail(strf("row-sum map recovery: s_(1) coefficient %.9f, stray %.2e, "
                             "residual %.2e",
                             s1_coef, stray, res.residual));
        }
    }

    // Symmetrizing a deliberately row-dependent map must produce an
    // equivariant one.
    const sympoly::MatrixFn raw = [](const Matrix& x) {
        Matrix y(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) {
                y(i, j) = static_cast<double>(i + 1) * x(i, j) * x(i, j) + x(0, 0);
            }
        }
        return y;
    };
    const sympoly::MatrixFn averaged = [&](const Matrix& x) {
        return sympoly::symmetrize(raw, x);
    };
    const sympoly::EquivarianceReport rep =
        sympoly::check_equivariance(averaged, 4, 2, 20, params.seed + 7);
    if (rep.max_deviation <= params.symmetrize_tol) {
        report.ok(strf("symmetrized map deviation %.3e (tol %.1e)", rep.max_deviation,
                       params.symmetrize_tol));
    } else {
        report.fail(strf("symmetrized map deviation %.3e > %.1e at X = %s", rep.max_deviation,
                         params.symmetrize_tol, matrix_brief(rep.worst_input).c_str()));
    }
    return report;
}

SuiteReport width_bound_suite() {
    SuiteReport report;

    // Independent binomials via the addition rule.
    const std::size_t limit = 21;
    std::vector<std::vector<std::uint64_t>> pascal(limit, std::vector<std::uint64_t>(limit, 0));
    for (std::size_t i = 0; i < limit; ++i) {
        pascal[i][0] = 1;
        for (std::size_t j = 1; j <= i; ++j) {
            pascal[i][j] = pascal[i - 1][j - 1] + (j <= i - 1 ? pascal[i - 1][j] : 0);
        }
    }

    if (layers::width_bound(5, 3, 1) == 60) {
        report.ok("width_bound(5, 3, 1) == 60");
    } else {
        report.fail(strf("width_bound(5, 3, 1) == %llu, expected 60",
                         static_cast<unsigned long long>(layers::width_bound(5, 3, 1))));
    }

    bool agree = true;
    for (std::size_t n = 1; n <= 10 && agree; ++n) {
        for (std::size_t k = 1; k <= 10 && agree; ++k) {
            for (std::size_t k_out : {std::size_t{1}, std::size_t{2}, std::size_t{5}}) {
                const std::uint64_t expected = k_out + k + pascal[n + k][k];
                const std::uint64_t got = layers::width_bound(n, k, k_out);
                if (got != expected) {
                    report.fail(strf("width_bound(%zu, %zu, %zu) == %llu, expected %llu", n, k,
                                     k_out, static_cast<unsigned long long>(got),
                                     static_cast<unsigned long long>(expected)));
                    agree = false;
                    break;
                }
            }
        }
    }
    if (agree) {
        report.ok("width_bound matches k_out + k_in + C(n + k_in, k_in) for all n, k_in <= 10");
    }
    return report;
}

SuiteReport grad_check_suite(const GradCheckParams& params) {
    SuiteReport report;
    const std::vector<Architecture> archs = all_architectures();
    const training::LossKind losses[] = {training::LossKind::Mse, training::LossKind::SmoothL1,
                                         training::LossKind::CrossEntropy};

    Rng rng(params.seed);
    double worst = 0.0;
    std::size_t failures = 0;
    for (std::size_t c = 0; c < params.configs; ++c) {
        ModelSpec spec;
        spec.architecture = archs[c % archs.size()];
        spec.depth = 1 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        spec.width = 3 + static_cast<std::size_t>(rng.uniform_int(0, 3));
        spec.k_in = 1 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        const training::LossKind loss = losses[c % 3];
        spec.k_out = loss == training::LossKind::CrossEntropy
                         ? 2
                         : 1 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 3));
        spec.n = n;

        const Model model = make_model(spec, rng.next_u64());

        Matrix x(n, spec.k_in);
        for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
        Matrix target;
        if (loss == training::LossKind::CrossEntropy) {
            target = Matrix(n, 1);
            for (double& v : target.data()) v = static_cast<double>(rng.uniform_int(0, 1));
        } else {
            target = Matrix(n, spec.k_out);
            for (double& v : target.data()) v = rng.normal(0.0, 1.0);
        }

        Matrix propagation;
        const Matrix* prop_ptr = nullptr;
        if (spec.architecture == Architecture::GraphNet) {
            propagation = layers::normalize_adjacency(
                datasets::knn_graph(x, std::min<std::size_t>(2, n - 1)).adjacency);
            prop_ptr = &propagation;
        }

        const ScalarFn f = [&](Tape& tape, std::span<const Var> vars) {
            const Var input = tape.constant(x);
            const Var pred = model_forward(tape, spec, vars, input, prop_ptr);
            return loss_forward(tape, loss, pred, target);
        };
        const double err = grad_check(f, model.params, params.step);
        worst = std::max(worst, err);
        if (err > params.tol) {
            ++failures;
            report.fail(strf("config %zu (%s, depth %zu, width %zu, n %zu, loss %s): "
                             "gradient error %.3e > %.1e",
                             c, architecture_name(spec.architecture), spec.depth, spec.width, n,
                             training::loss_name(loss), err, params.tol));
        }
    }
    if (failures == 0) {
        report.ok(strf("%zu configurations, max relative gradient error %.3e (tol %.1e)",
                       params.configs, worst, params.tol));
    }
    return report;
}

}  // namespace equiset::verify
