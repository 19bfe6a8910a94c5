#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "equiset/grad_check.hpp"
#include "equiset/matrix.hpp"
#include "equiset/rng.hpp"
#include "equiset/tape.hpp"

using namespace equiset;

namespace {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

// Entries pushed away from zero so ReLU kinks and sign flips cannot sit
// inside a finite-difference step.
Matrix random_matrix_off_zero(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m = random_matrix(rng, rows, cols);
    for (double& v : m.data()) v += (v < 0.0 ? -0.1 : 0.1);
    return m;
}

// Weighted sum against fixed weights, so every output entry of `out` gets a
// distinct gradient signal.
Var pin(Tape& tape, Var out, const Matrix& weights) {
    return tape.sum(tape.hadamard(out, tape.constant(weights)));
}

constexpr double kStep = 1e-5;
constexpr double kTol = 1e-7;

}  // namespace

TEST_CASE("tape values for the elementwise and reduction ops") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{-1.0, 2.0}, {0.0, 3.0}});

    CHECK(max_abs_diff(tape.value(tape.relu(x)), Matrix{{0.0, 2.0}, {0.0, 3.0}}) == 0.0);
    CHECK(tape.value(tape.sum(x))(0, 0) == 4.0);
    CHECK(tape.value(tape.mean(x))(0, 0) == 1.0);
    CHECK(max_abs_diff(tape.value(tape.scale(x, -2.0)), Matrix{{2.0, -4.0}, {0.0, -6.0}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.add_scalar(x, 1.5)), Matrix{{0.5, 3.5}, {1.5, 4.5}}) ==
          0.0);
    CHECK(max_abs_diff(tape.value(tape.col_sum(x)), Matrix{{-1.0, 5.0}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.col_mean(x)), Matrix{{-0.5, 2.5}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.col_max(x)), Matrix{{0.0, 3.0}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.transpose(x)), Matrix{{-1.0, 0.0}, {2.0, 3.0}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.reshape(x, 1, 4)), Matrix{{-1.0, 2.0, 0.0, 3.0}}) == 0.0);
    CHECK(max_abs_diff(tape.value(tape.pow_elementwise(x, 2.0)),
                       Matrix{{1.0, 4.0}, {0.0, 9.0}}) == 0.0);
}

TEST_CASE("pow_elementwise treats 0^0 as 1 and has zero gradient at exponent 0") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{0.0, 2.0}});
    const Var y = tape.pow_elementwise(x, 0.0);
    CHECK(max_abs_diff(tape.value(y), Matrix{{1.0, 1.0}}) == 0.0);
    tape.backward(tape.sum(y));
    CHECK(max_abs(tape.grad(x)) == 0.0);
}

TEST_CASE("relu subgradient at exactly zero is zero") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{0.0, 3.0, -2.0}});
    tape.backward(tape.sum(tape.relu(x)));
    CHECK(max_abs_diff(tape.grad(x), Matrix{{0.0, 1.0, 0.0}}) == 0.0);
}

TEST_CASE("col_max routes gradient to the first argmax on ties") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{2.0, 7.0}, {2.0, 5.0}});
    tape.backward(tape.sum(tape.col_max(x)));
    CHECK(max_abs_diff(tape.grad(x), Matrix{{1.0, 1.0}, {0.0, 0.0}}) == 0.0);
}

TEST_CASE("broadcasts replicate values and accumulate gradients") {
    Tape tape;
    const Var row = tape.leaf(Matrix{{1.0, 2.0}});
    const Var grid = tape.broadcast_rows(row, 3);
    CHECK(grid.index() != row.index());
    CHECK(max_abs_diff(tape.value(grid), Matrix{{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}) == 0.0);
    tape.backward(tape.sum(grid));
    CHECK(max_abs_diff(tape.grad(row), Matrix{{3.0, 3.0}}) == 0.0);

    Tape tape2;
    const Var col = tape2.leaf(Matrix{{1.0}, {2.0}});
    const Var grid2 = tape2.broadcast_cols(col, 4);
    CHECK(max_abs_diff(tape2.value(grid2), Matrix{{1.0, 1.0, 1.0, 1.0}, {2.0, 2.0, 2.0, 2.0}}) ==
          0.0);
    tape2.backward(tape2.sum(grid2));
    CHECK(max_abs_diff(tape2.grad(col), Matrix{{4.0}, {4.0}}) == 0.0);
}

TEST_CASE("matmul gradient matches central differences") {
    Rng rng(11);
    const Matrix w = random_matrix(rng, 2, 4);
    const std::vector<Matrix> params{random_matrix(rng, 2, 3), random_matrix(rng, 3, 4)};
    const ScalarFn f = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.matmul(p[0], p[1]), w);
    };
    CHECK(grad_check(f, params, kStep) <= kTol);
}

TEST_CASE("elementwise op gradients match central differences") {
    Rng rng(12);
    const Matrix w = random_matrix(rng, 3, 3);
    const std::vector<Matrix> params{random_matrix_off_zero(rng, 3, 3),
                                     random_matrix_off_zero(rng, 3, 3)};

    // p0 enters twice with unequal factors so its gradient stays away from
    // zero (an exactly-zero gradient would make the relative error measure
    // pure roundoff noise).
    const ScalarFn add_sub_scale = [&](Tape& t, std::span<const Var> p) {
        const Var mix = t.sub(t.add(p[0], t.scale(p[1], 0.75)),
                              t.add_scalar(t.scale(p[0], 0.5), -0.25));
        return pin(t, mix, w);
    };
    CHECK(grad_check(add_sub_scale, params, kStep) <= kTol);

    const ScalarFn had = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.hadamard(p[0], p[1]), w);
    };
    CHECK(grad_check(had, params, kStep) <= kTol);

    const ScalarFn relu_fn = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.relu(p[0]), w);
    };
    CHECK(grad_check(relu_fn, params, kStep) <= kTol);
}

TEST_CASE("pow gradients match central differences away from zero") {
    Rng rng(13);
    const Matrix w = random_matrix(rng, 2, 3);
    const std::vector<Matrix> params{random_matrix(rng, 2, 3, 0.5, 1.5)};
    for (const double exponent : {2.0, 3.0, -1.0, 0.5}) {
        const ScalarFn f = [&](Tape& t, std::span<const Var> p) {
            return pin(t, t.pow_elementwise(p[0], exponent), w);
        };
        CHECK(grad_check(f, params, kStep) <= kTol);
    }
}

TEST_CASE("shape op gradients match central differences") {
    Rng rng(14);
    const std::vector<Matrix> params{random_matrix(rng, 3, 2), random_matrix(rng, 3, 2)};
    const Matrix w_t = random_matrix(rng, 2, 3);
    const Matrix w_cat = random_matrix(rng, 3, 4);
    const Matrix w_flat = random_matrix(rng, 1, 6);
    const Matrix w_perm = random_matrix(rng, 3, 2);

    const ScalarFn tr = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.transpose(p[0]), w_t);
    };
    CHECK(grad_check(tr, params, kStep) <= kTol);

    const ScalarFn cat = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.concat_cols(p[0], p[1]), w_cat);
    };
    CHECK(grad_check(cat, params, kStep) <= kTol);

    const ScalarFn flat = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.reshape(p[0], 1, 6), w_flat);
    };
    CHECK(grad_check(flat, params, kStep) <= kTol);

    const ScalarFn perm = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.permute_rows(p[0], {2, 0, 1}), w_perm);
    };
    CHECK(grad_check(perm, params, kStep) <= kTol);
}

TEST_CASE("reduction and broadcast gradients match central differences") {
    Rng rng(15);
    const std::vector<Matrix> params{random_matrix(rng, 4, 3)};
    const Matrix w_row = random_matrix(rng, 1, 3);
    const Matrix w_grid = random_matrix(rng, 4, 3);

    const ScalarFn sums = [&](Tape& t, std::span<const Var> p) {
        return t.add(t.sum(p[0]), t.mean(p[0]));
    };
    CHECK(grad_check(sums, params, kStep) <= kTol);

    const ScalarFn cols = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.add(t.col_sum(p[0]), t.col_mean(p[0])), w_row);
    };
    CHECK(grad_check(cols, params, kStep) <= kTol);

    const ScalarFn maxes = [&](Tape& t, std::span<const Var> p) {
        return pin(t, t.col_max(p[0]), w_row);
    };
    CHECK(grad_check(maxes, params, kStep) <= kTol);

    const ScalarFn bcast = [&](Tape& t, std::span<const Var> p) {
        const Var rows = t.broadcast_rows(t.col_mean(p[0]), 4);
        return pin(t, rows, w_grid);
    };
    CHECK(grad_check(bcast, params, kStep) <= kTol);
}

TEST_CASE("softmax cross entropy values and gradients") {
    {
        Tape tape;
        const Var logits = tape.leaf(Matrix{{0.0, 0.0}});
        const Var loss = tape.softmax_cross_entropy(logits, {0});
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    }
    {
        Tape tape;
        const Var logits = tape.leaf(Matrix{{30.0, -30.0}});
        const Var loss = tape.softmax_cross_entropy(logits, {0});
        CHECK(tape.value(loss)(0, 0) < 1e-20);
    }
    {
        Tape tape;
        const Var logits = tape.leaf(Matrix{{1.0, 2.0}});
        CHECK_THROWS_AS(tape.softmax_cross_entropy(logits, {2}), std::domain_error);
        CHECK_THROWS_AS(tape.softmax_cross_entropy(logits, {0, 1}), std::invalid_argument);
    }

    Rng rng(16);
    const std::vector<Matrix> params{random_matrix(rng, 4, 3, -2.0, 2.0)};
    const std::vector<int> labels{0, 2, 1, 1};
    const ScalarFn f = [&](Tape& t, std::span<const Var> p) {
        return t.softmax_cross_entropy(p[0], labels);
    };
    CHECK(grad_check(f, params, kStep) <= kTol);
}

TEST_CASE("grad_check on w^3 at w=2 with step 1e-5 is accurate to 1e-6") {
    const std::vector<Matrix> params{Matrix{{2.0}}};
    const ScalarFn f = [](Tape& t, std::span<const Var> p) {
        return t.sum(t.pow_elementwise(p[0], 3.0));
    };
    CHECK(grad_check(f, params, 1e-5) <= 1e-6);
}

TEST_CASE("backward bookkeeping") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{1.0, 2.0}});
    const Var unused = tape.leaf(Matrix{{5.0}});
    const Var loss = tape.sum(tape.hadamard(x, x));

    CHECK_THROWS_AS(tape.backward(x), std::logic_error);  // not 1x1

    tape.backward(loss);
    CHECK(max_abs_diff(tape.grad(x), Matrix{{2.0, 4.0}}) == 0.0);
    // Nodes the loss never touched report zero gradients of their own shape.
    CHECK(max_abs(tape.grad(unused)) == 0.0);
    CHECK(tape.grad(unused).rows() == 1);

    CHECK_THROWS_AS(tape.backward(loss), std::logic_error);

    tape.reset();
    CHECK(tape.size() == 0);
    const Var y = tape.leaf(Matrix{{3.0}});
    tape.backward(tape.sum(y));
    CHECK(tape.grad(y)(0, 0) == 1.0);
}

TEST_CASE("constants do not accumulate gradients") {
    Tape tape;
    const Var x = tape.leaf(Matrix{{1.0, -2.0}});
    const Var c = tape.constant(Matrix{{3.0, 4.0}});
    tape.backward(tape.sum(tape.hadamard(x, c)));
    CHECK(max_abs_diff(tape.grad(x), Matrix{{3.0, 4.0}}) == 0.0);
    CHECK(max_abs(tape.grad(c)) == 0.0);
}
