#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>

#include "equiset/layers.hpp"
#include "equiset/matrix.hpp"
#include "equiset/model.hpp"
#include "equiset/rng.hpp"
#include "equiset/tape.hpp"

using namespace equiset;
using namespace equiset::layers;

TEST_CASE("affine equivariant layer on a hand example") {
    Tape tape;
    const Var x = tape.constant(Matrix{{1.0}, {3.0}});
    const Var a = tape.constant(Matrix{{2.0}});
    const Var b = tape.constant(Matrix{{1.0}});
    const Var c = tape.constant(Matrix{{0.5}});

    // X A = (2, 6); (1/n) 1 1^T X B = (2, 2); plus bias 0.5.
    const Var y = affine_equivariant(tape, x, a, b, c);
    CHECK(max_abs_diff(tape.value(y), Matrix{{4.5}, {8.5}}) == 0.0);

    // Without the transmission term the layer is strictly per-row.
    const Var y_local = affine_equivariant(tape, x, a, std::nullopt, c);
    CHECK(max_abs_diff(tape.value(y_local), Matrix{{2.5}, {6.5}}) == 0.0);

    const Var y_nobias = affine_equivariant(tape, x, a, b, std::nullopt);
    CHECK(max_abs_diff(tape.value(y_nobias), Matrix{{4.0}, {8.0}}) == 0.0);
}

TEST_CASE("quadratic layer on a hand example") {
    Tape tape;
    const Var x = tape.constant(Matrix{{1.0}, {2.0}});
    std::array<Var, 5> w;
    for (Var& v : w) v = tape.constant(Matrix{{1.0}});

    // Terms per row: XW1=(1,2); 11^T X W2=(3,3); (11^T X)^2 W3=(9,9);
    // X^2 W4=(1,4); (11^T X)*X W5=(3,6). Totals (17, 24).
    const Var y = quadratic_equivariant(tape, x, w);
    CHECK(max_abs_diff(tape.value(y), Matrix{{17.0}, {24.0}}) == 0.0);
}

TEST_CASE("graph convolution on a hand example") {
    Tape tape;
    const Var x = tape.constant(Matrix{{1.0}, {2.0}});
    const Matrix prop{{0.0, 1.0}, {1.0, 0.0}};
    const Var w1 = tape.constant(Matrix{{1.0}});
    const Var w2 = tape.constant(Matrix{{1.0}});

    // P X W2 = (2, 1); X W1 = (1, 2).
    const Var y = graph_conv(tape, x, prop, w1, w2, std::nullopt);
    CHECK(max_abs_diff(tape.value(y), Matrix{{3.0}, {3.0}}) == 0.0);

    const Var c = tape.constant(Matrix{{10.0}});
    const Var yb = graph_conv(tape, x, prop, w1, w2, c);
    CHECK(max_abs_diff(tape.value(yb), Matrix{{13.0}, {13.0}}) == 0.0);

    // Propagation rows must match the input rows.
    const Matrix bad(3, 3);
    CHECK_THROWS_AS(graph_conv(tape, x, bad, w1, w2, std::nullopt), std::invalid_argument);
}

TEST_CASE("adjacency normalization") {
    // Path on two vertices: A + I is all-ones, both degrees 2.
    const Matrix a{{0.0, 1.0}, {1.0, 0.0}};
    const Matrix p = normalize_adjacency(a);
    CHECK(max_abs_diff(p, Matrix::full(2, 2, 0.5)) <= 1e-15);

    // A unit diagonal is accepted and means the same graph.
    const Matrix a_loops{{1.0, 1.0}, {1.0, 1.0}};
    CHECK(max_abs_diff(normalize_adjacency(a_loops), p) == 0.0);

    CHECK_THROWS_AS(normalize_adjacency(Matrix{{0.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_adjacency(Matrix{{0.0, 0.5}, {0.5, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_adjacency(Matrix(2, 3)), std::invalid_argument);

    // Isolated vertex: self loop only, normalized weight 1.
    const Matrix single = normalize_adjacency(Matrix(1, 1));
    CHECK(single(0, 0) == 1.0);
}

TEST_CASE("max pool picks columnwise maxima") {
    const Matrix x{{1.0, 5.0}, {3.0, 2.0}};
    CHECK(max_abs_diff(max_pool(x), Matrix{{3.0, 5.0}}) == 0.0);
    CHECK_THROWS_AS(max_pool(Matrix(0, 2)), std::invalid_argument);
}

TEST_CASE("sufficient width formula") {
    CHECK(width_bound(5, 3, 1) == 60);
    CHECK(width_bound(1, 1, 1) == 4);   // 1 + 1 + C(2,1)
    CHECK(width_bound(2, 1, 1) == 5);   // 1 + 1 + C(3,1)
    CHECK(width_bound(3, 2, 2) == 14);  // 2 + 2 + C(5,2)
    CHECK_THROWS_AS(width_bound(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(width_bound(1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(width_bound(1, 1, 0), std::invalid_argument);
}

TEST_CASE("pointnet outputs are strictly per-row") {
    ModelSpec spec;
    spec.architecture = Architecture::PointNet;
    spec.depth = 4;
    spec.width = 8;
    spec.k_in = 2;
    spec.k_out = 2;
    const Model model = make_model(spec, 21);

    Rng rng(22);
    Matrix x(5, 2);
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    Matrix x2 = x;
    x2(3, 0) += 100.0;
    x2(3, 1) -= 7.0;

    const Matrix y = model_apply(model, x);
    const Matrix y2 = model_apply(model, x2);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            if (i == 3) continue;
            CHECK(y(i, j) == y2(i, j));  // bitwise: other rows never mix in
        }
    }
    CHECK(y(3, 0) != y2(3, 0));
}

TEST_CASE("single-transmission network with B = 0 reduces to pointnet bitwise") {
    ModelSpec pn_spec;
    pn_spec.architecture = Architecture::PointNet;
    pn_spec.depth = 5;
    pn_spec.width = 6;
    pn_spec.k_in = 3;
    pn_spec.k_out = 2;
    const Model pn = make_model(pn_spec, 23);

    ModelSpec st_spec = pn_spec;
    st_spec.architecture = Architecture::PointNetST;
    Model st = make_model(st_spec, 24);

    // Copy the pointnet parameters into the matching slots and zero B.
    const auto pn_layout = param_layout(pn_spec);
    const auto st_layout = param_layout(st_spec);
    std::size_t pi = 0;
    for (std::size_t si = 0; si < st_layout.size(); ++si) {
        if (st_layout[si].role == ParamRole::B) {
            st.params[si] = Matrix(st_layout[si].rows, st_layout[si].cols);
            continue;
        }
        REQUIRE(pi < pn_layout.size());
        REQUIRE(pn_layout[pi].role == st_layout[si].role);
        st.params[si] = pn.params[pi++];
    }
    REQUIRE(pi == pn_layout.size());

    Rng rng(25);
    Matrix x(4, 3);
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    CHECK(max_abs_diff(model_apply(st, x), model_apply(pn, x)) == 0.0);
}

TEST_CASE("mlp hidden width parameter-matches deepsets within 5 percent") {
    ModelSpec ds_spec;
    ds_spec.architecture = Architecture::DeepSets;
    ds_spec.depth = 6;
    ds_spec.width = 16;
    ds_spec.k_in = 4;
    ds_spec.k_out = 2;
    ds_spec.n = 10;
    const double ds_params = static_cast<double>(param_count(ds_spec));

    ModelSpec mlp_spec = ds_spec;
    mlp_spec.architecture = Architecture::Mlp;
    const double mlp_params = static_cast<double>(param_count(mlp_spec));

    CHECK(std::abs(mlp_params - ds_params) / ds_params <= 0.05);
    CHECK(resolved_mlp_hidden(mlp_spec) >= 1);
}
