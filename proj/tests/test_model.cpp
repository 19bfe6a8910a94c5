#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "equiset/model.hpp"
#include "equiset/rng.hpp"

using namespace equiset;

namespace {

Matrix random_input(std::uint64_t seed, std::size_t rows, std::size_t cols) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    return m;
}

std::string temp_path(const char* name) {
    return std::string("model_test_tmp_") + name;
}

}  // namespace

TEST_CASE("architecture names round-trip") {
    for (Architecture a : all_architectures()) {
        CHECK(parse_architecture(architecture_name(a)) == a);
    }
    CHECK_THROWS_AS(parse_architecture("resnet"), std::invalid_argument);
}

TEST_CASE("stage layout for the affine family") {
    ModelSpec spec;
    spec.architecture = Architecture::PointNet;
    spec.depth = 6;
    spec.width = 16;
    spec.k_in = 4;
    spec.k_out = 2;

    const auto stages = model_stages(spec);
    REQUIRE(stages.size() == 6);
    CHECK(stages[0].in == 4);
    CHECK(stages[0].out == 16);
    CHECK(stages[5].in == 16);
    CHECK(stages[5].out == 2);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(stages[i].kind == StageKind::Affine);
        CHECK(stages[i].relu_after == (i != 5));
    }

    spec.architecture = Architecture::DeepSets;
    for (const Stage& s : model_stages(spec)) CHECK(s.kind == StageKind::AffineTransmit);

    spec.architecture = Architecture::PointNetST;
    const auto st_stages = model_stages(spec);
    std::size_t transmit_count = 0;
    for (std::size_t i = 0; i < st_stages.size(); ++i) {
        if (st_stages[i].kind == StageKind::AffineTransmit) {
            ++transmit_count;
            CHECK(i + 1 == resolved_transmission_index(spec));
        }
    }
    CHECK(transmit_count == 1);
    CHECK(resolved_transmission_index(spec) == 3);  // ceil(6/2) with 1-based layers

    spec.architecture = Architecture::PointNetQT;
    std::size_t quad_count = 0;
    for (const Stage& s : model_stages(spec)) quad_count += (s.kind == StageKind::Quadratic);
    CHECK(quad_count == 1);

    spec.transmission_index = 7;
    CHECK_THROWS_AS(model_stages(spec), std::invalid_argument);
}

TEST_CASE("stage layout for pointnetseg") {
    ModelSpec spec;
    spec.architecture = Architecture::PointNetSeg;
    spec.depth = 6;
    spec.width = 8;
    spec.k_in = 3;
    spec.k_out = 2;

    const auto stages = model_stages(spec);
    REQUIRE(stages.size() == 7);  // 3 + pool + 3
    CHECK(stages[3].kind == StageKind::PoolConcat);
    CHECK(stages[3].in == 8);
    CHECK(stages[3].out == 11);  // k_in + width
    CHECK(stages[4].in == 11);
    CHECK(stages[6].out == 2);
    CHECK_FALSE(stages[3].relu_after);
    CHECK_FALSE(stages[6].relu_after);
}

TEST_CASE("parameter layout matches the declared roles") {
    ModelSpec spec;
    spec.architecture = Architecture::DeepSets;
    spec.depth = 2;
    spec.width = 5;
    spec.k_in = 3;
    spec.k_out = 1;

    const auto layout = param_layout(spec);
    REQUIRE(layout.size() == 6);  // (A, B, C) per layer
    CHECK(layout[0].role == ParamRole::A);
    CHECK(layout[1].role == ParamRole::B);
    CHECK(layout[2].role == ParamRole::C);
    CHECK(layout[0].rows == 3);
    CHECK(layout[0].cols == 5);
    CHECK(layout[2].rows == 1);
    CHECK(layout[2].cols == 5);

    std::size_t total = 0;
    for (const auto& p : layout) total += p.rows * p.cols;
    CHECK(total == param_count(spec));

    spec.architecture = Architecture::PointNetQT;
    spec.depth = 1;
    const auto qt_layout = param_layout(spec);
    REQUIRE(qt_layout.size() == 5);  // W1..W5, no bias
    for (const auto& p : qt_layout) {
        CHECK(p.rows == 3);
        CHECK(p.cols == 1);
    }
}

TEST_CASE("initialization is deterministic and bounded") {
    ModelSpec spec;
    spec.architecture = Architecture::DeepSets;
    spec.depth = 3;
    spec.width = 7;
    spec.k_in = 2;
    spec.k_out = 2;

    const Model a = make_model(spec, 99);
    const Model b = make_model(spec, 99);
    const Model c = make_model(spec, 100);
    REQUIRE(a.params.size() == b.params.size());

    const auto layout = param_layout(spec);
    bool all_equal_across_seeds = true;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        CHECK(max_abs_diff(a.params[i], b.params[i]) == 0.0);
        if (max_abs_diff(a.params[i], c.params[i]) != 0.0) all_equal_across_seeds = false;

        const double bound = 1.0 / std::sqrt(static_cast<double>(layout[i].rows));
        if (layout[i].role == ParamRole::C || layout[i].role == ParamRole::DenseB) {
            CHECK(max_abs(a.params[i]) == 0.0);
        } else {
            CHECK(max_abs(a.params[i]) <= bound);
        }
    }
    CHECK_FALSE(all_equal_across_seeds);
}

TEST_CASE("forward pass validates its inputs") {
    ModelSpec spec;
    spec.architecture = Architecture::GraphNet;
    spec.depth = 2;
    spec.width = 4;
    spec.k_in = 2;
    spec.k_out = 1;
    const Model model = make_model(spec, 5);

    const Matrix x = random_input(6, 3, 2);
    CHECK_THROWS_AS(model_apply(model, x), std::invalid_argument);  // no propagation

    const Matrix wrong_k = random_input(7, 3, 5);
    const Matrix prop = Matrix::identity(3);
    CHECK_THROWS_AS(model_apply(model, wrong_k, &prop), std::invalid_argument);

    const Matrix y = model_apply(model, x, &prop);
    CHECK(y.rows() == 3);
    CHECK(y.cols() == 1);

    ModelSpec mlp_spec = spec;
    mlp_spec.architecture = Architecture::Mlp;
    mlp_spec.n = 4;
    const Model mlp = make_model(mlp_spec, 8);
    CHECK_THROWS_AS(model_apply(mlp, x), std::invalid_argument);  // 3 rows, built for 4
    const Matrix y2 = model_apply(mlp, random_input(9, 4, 2));
    CHECK(y2.rows() == 4);
    CHECK(y2.cols() == 1);
}

TEST_CASE("checkpoints round-trip bitwise") {
    ModelSpec spec;
    spec.architecture = Architecture::PointNetSeg;
    spec.depth = 5;
    spec.width = 6;
    spec.k_in = 3;
    spec.k_out = 2;
    spec.n = 7;
    const Model model = make_model(spec, 41);

    const std::string path = temp_path("roundtrip.ckpt");
    save_model(model, path);
    const Model loaded = load_model(path);
    std::remove(path.c_str());

    CHECK(loaded.spec.architecture == spec.architecture);
    CHECK(loaded.spec.depth == spec.depth);
    CHECK(loaded.spec.width == spec.width);
    CHECK(loaded.spec.k_in == spec.k_in);
    CHECK(loaded.spec.k_out == spec.k_out);
    CHECK(loaded.spec.n == spec.n);
    REQUIRE(loaded.params.size() == model.params.size());
    for (std::size_t i = 0; i < model.params.size(); ++i) {
        CHECK(max_abs_diff(loaded.params[i], model.params[i]) == 0.0);
    }

    const Matrix x = random_input(42, 4, 3);
    CHECK(max_abs_diff(model_apply(loaded, x), model_apply(model, x)) == 0.0);
}

TEST_CASE("checkpoint loader rejects malformed files") {
    const std::string path = temp_path("bad.ckpt");
    {
        std::ofstream out(path);
        out << "not a checkpoint\n";
    }
    CHECK_THROWS_AS(load_model(path), std::invalid_argument);
    {
        std::ofstream out(path);
        out << "equiset-checkpoint v1\narch deepsets\ndepth 2\n";  // truncated
    }
    CHECK_THROWS_AS(load_model(path), std::invalid_argument);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model(path), std::invalid_argument);  // missing file
}
