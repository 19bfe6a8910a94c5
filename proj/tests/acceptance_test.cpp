#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "equiset/datasets.hpp"
#include "equiset/pointcloud.hpp"
#include "equiset/train.hpp"
#include "equiset/verify.hpp"
#include "oracles.hpp"

using namespace equiset;
using namespace equiset::training;

namespace {

// One machine-checkable verdict line per criterion; the test harness greps
// for it, so the format is load-bearing.
void announce(int number, bool pass) {
    std::printf("[ACCEPT] criterion %d: %s\n", number, pass ? "PASS" : "FAIL");
    std::fflush(stdout);
}

void print_report(const verify::SuiteReport& report) {
    for (const std::string& line : report.lines) std::printf("  %s\n", line.c_str());
    std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion 1: equivariance of every set architecture") {
    // Random models at depth 6, width 32; 100 input/permutation trials each.
    const verify::SuiteReport report = verify::equivariance_suite(verify::EquivarianceParams{});
    print_report(report);
    announce(1, report.pass);
    CHECK(report.pass);
}

TEST_CASE("criterion 2: per-row networks miss the row sum by 1/2") {
    // Untrained and sum-fitted per-row stacks at n=5, probed at e1 and 0.
    const verify::SuiteReport report = verify::sum_fit_suite(verify::SumFitParams{});
    print_report(report);
    announce(2, report.pass);
    CHECK(report.pass);
}

TEST_CASE("criterion 3: power-sum decomposition round trip") {
    // 20 random equivariant polynomials per shape in {(2,1),(3,1),(2,2),(3,2)}
    // must round-trip through least squares to residual 1e-6; symmetrized maps
    // must pass equivariance at 1e-9; basis sizes cross-checked for n,k <= 8.
    const verify::SuiteReport report = verify::decomposition_suite(verify::DecompositionParams{});
    print_report(report);
    announce(3, report.pass);
    CHECK(report.pass);
}

TEST_CASE("criterion 4: sufficient width formula") {
    const verify::SuiteReport report = verify::width_bound_suite();
    print_report(report);
    announce(4, report.pass);
    CHECK(report.pass);
}

TEST_CASE("criterion 5: knapsack solver agrees with exhaustive search") {
    bool pass = true;
    for (std::size_t i = 0; i < 200; ++i) {
        const std::size_t n = 3 + (i % 13);  // instance sizes 3..15
        const datasets::KnapsackInstance inst = datasets::gen_knapsack(9000 + i, n, 1)[0];
        const datasets::KnapsackSolution bf = oracles::brute_force_knapsack(inst.x, inst.budgets);
        if (bf.value != inst.v_star || bf.z != inst.z_star) {
            pass = false;
            std::printf("  FAIL instance %zu (n=%zu): dp %lld vs exhaustive %lld\n", i, n,
                        inst.v_star, bf.value);
        }
    }
    if (pass) std::printf("  200 instances matched the exhaustive optimum exactly\n");
    announce(5, pass);
    CHECK(pass);
}

TEST_CASE("criterion 6: knapsack success ordering across architectures") {
    const datasets::Dataset train = datasets::knapsack_dataset(7, 10, 2000);
    const datasets::Dataset test = datasets::knapsack_dataset(8, 10, 500);

    TrainConfig config;
    config.loss = LossKind::CrossEntropy;
    config.epochs = 150;
    config.lr = 1e-3;
    config.batch_size = 32;
    config.seed = 1;

    auto run = [&](Architecture arch) {
        ModelSpec spec;
        spec.architecture = arch;
        spec.depth = 6;
        spec.width = 16;
        spec.k_in = 4;
        spec.k_out = 2;
        spec.n = 10;
        const TrainResult result = train_model(spec, train, test, config);
        const EpochStats& last = result.history.back();
        std::printf("  %-12s train_success=%.3f test_success=%.3f\n", architecture_name(arch),
                    last.train_metric, last.test_metric);
        std::fflush(stdout);
        return last.test_metric;
    };

    const double pointnet = run(Architecture::PointNet);
    const double st = run(Architecture::PointNetST);
    const double qt = run(Architecture::PointNetQT);
    const double deepsets = run(Architecture::DeepSets);
    const double seg = run(Architecture::PointNetSeg);
    const double mlp = run(Architecture::Mlp);

    bool pass = true;
    for (double success : {st, qt, deepsets, seg}) {
        if (!(success >= pointnet + 0.10)) pass = false;
    }
    if (!(pointnet > mlp)) pass = false;
    std::printf("  set architectures must beat pointnet by >= 0.10; pointnet must beat mlp\n");
    announce(6, pass);
    CHECK(pass);
}

TEST_CASE("criterion 7: quadratic regression needs cross-row mixing") {
    const datasets::Dataset train = datasets::quadratic_dataset(5, 16, 3, 2000);
    const datasets::Dataset test = datasets::quadratic_dataset(6, 16, 3, 200);

    TrainConfig config;
    config.loss = LossKind::Mse;
    config.epochs = 220;
    config.lr = 3e-3;
    config.batch_size = 32;
    config.decay_factor = 0.5;
    config.decay_every = 80;
    config.seed = 1;

    auto run = [&](Architecture arch) {
        ModelSpec spec;
        spec.architecture = arch;
        spec.depth = 3;
        spec.width = 32;
        spec.k_in = 3;
        spec.k_out = 1;
        const TrainResult result = train_model(spec, train, test, config);
        const EpochStats& last = result.history.back();
        std::printf("  %-12s train_mse=%.6g test_mse=%.6g\n", architecture_name(arch),
                    last.train_loss, last.test_loss);
        std::fflush(stdout);
        return last.train_loss;
    };

    const double deepsets = run(Architecture::DeepSets);
    const double st = run(Architecture::PointNetST);
    const double pointnet = run(Architecture::PointNet);

    bool pass = true;
    if (!(deepsets <= 1e-2)) pass = false;
    if (!(st <= 1e-2)) pass = false;
    if (!(pointnet >= 10.0 * std::max(deepsets, st))) pass = false;
    if (!(pointnet >= 0.1)) pass = false;
    announce(7, pass);
    CHECK(pass);
}

TEST_CASE("criterion 8: deepsets regresses onto a graph convolution") {
    const datasets::Dataset train = datasets::gcn_regression_dataset(21, 22, 1000);
    const datasets::Dataset test = datasets::gcn_regression_dataset(21, 23, 200);

    ModelSpec spec;
    spec.architecture = Architecture::DeepSets;
    spec.depth = 2;
    spec.width = 200;
    spec.k_in = 3;
    spec.k_out = 10;

    TrainConfig config;
    config.loss = LossKind::SmoothL1;
    config.epochs = 60;
    config.lr = 1e-3;
    config.batch_size = 32;
    config.seed = 1;

    const TrainResult result = train_model(spec, train, test, config);
    const EpochStats& last = result.history.back();
    std::printf("  deepsets 2x200: train smooth_l1=%.6g test smooth_l1=%.6g (target <= 0.05)\n",
                last.train_loss, last.test_loss);
    const bool pass = last.test_loss <= 0.05;
    announce(8, pass);
    CHECK(pass);
}

TEST_CASE("criterion 9: gradients match central differences") {
    const verify::SuiteReport report = verify::grad_check_suite(verify::GradCheckParams{});
    print_report(report);
    announce(9, report.pass);
    CHECK(report.pass);
}

TEST_CASE("criterion 10: laplacian eigenpairs and fiedler vectors") {
    bool pass = true;
    double worst = 0.0;
    for (std::size_t c = 0; c < 50; ++c) {
        const Matrix cloud = datasets::sample_point_cloud(4000 + c, 64);
        const datasets::Graph graph = datasets::knn_graph(cloud, 10);
        const Matrix laplacian = datasets::graph_laplacian(graph);
        const datasets::FiedlerPair pair = datasets::fiedler_pair(graph);
        const Matrix residual =
            sub(matmul(laplacian, pair.vector), scale(pair.vector, pair.value));
        worst = std::max(worst, max_abs(residual));
    }
    std::printf("  worst |L v - lambda v| over 50 clouds: %.3e (bound 1e-8)\n", worst);
    if (worst > 1e-8) pass = false;

    datasets::Graph path;
    path.n = 3;
    path.adjacency = Matrix{{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
    const Matrix fiedler = datasets::fiedler_of_graph(path);
    const double r = 1.0 / std::sqrt(2.0);
    const double path_err = std::max({std::abs(fiedler(0, 0) - r), std::abs(fiedler(1, 0)),
                                      std::abs(fiedler(2, 0) - r)});
    std::printf("  path-graph fiedler deviation from (%.6f, 0, %.6f): %.3e\n", r, r, path_err);
    if (path_err > 1e-8) pass = false;

    announce(10, pass);
    CHECK(pass);
}
