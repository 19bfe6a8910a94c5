// Batch front end: data generation, training, evaluation, verification
// suites and width sweeps. One command per process; every command is
// deterministic given its flags. Exit codes: 0 success, 1 property failure,
// 2 usage or config error, 3 numeric abort.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "equiset/datasets.hpp"
#include "equiset/errors.hpp"
#include "equiset/model.hpp"
#include "equiset/text_io.hpp"
#include "equiset/train.hpp"
#include "equiset/verify.hpp"

namespace {

using namespace equiset;

std::vector<std::string> task_names() {
    return {"knapsack", "quadratic", "fiedler", "gcn-approx"};
}

// CLI11 applies set_config files only on the root command, but --config here
// belongs to subcommands, so config files are spliced into the argument list
// before parsing. A key becomes "--key=value" only when that flag is absent
// from the explicit arguments, which keeps flags-over-config precedence; the
// last occurrence of a key within a file wins.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    const auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const std::size_t first = s.find_first_not_of(ws);
        if (first == std::string::npos) return std::string();
        return s.substr(first, s.find_last_not_of(ws) - first + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config file '" + path + "' line " +
                                        std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config file '" + path + "' line " +
                                        std::to_string(line_no) + ": empty key");
        }
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        entries[key] = value;
    }
    return entries;
}

std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(argc));
    std::vector<std::string> config_paths;
    for (int i = 0; i < argc; ++i) {
        const std::string tok = argv[i];
        if (tok == "--config") {
            if (i + 1 >= argc) throw std::invalid_argument("--config needs a file path");
            config_paths.emplace_back(argv[++i]);
        } else if (tok.rfind("--config=", 0) == 0) {
            config_paths.push_back(tok.substr(9));
        } else {
            out.push_back(tok);
        }
    }
    const auto flag_given = [&out](const std::string& key) {
        const std::string plain = "--" + key;
        const std::string with_value = plain + "=";
        for (const std::string& tok : out) {
            if (tok == plain || tok.rfind(with_value, 0) == 0) return true;
        }
        return false;
    };
    for (const std::string& path : config_paths) {
        for (const auto& [key, value] : read_config_file(path)) {
            if (!flag_given(key)) out.push_back("--" + key + "=" + value);
        }
    }
    return out;
}

// Help-only registration: the token is consumed by expand_config_args before
// CLI11 ever parses.
void add_config_flag(CLI::App* cmd) {
    cmd->add_option("--config", "Config file with key = value lines; explicit flags win");
}

std::vector<std::string> architecture_names() {
    std::vector<std::string> names;
    for (Architecture a : all_architectures()) names.emplace_back(architecture_name(a));
    return names;
}

void print_report(const verify::SuiteReport& report) {
    for (const std::string& line : report.lines) std::printf("%s\n", line.c_str());
    std::printf("%s\n", report.pass ? "all checks passed" : "FAILED");
}

std::size_t default_set_size(datasets::Task task) {
    switch (task) {
        case datasets::Task::Knapsack: return 10;
        case datasets::Task::Quadratic: return 16;
        case datasets::Task::Fiedler: return 64;
        case datasets::Task::GcnApprox: return 100;
    }
    return 16;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
    std::string task;
    std::string out;
    std::size_t n = 0;           // 0 = per-task default
    std::size_t count = 2000;
    std::size_t test_count = 0;  // 0 = count / 10
    std::size_t k_in = 3;
    std::size_t k_out = 10;      // gcn-approx only
    std::size_t knn = 10;
    long long value_cap = 100;
    long long cost_cap = 25;
    std::uint64_t seed = 1;
};

int run_gen_data(const GenDataArgs& args) {
    const datasets::Task task = datasets::parse_task(args.task);
    const std::size_t n = args.n ? args.n : default_set_size(task);
    const std::size_t test_count = args.test_count ? args.test_count
                                                   : std::max<std::size_t>(1, args.count / 10);

    const auto split = [&](std::uint64_t seed, std::size_t count) {
        switch (task) {
            case datasets::Task::Knapsack:
                return datasets::knapsack_dataset(seed, n, count, args.value_cap, args.cost_cap);
            case datasets::Task::Quadratic:
                return datasets::quadratic_dataset(seed, n, args.k_in, count);
            case datasets::Task::Fiedler:
                return datasets::fiedler_dataset(seed, n, count, args.knn);
            case datasets::Task::GcnApprox:
                // The labeling layer is shared across splits; only the data
                // seed differs, so train/test come from the same target map.
                return datasets::gcn_regression_dataset(args.seed, seed + 1, count, n, args.k_in,
                                                        args.k_out, args.knn);
        }
        throw std::logic_error("run_gen_data: unmapped task");
    };

    const datasets::Dataset train = split(args.seed, args.count);
    const datasets::Dataset test = split(args.seed + 1, test_count);
    const std::string train_path = args.out + ".train.txt";
    const std::string test_path = args.out + ".test.txt";
    datasets::save_dataset(train, train_path);
    datasets::save_dataset(test, test_path);

    std::printf("task=%s n=%zu seed=%llu\n", datasets::task_name(task), n,
                static_cast<unsigned long long>(args.seed));
    std::printf("wrote %s (%zu examples)\n", train_path.c_str(), train.size());
    std::printf("wrote %s (%zu examples)\n", test_path.c_str(), test.size());
    return 0;
}

// ---------------------------------------------------------------------------
// train / eval / sweep

struct TrainArgs {
    std::string data;  // base path; .train.txt / .test.txt are appended
    std::string arch;
    std::string out;
    std::string loss;  // empty = task default
    std::size_t width = 16;
    std::size_t depth = 6;
    std::size_t k_out = 0;  // 0 = derived from loss and dataset
    std::size_t transmission_index = 0;
    std::size_t mlp_hidden = 0;
    training::TrainConfig config;
};

ModelSpec spec_for(const TrainArgs& args, const datasets::Dataset& train,
                   training::LossKind loss) {
    ModelSpec spec;
    spec.architecture = parse_architecture(args.arch);
    spec.depth = args.depth;
    spec.width = args.width;
    spec.k_in = train.k_in;
    spec.k_out = args.k_out ? args.k_out
                            : (loss == training::LossKind::CrossEntropy ? 2 : train.k_out);
    spec.n = train.n;
    spec.transmission_index = args.transmission_index;
    spec.mlp_hidden = args.mlp_hidden;
    return spec;
}

void print_epoch(const training::EpochStats& row) {
    std::printf("epoch %4zu  train_loss %.6g  train_metric %.6g  test_loss %.6g  "
                "test_metric %.6g  lr %.3g\n",
                row.epoch, row.train_loss, row.train_metric, row.test_loss, row.test_metric,
                row.lr);
}

int run_train(TrainArgs& args) {
    const datasets::Dataset train = datasets::load_dataset(args.data + ".train.txt");
    const datasets::Dataset test = datasets::load_dataset(args.data + ".test.txt");
    const training::LossKind loss =
        args.loss.empty() ? training::default_loss(train.task) : training::parse_loss(args.loss);
    args.config.loss = loss;

    const ModelSpec spec = spec_for(args, train, loss);
    const training::TrainResult result = training::train_model(spec, train, test, args.config);

    const std::string ckpt_path = args.out + ".ckpt";
    const std::string csv_path = args.out + ".csv";
    save_model(result.model, ckpt_path);
    training::write_history_csv(result.history, csv_path);

    if (!result.history.empty()) print_epoch(result.history.back());
    std::printf("wrote %s and %s\n", ckpt_path.c_str(), csv_path.c_str());
    return 0;
}

struct EvalArgs {
    std::string checkpoint;
    std::string data;  // a dataset file, not a base path
    std::string loss;
};

int run_eval(const EvalArgs& args) {
    const Model model = load_model(args.checkpoint);
    const datasets::Dataset set = datasets::load_dataset(args.data);
    const training::LossKind loss =
        args.loss.empty() ? training::default_loss(set.task) : training::parse_loss(args.loss);
    const training::EvalResult result = training::evaluate(model, set, loss);
    std::printf("loss=%s metric=%s\n", format_real(result.loss).c_str(),
                format_real(result.metric).c_str());
    return 0;
}

struct SweepArgs {
    std::string data;
    std::string out;
    std::string loss;
    std::vector<std::string> archs;   // empty = all
    std::vector<std::size_t> widths;  // empty = 15 equidistant in [5, n k_in / 2]
    std::size_t depth = 6;
    training::TrainConfig config;
};

std::vector<std::size_t> default_width_grid(std::size_t n, std::size_t k_in) {
    const double lo = 5.0;
    const double hi = std::max(lo, static_cast<double>(n) * static_cast<double>(k_in) / 2.0);
    std::vector<std::size_t> grid;
    for (std::size_t i = 0; i < 15; ++i) {
        const double w = lo + (hi - lo) * static_cast<double>(i) / 14.0;
        grid.push_back(static_cast<std::size_t>(std::llround(w)));
    }
    return grid;
}

int run_sweep(const SweepArgs& args) {
    const datasets::Dataset train = datasets::load_dataset(args.data + ".train.txt");
    const datasets::Dataset test = datasets::load_dataset(args.data + ".test.txt");
    const training::LossKind loss =
        args.loss.empty() ? training::default_loss(train.task) : training::parse_loss(args.loss);

    std::vector<std::string> archs = args.archs;
    if (archs.empty()) archs = architecture_names();
    std::sort(archs.begin(), archs.end());
    std::vector<std::size_t> widths =
        args.widths.empty() ? default_width_grid(train.n, train.k_in) : args.widths;
    std::sort(widths.begin(), widths.end());

    struct Row {
        std::string arch;
        std::size_t width;
        training::EpochStats final;
    };
    std::vector<Row> rows;
    for (const std::string& arch : archs) {
        for (const std::size_t width : widths) {
            TrainArgs targs;
            targs.arch = arch;
            targs.width = width;
            targs.depth = args.depth;
            targs.config = args.config;
            targs.config.loss = loss;
            const ModelSpec spec = spec_for(targs, train, loss);
            const training::TrainResult result =
                training::train_model(spec, train, test, targs.config);
            const training::EpochStats last =
                result.history.empty() ? training::EpochStats{} : result.history.back();
            rows.push_back({arch, width, last});
            std::printf("%-12s width %4zu  train_metric %.6g  test_metric %.6g\n", arch.c_str(),
                        width, last.train_metric, last.test_metric);
        }
    }

    std::ofstream out(args.out);
    if (!out) throw std::invalid_argument("sweep: cannot open '" + args.out + "'");
    out << "architecture,width,train_loss,train_metric,test_loss,test_metric\n";
    for (const Row& row : rows) {
        out << row.arch << ',' << row.width << ',' << format_real(row.final.train_loss) << ','
            << format_real(row.final.train_metric) << ',' << format_real(row.final.test_loss)
            << ',' << format_real(row.final.test_metric) << '\n';
    }
    if (!out.good()) throw std::invalid_argument("sweep: write to '" + args.out + "' failed");
    std::printf("wrote %s (%zu rows)\n", args.out.c_str(), rows.size());
    return 0;
}

// ---------------------------------------------------------------------------
// bench-gcn-approx

struct BenchArgs {
    std::size_t count = 1000;
    std::size_t test_count = 200;
    std::size_t n = 100;
    std::size_t k_in = 3;
    std::size_t k_out = 10;
    std::size_t knn = 10;
    std::size_t width = 200;
    std::size_t depth = 2;
    double target = 0.05;
    training::TrainConfig config;
};

int run_bench_gcn(const BenchArgs& args) {
    std::printf("generating %zu train / %zu test examples (n=%zu, k %zu->%zu, K=%zu)\n",
                args.count, args.test_count, args.n, args.k_in, args.k_out, args.knn);
    const datasets::Dataset train = datasets::gcn_regression_dataset(
        args.config.seed, args.config.seed + 1, args.count, args.n, args.k_in, args.k_out,
        args.knn);
    const datasets::Dataset test = datasets::gcn_regression_dataset(
        args.config.seed, args.config.seed + 2, args.test_count, args.n, args.k_in, args.k_out,
        args.knn);

    ModelSpec spec;
    spec.architecture = Architecture::DeepSets;
    spec.depth = args.depth;
    spec.width = args.width;
    spec.k_in = args.k_in;
    spec.k_out = args.k_out;
    spec.n = args.n;

    training::TrainConfig config = args.config;
    config.loss = training::LossKind::SmoothL1;
    const training::TrainResult result = training::train_model(spec, train, test, config);
    for (const training::EpochStats& row : result.history) print_epoch(row);

    const double final_test = result.history.empty() ? -1.0 : result.history.back().test_loss;
    const bool met = final_test >= 0.0 && final_test <= args.target;
    std::printf("final smooth-L1 test error %.6g, target %.3g: %s\n", final_test, args.target,
                met ? "met" : "MISSED");
    return met ? 0 : 1;
}

// ---------------------------------------------------------------------------
// wiring

void add_train_config_flags(CLI::App* cmd, training::TrainConfig& config) {
    cmd->add_option("--epochs", config.epochs, "Training epochs");
    cmd->add_option("--lr", config.lr, "Base learning rate");
    cmd->add_option("--batch", config.batch_size, "Mini-batch size");
    cmd->add_option("--seed", config.seed, "Seed for init and shuffling");
    cmd->add_option("--decay-factor", config.decay_factor, "Learning-rate decay multiplier");
    cmd->add_option("--decay-every", config.decay_every, "Epochs between decay steps");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equiset: permutation-equivariant set networks, data tools and property suites"};
    app.require_subcommand(1);
    int exit_code = 0;

    // gen-data
    GenDataArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a train/test dataset pair");
    add_config_flag(gen_cmd);
    gen_cmd->add_option("--task", gen.task, "Task name")
        ->required()
        ->check(CLI::IsMember(task_names()));
    gen_cmd->add_option("--out", gen.out, "Output base path (writes <out>.train.txt/.test.txt)")
        ->required();
    gen_cmd->add_option("--n", gen.n, "Set size (0 = task default)");
    gen_cmd->add_option("--count", gen.count, "Training examples");
    gen_cmd->add_option("--test-count", gen.test_count, "Test examples (0 = count/10)");
    gen_cmd->add_option("--k-in", gen.k_in, "Feature count (quadratic and gcn-approx)");
    gen_cmd->add_option("--k-out", gen.k_out, "Output width (gcn-approx)");
    gen_cmd->add_option("--knn", gen.knn, "Neighbors for graph-based tasks");
    gen_cmd->add_option("--value-cap", gen.value_cap, "Knapsack value cap");
    gen_cmd->add_option("--cost-cap", gen.cost_cap, "Knapsack cost cap");
    gen_cmd->add_option("--seed", gen.seed, "Generation seed (test split uses seed+1)");
    gen_cmd->callback([&] { exit_code = run_gen_data(gen); });

    // train
    TrainArgs train;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model on a generated dataset");
    add_config_flag(train_cmd);
    train_cmd->add_option("--data", train.data, "Dataset base path from gen-data")->required();
    train_cmd->add_option("--arch", train.arch, "Architecture")
        ->required()
        ->check(CLI::IsMember(architecture_names()));
    train_cmd->add_option("--out", train.out, "Output base path (writes <out>.ckpt/<out>.csv)")
        ->required();
    train_cmd->add_option("--width", train.width, "Per-row hidden width");
    train_cmd->add_option("--depth", train.depth, "Layer count");
    train_cmd->add_option("--k-out", train.k_out, "Output width (0 = derived)");
    train_cmd->add_option("--transmission-index", train.transmission_index,
                          "Transmission layer, 1-based (0 = middle)");
    train_cmd->add_option("--mlp-hidden", train.mlp_hidden,
                          "Mlp hidden width (0 = parameter-match deepsets)");
    train_cmd->add_option("--loss", train.loss, "Loss (default per task)")
        ->check(CLI::IsMember({"cross_entropy", "smooth_l1", "mse"}));
    add_train_config_flags(train_cmd, train.config);
    train_cmd->callback([&] { exit_code = run_train(train); });

    // eval
    EvalArgs eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset file");
    add_config_flag(eval_cmd);
    eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint path")->required();
    eval_cmd->add_option("--data", eval.data, "Dataset file (a .train.txt or .test.txt)")
        ->required();
    eval_cmd->add_option("--loss", eval.loss, "Loss (default per task)")
        ->check(CLI::IsMember({"cross_entropy", "smooth_l1", "mse"}));
    eval_cmd->callback([&] { exit_code = run_eval(eval); });

    // sweep
    SweepArgs sweep;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Train over a width grid and emit a CSV table");
    add_config_flag(sweep_cmd);
    sweep_cmd->add_option("--data", sweep.data, "Dataset base path")->required();
    sweep_cmd->add_option("--out", sweep.out, "Output CSV path")->required();
    sweep_cmd->add_option("--arch", sweep.archs, "Architectures (default: all)")
        ->check(CLI::IsMember(architecture_names()));
    sweep_cmd->add_option("--width", sweep.widths,
                          "Width grid (default: 15 equidistant in [5, n*k_in/2])");
    sweep_cmd->add_option("--depth", sweep.depth, "Layer count");
    sweep_cmd->add_option("--loss", sweep.loss, "Loss (default per task)")
        ->check(CLI::IsMember({"cross_entropy", "smooth_l1", "mse"}));
    add_train_config_flags(sweep_cmd, sweep.config);
    sweep_cmd->callback([&] { exit_code = run_sweep(sweep); });

    // verify
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run a property suite");
    verify_cmd->require_subcommand(1);

    verify::EquivarianceParams eq;
    std::vector<std::string> eq_archs;
    CLI::App* eq_cmd = verify_cmd->add_subcommand(
        "equivariance", "Check F(perm(X)) == perm(F(X)) on random models");
    add_config_flag(eq_cmd);
    eq_cmd->add_option("--arch", eq_archs, "Architectures (default: all equivariant ones)")
        ->check(CLI::IsMember(architecture_names()));
    eq_cmd->add_option("--trials", eq.trials, "Random inputs per architecture");
    eq_cmd->add_option("--n", eq.n, "Set size");
    eq_cmd->add_option("--k-in", eq.k_in, "Input features");
    eq_cmd->add_option("--k-out", eq.k_out, "Output features");
    eq_cmd->add_option("--width", eq.width, "Hidden width");
    eq_cmd->add_option("--depth", eq.depth, "Layer count");
    eq_cmd->add_option("--tol", eq.tol, "Max allowed deviation");
    eq_cmd->add_option("--seed", eq.seed, "Seed");
    eq_cmd->callback([&] {
        for (const std::string& name : eq_archs) {
            eq.architectures.push_back(parse_architecture(name));
        }
        const verify::SuiteReport report = verify::equivariance_suite(eq);
        print_report(report);
        exit_code = report.pass ? 0 : 1;
    });

    verify::SumFitParams lemma;
    CLI::App* lemma_cmd = verify_cmd->add_subcommand(
        "lemma4", "Check that per-row networks miss the row-sum target by >= 1/2");
    add_config_flag(lemma_cmd);
    lemma_cmd->add_option("--n", lemma.n, "Set size");
    lemma_cmd->add_option("--depth", lemma.depth, "Layer count");
    lemma_cmd->add_option("--width", lemma.width, "Hidden width");
    lemma_cmd->add_option("--epochs", lemma.epochs, "Training epochs for the fitted model");
    lemma_cmd->add_option("--seed", lemma.seed, "Seed");
    lemma_cmd->callback([&] {
        const verify::SuiteReport report = verify::sum_fit_suite(lemma);
        print_report(report);
        exit_code = report.pass ? 0 : 1;
    });

    verify::DecompositionParams dec;
    CLI::App* dec_cmd = verify_cmd->add_subcommand(
        "theorem2", "Round-trip the power-sum decomposition of equivariant polynomials");
    add_config_flag(dec_cmd);
    dec_cmd->add_option("--polys", dec.polys_per_shape, "Random polynomials per shape");
    dec_cmd->add_option("--degree-cap", dec.degree_cap, "Max power-sum monomial degree");
    dec_cmd->add_option("--n", dec.n_filter, "Restrict the round trip to one set size");
    dec_cmd->add_option("--k", dec.k_filter, "Restrict the round trip to one feature count");
    dec_cmd->add_option("--seed", dec.seed, "Seed");
    dec_cmd->callback([&] {
        const verify::SuiteReport report = verify::decomposition_suite(dec);
        print_report(report);
        exit_code = report.pass ? 0 : 1;
    });

    CLI::App* wb_cmd = verify_cmd->add_subcommand(
        "widthbound", "Cross-check the sufficient-width formula against Pascal binomials");
    wb_cmd->callback([&] {
        const verify::SuiteReport report = verify::width_bound_suite();
        print_report(report);
        exit_code = report.pass ? 0 : 1;
    });

    verify::GradCheckParams grad;
    CLI::App* grad_cmd = verify_cmd->add_subcommand(
        "gradcheck", "Compare reverse-mode gradients against central differences");
    add_config_flag(grad_cmd);
    grad_cmd->add_option("--configs", grad.configs, "Random configurations");
    grad_cmd->add_option("--tol", grad.tol, "Max allowed relative error");
    grad_cmd->add_option("--step", grad.step, "Central-difference step");
    grad_cmd->add_option("--seed", grad.seed, "Seed");
    grad_cmd->callback([&] {
        const verify::SuiteReport report = verify::grad_check_suite(grad);
        print_report(report);
        exit_code = report.pass ? 0 : 1;
    });

    // bench-gcn-approx
    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench-gcn-approx", "Regress a deepsets model onto one fixed graph-convolution layer");
    add_config_flag(bench_cmd);
    bench_cmd->add_option("--count", bench.count, "Training examples");
    bench_cmd->add_option("--test-count", bench.test_count, "Test examples");
    bench_cmd->add_option("--n", bench.n, "Set size");
    bench_cmd->add_option("--k-in", bench.k_in, "Input features");
    bench_cmd->add_option("--k-out", bench.k_out, "Output features");
    bench_cmd->add_option("--knn", bench.knn, "Neighbors for the propagation graph");
    bench_cmd->add_option("--width", bench.width, "Hidden width");
    bench_cmd->add_option("--depth", bench.depth, "Layer count");
    bench_cmd->add_option("--target", bench.target, "Smooth-L1 test error target");
    add_train_config_flags(bench_cmd, bench.config);
    bench_cmd->callback([&] { exit_code = run_bench_gcn(bench); });

    try {
        const std::vector<std::string> args = expand_config_args(argc, argv);
        std::vector<const char*> arg_ptrs;
        arg_ptrs.reserve(args.size());
        for (const std::string& a : args) arg_ptrs.push_back(a.c_str());
        app.parse(static_cast<int>(arg_ptrs.size()), arg_ptrs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric abort: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}
