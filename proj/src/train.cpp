#include "equiset/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "equiset/errors.hpp"
#include "equiset/layers.hpp"
#include "equiset/parallel.hpp"
#include "equiset/pointcloud.hpp"
#include "equiset/rng.hpp"
#include "equiset/text_io.hpp"

namespace equiset::training {

namespace {

// GraphNet consumes the normalized adjacency of each example's own
// k-nearest-neighbor graph, mirroring how the graph-regression data is built.
constexpr std::size_t kGraphNeighbors = 10;

const Matrix* example_propagation(const ModelSpec& spec, const Matrix& x, Matrix& storage) {
    if (spec.architecture != Architecture::GraphNet) return nullptr;
    if (x.rows() < 2) {
        throw std::invalid_argument("graphnet needs at least 2 rows to build a neighbor graph");
    }
    const std::size_t k_neighbors = std::min<std::size_t>(kGraphNeighbors, x.rows() - 1);
    storage = layers::normalize_adjacency(datasets::knn_graph(x, k_neighbors).adjacency);
    return &storage;
}

std::vector<int> argmax_rows(const Matrix& logits) {
    std::vector<int> picks(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        picks[i] = logits(i, 1) > logits(i, 0) ? 1 : 0;  // tie keeps the lower class
    }
    return picks;
}

void check_dataset_compat(const ModelSpec& spec, const datasets::Dataset& dataset,
                          LossKind loss) {
    if (dataset.size() == 0) throw std::invalid_argument("training needs a non-empty dataset");
    if (spec.k_in != dataset.k_in) {
        throw std::invalid_argument("model k_in=" + std::to_string(spec.k_in) +
                                    " does not match dataset k_in=" +
                                    std::to_string(dataset.k_in));
    }
    if (loss == LossKind::CrossEntropy) {
        // Two logits per element, argmax picks the subset bit.
        if (spec.k_out != 2) {
            throw std::invalid_argument("cross entropy head needs k_out=2, spec has k_out=" +
                                        std::to_string(spec.k_out));
        }
    } else if (spec.k_out != dataset.k_out) {
        throw std::invalid_argument("model k_out=" + std::to_string(spec.k_out) +
                                    " does not match dataset k_out=" +
                                    std::to_string(dataset.k_out));
    }
}

}  // namespace

LossKind default_loss(datasets::Task task) {
    switch (task) {
        case datasets::Task::Knapsack: return LossKind::CrossEntropy;
        case datasets::Task::GcnApprox: return LossKind::SmoothL1;
        case datasets::Task::Quadratic:
        case datasets::Task::Fiedler: return LossKind::Mse;
    }
    throw std::logic_error("default_loss: unmapped task");
}

EvalResult evaluate(const Model& model, const datasets::Dataset& dataset, LossKind loss) {
    check_dataset_compat(model.spec, dataset, loss);
    const std::size_t count = dataset.size();
    std::vector<double> losses(count);
    std::vector<char> ok(count, 0);
    const bool knapsack = dataset.task == datasets::Task::Knapsack;

    parallel_for(count, [&](std::size_t i) {
        const datasets::Example& ex = dataset.examples[i];
        Matrix prop;
        const Matrix* prop_ptr = example_propagation(model.spec, ex.x, prop);
        const Matrix pred = model_apply(model, ex.x, prop_ptr);
        losses[i] = loss_value(loss, pred, ex.y);
        if (knapsack) {
            const std::vector<int> z = argmax_rows(pred);
            ok[i] = datasets::knapsack_success(z, dataset.instances[i]) ? 1 : 0;
        }
    });

    EvalResult result;
    double loss_sum = 0.0;
    std::size_t ok_count = 0;
    for (std::size_t i = 0; i < count; ++i) {
        loss_sum += losses[i];
        ok_count += static_cast<std::size_t>(ok[i]);
    }
    result.loss = loss_sum / static_cast<double>(count);
    result.metric = knapsack ? static_cast<double>(ok_count) / static_cast<double>(count)
                             : result.loss;
    return result;
}

TrainResult train_model(const ModelSpec& spec, const datasets::Dataset& train_set,
                        const datasets::Dataset& test_set, const TrainConfig& config) {
    return train_model(make_model(spec, config.seed), train_set, test_set, config);
}

TrainResult train_model(Model start, const datasets::Dataset& train_set,
                        const datasets::Dataset& test_set, const TrainConfig& config) {
    validate(config);
    TrainResult result;
    result.model = std::move(start);
    Model& model = result.model;
    const ModelSpec& spec = model.spec;
    check_dataset_compat(spec, train_set, config.loss);
    check_dataset_compat(spec, test_set, config.loss);
    AdamState adam = make_adam_state(model.params);
    // Distinct stream from the init draws so adding parameters to a model
    // never shifts the shuffle sequence.
    Rng shuffle_rng(config.seed + 0x9e3779b97f4a7c15ULL);

    const std::size_t count = train_set.size();
    const std::size_t param_n = model.params.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr_t = lr_at(config, epoch);
        shuffle_rng.shuffle(order);

        for (std::size_t start = 0, batch_id = 0; start < count;
             start += config.batch_size, ++batch_id) {
            const std::size_t bsize = std::min(config.batch_size, count - start);
            std::vector<double> example_loss(bsize);
            std::vector<std::vector<Matrix>> example_grads(bsize);

            parallel_for(bsize, [&](std::size_t j) {
                const datasets::Example& ex = train_set.examples[order[start + j]];
                Tape tape;
                std::vector<Var> pvars;
                pvars.reserve(param_n);
                for (const Matrix& p : model.params) pvars.push_back(tape.leaf(p));
                Matrix prop;
                const Matrix* prop_ptr = example_propagation(spec, ex.x, prop);
                const Var pred =
                    model_forward(tape, spec, pvars, tape.constant(ex.x), prop_ptr);
                const Var loss = loss_forward(tape, config.loss, pred, ex.y);
                tape.backward(loss);
                example_loss[j] = tape.value(loss)(0, 0);
                example_grads[j].reserve(param_n);
                for (const Var& pv : pvars) example_grads[j].push_back(tape.grad(pv));
            });

            // Reduce in example order so results do not depend on thread count.
            double batch_loss = 0.0;
            for (double l : example_loss) batch_loss += l;
            batch_loss /= static_cast<double>(bsize);
            if (!std::isfinite(batch_loss)) {
                throw numeric_error("training loss became non-finite at epoch " +
                                    std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_id));
            }

            std::vector<Matrix> grads = std::move(example_grads[0]);
            for (std::size_t j = 1; j < bsize; ++j) {
                for (std::size_t p = 0; p < param_n; ++p) {
                    add_in_place(grads[p], example_grads[j][p]);
                }
            }
            const double inv = 1.0 / static_cast<double>(bsize);
            for (Matrix& g : grads) {
                for (double& v : g.data()) v *= inv;
            }
            adam_step(model.params, grads, adam, config, lr_t);
        }

        const EvalResult train_eval = evaluate(model, train_set, config.loss);
        const EvalResult test_eval = evaluate(model, test_set, config.loss);
        // The batch check above misses a step that breaks the parameters on
        // the last batch of the run; the epoch evaluation catches that.
        if (!std::isfinite(train_eval.loss) || !std::isfinite(test_eval.loss)) {
            throw numeric_error("evaluation loss became non-finite at epoch " +
                                std::to_string(epoch));
        }
        result.history.push_back(EpochStats{epoch, train_eval.loss, train_eval.metric,
                                            test_eval.loss, test_eval.metric, lr_t});
    }
    return result;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_history_csv: cannot open '" + path + "'");
    out << "epoch,train_loss,train_metric,test_loss,test_metric,lr\n";
    for (const EpochStats& row : history) {
        out << row.epoch << ',' << format_real(row.train_loss) << ','
            << format_real(row.train_metric) << ',' << format_real(row.test_loss) << ','
            << format_real(row.test_metric) << ',' << format_real(row.lr) << "\n";
    }
    if (!out) throw std::invalid_argument("write_history_csv: write to '" + path + "' failed");
}

std::vector<EpochStats> read_history_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("read_history_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "epoch,train_loss,train_metric,test_loss,test_metric,lr") {
        throw std::invalid_argument("read_history_csv: '" + path + "' has an unexpected header");
    }
    std::vector<EpochStats> history;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6) {
            throw std::invalid_argument("read_history_csv: malformed row '" + line + "'");
        }
        EpochStats row;
        row.epoch = static_cast<std::size_t>(parse_int(fields[0], "csv epoch"));
        row.train_loss = parse_real(fields[1], "csv train_loss");
        row.train_metric = parse_real(fields[2], "csv train_metric");
        row.test_loss = parse_real(fields[3], "csv test_loss");
        row.test_metric = parse_real(fields[4], "csv test_metric");
        row.lr = parse_real(fields[5], "csv lr");
        history.push_back(row);
    }
    return history;
}

}  // namespace equiset::training
