#pragma once

#include <string>
#include <vector>

#include "equiset/adam.hpp"
#include "equiset/datasets.hpp"
#include "equiset/model.hpp"

namespace equiset::training {

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_metric = 0.0;
    double test_loss = 0.0;
    double test_metric = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    Model model;
    std::vector<EpochStats> history;
};

struct EvalResult {
    double loss = 0.0;
    // Knapsack: fraction of instances whose argmax prediction is feasible and
    // within 10% of optimal. Regression tasks: the mean loss again.
    double metric = 0.0;
};

LossKind default_loss(datasets::Task task);

EvalResult evaluate(const Model& model, const datasets::Dataset& dataset, LossKind loss);

// Mini-batch Adam over the shuffled training set; the last short batch is
// kept. Per-example gradients may be computed in parallel but are reduced in
// example order, so results are bit-identical for any thread count. Throws
// numeric_error naming the epoch and batch if the loss leaves the finite
// range.
TrainResult train_model(const ModelSpec& spec, const datasets::Dataset& train_set,
                        const datasets::Dataset& test_set, const TrainConfig& config);

// Continues optimization from an existing model with fresh optimizer state;
// epochs, the learning-rate schedule, and the shuffle stream restart at zero
// under the given config. Chaining calls trains under a piecewise schedule.
TrainResult train_model(Model model, const datasets::Dataset& train_set,
                        const datasets::Dataset& test_set, const TrainConfig& config);

// `epoch,train_loss,train_metric,test_loss,test_metric,lr` rows, lossless.
void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);
std::vector<EpochStats> read_history_csv(const std::string& path);

}  // namespace equiset::training
