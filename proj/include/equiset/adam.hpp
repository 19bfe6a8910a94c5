#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "equiset/losses.hpp"
#include "equiset/matrix.hpp"

namespace equiset::training {

struct TrainConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs = 100;
    double decay_factor = 0.5;
    std::size_t decay_every = 100;  // epochs per decay step
    LossKind loss = LossKind::Mse;
    std::uint64_t seed = 1;
};

// Throws std::invalid_argument on lr <= 0, betas outside [0,1), zero batch
// size or decay interval.
void validate(const TrainConfig& config);

// lr * decay_factor^floor(epoch / decay_every); epochs are 0-based, so the
// first decay applies at epoch == decay_every.
double lr_at(const TrainConfig& config, std::size_t epoch);

struct AdamState {
    std::vector<Matrix> m;  // first moments, shapes match the parameters
    std::vector<Matrix> v;  // second moments
    std::uint64_t t = 0;    // completed steps
};

AdamState make_adam_state(std::span<const Matrix> params);

// One bias-corrected update: m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2,
// theta <- theta - lr_t * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::vector<Matrix>& params, std::span<const Matrix> grads, AdamState& state,
               const TrainConfig& config, double lr_t);

}  // namespace equiset::training
