#include "equiset/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace equiset::training {

void validate(const TrainConfig& config) {
    if (!(config.lr > 0.0)) throw std::invalid_argument("train config: lr must be > 0");
    if (config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 || config.beta2 >= 1.0) {
        throw std::invalid_argument("train config: betas must lie in [0, 1)");
    }
    if (config.eps <= 0.0) throw std::invalid_argument("train config: eps must be > 0");
    if (config.batch_size == 0) throw std::invalid_argument("train config: batch size must be >= 1");
    if (config.decay_every == 0) {
        throw std::invalid_argument("train config: decay interval must be >= 1 epoch");
    }
    if (!(config.decay_factor > 0.0)) {
        throw std::invalid_argument("train config: decay factor must be > 0");
    }
}

double lr_at(const TrainConfig& config, std::size_t epoch) {
    const std::size_t steps = epoch / config.decay_every;
    double lr = config.lr;
    for (std::size_t i = 0; i < steps; ++i) lr *= config.decay_factor;
    return lr;
}

AdamState make_adam_state(std::span<const Matrix> params) {
    AdamState state;
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Matrix& p : params) {
        state.m.emplace_back(p.rows(), p.cols());
        state.v.emplace_back(p.rows(), p.cols());
    }
    return state;
}

void adam_step(std::vector<Matrix>& params, std::span<const Matrix> grads, AdamState& state,
               const TrainConfig& config, double lr_t) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient/state counts differ");
    }
    state.t += 1;
    const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        require_same_shape(params[p], grads[p], "adam_step");
        auto theta = params[p].data();
        auto g = grads[p].data();
        auto m = state.m[p].data();
        auto v = state.v[p].data();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            theta[i] -= lr_t * m_hat / (std::sqrt(v_hat) + config.eps);
        }
    }
}

}  // namespace equiset::training
