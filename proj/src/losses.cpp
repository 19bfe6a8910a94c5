#include "equiset/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace equiset::training {

namespace {

std::vector<int> labels_from_column(const Matrix& target) {
    if (target.cols() != 1) {
        throw std::invalid_argument("cross entropy target must be a single label column, got " +
                                    target.shape_str());
    }
    std::vector<int> labels(target.rows());
    for (std::size_t i = 0; i < target.rows(); ++i) {
        const double v = target(i, 0);
        if (v != 0.0 && v != 1.0) {
            throw std::domain_error("cross entropy label must be 0 or 1, got " +
                                    std::to_string(v) + " at row " + std::to_string(i));
        }
        labels[i] = static_cast<int>(v);
    }
    return labels;
}

}  // namespace

const char* loss_name(LossKind loss) {
    switch (loss) {
        case LossKind::CrossEntropy: return "cross_entropy";
        case LossKind::SmoothL1: return "smooth_l1";
        case LossKind::Mse: return "mse";
    }
    throw std::logic_error("loss_name: unmapped enum value");
}

LossKind parse_loss(std::string_view name) {
    if (name == "cross_entropy") return LossKind::CrossEntropy;
    if (name == "smooth_l1") return LossKind::SmoothL1;
    if (name == "mse") return LossKind::Mse;
    throw std::invalid_argument("unknown loss '" + std::string(name) +
                                "'; expected cross_entropy, smooth_l1 or mse");
}

Var loss_forward(Tape& tape, LossKind kind, Var pred, const Matrix& target) {
    switch (kind) {
        case LossKind::CrossEntropy:
            return tape.softmax_cross_entropy(pred, labels_from_column(target));
        case LossKind::SmoothL1: {
            require_same_shape(tape.value(pred), target, "smooth_l1");
            const Var d = tape.sub(pred, tape.constant(target));
            // |d| = relu(d) + relu(-d); 0.5 d^2 - 0.5 relu(|d|-1)^2 equals the
            // quadratic branch below 1 and |d| - 0.5 above it.
            const Var abs_d = tape.add(tape.relu(d), tape.relu(tape.scale(d, -1.0)));
            const Var excess = tape.relu(tape.add_scalar(abs_d, -1.0));
            const Var per_entry = tape.sub(tape.scale(tape.hadamard(d, d), 0.5),
                                           tape.scale(tape.hadamard(excess, excess), 0.5));
            return tape.mean(per_entry);
        }
        case LossKind::Mse: {
            require_same_shape(tape.value(pred), target, "mse");
            const Var d = tape.sub(pred, tape.constant(target));
            return tape.mean(tape.hadamard(d, d));
        }
    }
    throw std::logic_error("loss_forward: unmapped enum value");
}

double loss_value(LossKind kind, const Matrix& pred, const Matrix& target) {
    Tape tape;
    const Var out = loss_forward(tape, kind, tape.constant(pred), target);
    return tape.value(out)(0, 0);
}

}  // namespace equiset::training
