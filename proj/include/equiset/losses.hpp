#pragma once

#include <string_view>

#include "equiset/tape.hpp"

namespace equiset::training {

enum class LossKind { CrossEntropy, SmoothL1, Mse };

const char* loss_name(LossKind loss);
LossKind parse_loss(std::string_view name);

// Scalar (1x1) loss node. The target enters as a constant.
//   CrossEntropy: pred is n x 2 logits, target an n x 1 column of 0/1 labels;
//     mean over rows of -log softmax(pred_i)[label_i].
//   SmoothL1: mean over entries of 0.5 d^2 for |d| < 1 else |d| - 0.5.
//   Mse: mean over entries of d^2.
Var loss_forward(Tape& tape, LossKind kind, Var pred, const Matrix& target);

// Same value without keeping a tape around.
double loss_value(LossKind kind, const Matrix& pred, const Matrix& target);

}  // namespace equiset::training
