#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "equiset/matrix.hpp"

namespace equiset {

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid for the tape that
// created it and until that tape is reset.
class Var {
public:
    Var() = default;
    std::uint32_t index() const { return idx_; }

private:
    friend class Tape;
    explicit Var(std::uint32_t idx) : idx_(idx) {}
    std::uint32_t idx_ = 0;
};

// Reverse-mode autodiff tape over Matrix values. Nodes are appended in
// evaluation order, so walking the tape backwards is a reverse topological
// traversal. A tape is confined to one thread; independent tapes may run in
// parallel.
class Tape {
public:
    Var leaf(Matrix value, bool requires_grad = true);
    Var constant(Matrix value) { return leaf(std::move(value), false); }

    const Matrix& value(Var v) const { return nodes_[v.idx_].value; }
    // Zero matrix of the node's shape if backward never reached it.
    Matrix grad(Var v) const;

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double s);
    Var add_scalar(Var a, double s);
    Var hadamard(Var a, Var b);
    Var pow_elementwise(Var a, double exponent);  // 0^0 = 1
    Var relu(Var a);                              // subgradient at 0 is 0
    Var transpose(Var a);
    Var sum(Var a);   // 1x1
    Var mean(Var a);  // 1x1
    Var col_sum(Var a);                           // 1 x cols
    Var col_mean(Var a);                          // 1 x cols
    Var broadcast_rows(Var row, std::size_t n);   // 1 x k -> n x k
    Var broadcast_cols(Var col, std::size_t k);   // n x 1 -> n x k
    Var col_max(Var a);                           // 1 x cols, grad to first argmax
    Var concat_cols(Var a, Var b);
    Var reshape(Var a, std::size_t rows, std::size_t cols);
    Var permute_rows(Var a, std::vector<std::size_t> perm);

    // Mean over rows of -log softmax(logits_i)[label_i], stabilized by
    // max-subtraction. Labels must lie in [0, cols).
    Var softmax_cross_entropy(Var logits, std::vector<int> labels);

    // Seeds d(loss)/d(loss) = 1 and propagates. loss must be 1x1. A second
    // call without reset() throws std::logic_error.
    void backward(Var loss);

    void reset();
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        Matrix grad;  // empty until first accumulation
        bool requires_grad = false;
        bool touched = false;
        std::function<void(Tape&)> backprop;  // empty for leaves
    };

    std::vector<Node> nodes_;
    bool backward_run_ = false;

    Var emit(Matrix value, bool requires_grad, std::function<void(Tape&)> backprop);
    bool needs(Var v) const { return nodes_[v.idx_].requires_grad; }
    void accumulate(std::uint32_t idx, Matrix&& g);
    void accumulate_scaled(std::uint32_t idx, const Matrix& g, double s);
    const Matrix& grad_ref(std::uint32_t idx) const { return nodes_[idx].grad; }

    friend struct TapeTestAccess;
};

}  // namespace equiset
