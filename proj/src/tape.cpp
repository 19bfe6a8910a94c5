#include "equiset/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace equiset {

Var Tape::emit(Matrix value, bool requires_grad, std::function<void(Tape&)> backprop) {
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return Var(static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::leaf(Matrix value, bool requires_grad) {
    return emit(std::move(value), requires_grad, nullptr);
}

Matrix Tape::grad(Var v) const {
    const Node& node = nodes_[v.idx_];
    if (!node.touched) return Matrix(node.value.rows(), node.value.cols());
    return node.grad;
}

void Tape::accumulate(std::uint32_t idx, Matrix&& g) {
    Node& node = nodes_[idx];
    if (!node.touched) {
        node.grad = std::move(g);
        node.touched = true;
    } else {
        add_in_place(node.grad, g);
    }
}

void Tape::accumulate_scaled(std::uint32_t idx, const Matrix& g, double s) {
    Node& node = nodes_[idx];
    if (!node.touched) {
        node.grad = equiset::scale(g, s);
        node.touched = true;
    } else {
        add_scaled_in_place(node.grad, g, s);
    }
}

Var Tape::matmul(Var a, Var b) {
    Matrix out = equiset::matmul(value(a), value(b));
    const bool rg = needs(a) || needs(b);
    const std::uint32_t ia = a.idx_, ib = b.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, ib, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        if (t.nodes_[ia].requires_grad)
            t.accumulate(ia, matmul_nt(g, t.nodes_[ib].value));
        if (t.nodes_[ib].requires_grad)
            t.accumulate(ib, matmul_tn(t.nodes_[ia].value, g));
    } : std::function<void(Tape&)>());
}

Var Tape::add(Var a, Var b) {
    Matrix out = equiset::add(value(a), value(b));
    const bool rg = needs(a) || needs(b);
    const std::uint32_t ia = a.idx_, ib = b.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, ib, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        if (t.nodes_[ia].requires_grad) t.accumulate_scaled(ia, g, 1.0);
        if (t.nodes_[ib].requires_grad) t.accumulate_scaled(ib, g, 1.0);
    } : std::function<void(Tape&)>());
}

Var Tape::sub(Var a, Var b) {
    Matrix out = equiset::sub(value(a), value(b));
    const bool rg = needs(a) || needs(b);
    const std::uint32_t ia = a.idx_, ib = b.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, ib, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        if (t.nodes_[ia].requires_grad) t.accumulate_scaled(ia, g, 1.0);
        if (t.nodes_[ib].requires_grad) t.accumulate_scaled(ib, g, -1.0);
    } : std::function<void(Tape&)>());
}

Var Tape::scale(Var a, double s) {
    Matrix out = equiset::scale(value(a), s);
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io, s](Tape& t) {
        t.accumulate_scaled(ia, t.grad_ref(io), s);
    } : std::function<void(Tape&)>());
}

Var Tape::add_scalar(Var a, double s) {
    Matrix out = value(a);
    for (double& v : out.data()) v += s;
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        t.accumulate_scaled(ia, t.grad_ref(io), 1.0);
    } : std::function<void(Tape&)>());
}

Var Tape::hadamard(Var a, Var b) {
    Matrix out = equiset::hadamard(value(a), value(b));
    const bool rg = needs(a) || needs(b);
    const std::uint32_t ia = a.idx_, ib = b.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, ib, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        if (t.nodes_[ia].requires_grad)
            t.accumulate(ia, equiset::hadamard(g, t.nodes_[ib].value));
        if (t.nodes_[ib].requires_grad)
            t.accumulate(ib, equiset::hadamard(g, t.nodes_[ia].value));
    } : std::function<void(Tape&)>());
}

Var Tape::pow_elementwise(Var a, double exponent) {
    const Matrix& x = value(a);
    Matrix out(x.rows(), x.cols());
    {
        auto xd = x.data();
        auto od = out.data();
        for (std::size_t i = 0; i < xd.size(); ++i)
            od[i] = (exponent == 0.0) ? 1.0 : std::pow(xd[i], exponent);
    }
    const bool rg = needs(a) && exponent != 0.0;
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), needs(a), rg ? [ia, io, exponent](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        Matrix dx(x.rows(), x.cols());
        auto xd = x.data();
        auto gd = g.data();
        auto dd = dx.data();
        for (std::size_t i = 0; i < xd.size(); ++i)
            dd[i] = gd[i] * exponent * std::pow(xd[i], exponent - 1.0);
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::relu(Var a) {
    const Matrix& x = value(a);
    Matrix out(x.rows(), x.cols());
    {
        auto xd = x.data();
        auto od = out.data();
        for (std::size_t i = 0; i < xd.size(); ++i) od[i] = xd[i] > 0.0 ? xd[i] : 0.0;
    }
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        Matrix dx(x.rows(), x.cols());
        auto xd = x.data();
        auto gd = g.data();
        auto dd = dx.data();
        for (std::size_t i = 0; i < xd.size(); ++i) dd[i] = xd[i] > 0.0 ? gd[i] : 0.0;
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::transpose(Var a) {
    Matrix out = equiset::transpose(value(a));
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        t.accumulate(ia, equiset::transpose(t.grad_ref(io)));
    } : std::function<void(Tape&)>());
}

Var Tape::sum(Var a) {
    double s = 0.0;
    for (double v : value(a).data()) s += v;
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(Matrix(1, 1, {s}), rg, rg ? [ia, io](Tape& t) {
        const double g = t.grad_ref(io)(0, 0);
        const Matrix& x = t.nodes_[ia].value;
        t.accumulate(ia, Matrix::full(x.rows(), x.cols(), g));
    } : std::function<void(Tape&)>());
}

Var Tape::mean(Var a) {
    const std::size_t count = value(a).size();
    if (count == 0) throw std::invalid_argument("mean: empty matrix");
    double s = 0.0;
    for (double v : value(a).data()) s += v;
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(Matrix(1, 1, {s / static_cast<double>(count)}), rg, rg ? [ia, io, count](Tape& t) {
        const double g = t.grad_ref(io)(0, 0) / static_cast<double>(count);
        const Matrix& x = t.nodes_[ia].value;
        t.accumulate(ia, Matrix::full(x.rows(), x.cols(), g));
    } : std::function<void(Tape&)>());
}

Var Tape::col_sum(Var a) {
    Matrix out = equiset::col_sum(value(a));
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        Matrix dx(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            std::copy(g.row_ptr(0), g.row_ptr(0) + x.cols(), dx.row_ptr(i));
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::col_mean(Var a) {
    const std::size_t n = value(a).rows();
    if (n == 0) throw std::invalid_argument("col_mean: empty matrix");
    Matrix out = equiset::col_mean(value(a));
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io, n](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        const double inv = 1.0 / static_cast<double>(n);
        Matrix dx(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) dx(i, j) = g(0, j) * inv;
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::broadcast_rows(Var row, std::size_t n) {
    const Matrix& v = value(row);
    if (v.rows() != 1) {
        throw std::invalid_argument("broadcast_rows: expected row vector, got " + v.shape_str());
    }
    Matrix out(n, v.cols());
    for (std::size_t i = 0; i < n; ++i)
        std::copy(v.row_ptr(0), v.row_ptr(0) + v.cols(), out.row_ptr(i));
    const bool rg = needs(row);
    const std::uint32_t ia = row.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        t.accumulate(ia, equiset::col_sum(t.grad_ref(io)));
    } : std::function<void(Tape&)>());
}

Var Tape::broadcast_cols(Var col, std::size_t k) {
    const Matrix& v = value(col);
    if (v.cols() != 1) {
        throw std::invalid_argument("broadcast_cols: expected column vector, got " +
                                    v.shape_str());
    }
    Matrix out(v.rows(), k);
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) = v(i, 0);
    const bool rg = needs(col);
    const std::uint32_t ia = col.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        Matrix dv(g.rows(), 1);
        for (std::size_t i = 0; i < g.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < g.cols(); ++j) acc += g(i, j);
            dv(i, 0) = acc;
        }
        t.accumulate(ia, std::move(dv));
    } : std::function<void(Tape&)>());
}

Var Tape::col_max(Var a) {
    const Matrix& x = value(a);
    if (x.rows() == 0) throw std::invalid_argument("col_max: empty matrix");
    Matrix out(1, x.cols());
    std::vector<std::size_t> argmax(x.cols(), 0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double best = x(0, j);
        for (std::size_t i = 1; i < x.rows(); ++i) {
            if (x(i, j) > best) {
                best = x(i, j);
                argmax[j] = i;
            }
        }
        out(0, j) = best;
    }
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io, argmax = std::move(argmax)](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        Matrix dx(x.rows(), x.cols());
        for (std::size_t j = 0; j < x.cols(); ++j) dx(argmax[j], j) = g(0, j);
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::concat_cols(Var a, Var b) {
    const Matrix& ma = value(a);
    const Matrix& mb = value(b);
    if (ma.rows() != mb.rows()) {
        throw std::invalid_argument("concat_cols: row counts differ, " + ma.shape_str() +
                                    " vs " + mb.shape_str());
    }
    Matrix out(ma.rows(), ma.cols() + mb.cols());
    for (std::size_t i = 0; i < ma.rows(); ++i) {
        std::copy(ma.row_ptr(i), ma.row_ptr(i) + ma.cols(), out.row_ptr(i));
        std::copy(mb.row_ptr(i), mb.row_ptr(i) + mb.cols(), out.row_ptr(i) + ma.cols());
    }
    const bool rg = needs(a) || needs(b);
    const std::uint32_t ia = a.idx_, ib = b.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, ib, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& ma = t.nodes_[ia].value;
        const Matrix& mb = t.nodes_[ib].value;
        if (t.nodes_[ia].requires_grad) {
            Matrix da(ma.rows(), ma.cols());
            for (std::size_t i = 0; i < ma.rows(); ++i)
                std::copy(g.row_ptr(i), g.row_ptr(i) + ma.cols(), da.row_ptr(i));
            t.accumulate(ia, std::move(da));
        }
        if (t.nodes_[ib].requires_grad) {
            Matrix db(mb.rows(), mb.cols());
            for (std::size_t i = 0; i < mb.rows(); ++i)
                std::copy(g.row_ptr(i) + ma.cols(), g.row_ptr(i) + ma.cols() + mb.cols(),
                          db.row_ptr(i));
            t.accumulate(ib, std::move(db));
        }
    } : std::function<void(Tape&)>());
}

Var Tape::reshape(Var a, std::size_t rows, std::size_t cols) {
    const Matrix& x = value(a);
    if (rows * cols != x.size()) {
        throw std::invalid_argument("reshape: cannot view " + x.shape_str() + " as " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix out(rows, cols, std::vector<double>(x.data().begin(), x.data().end()));
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        t.accumulate(ia, Matrix(x.rows(), x.cols(),
                                std::vector<double>(g.data().begin(), g.data().end())));
    } : std::function<void(Tape&)>());
}

Var Tape::permute_rows(Var a, std::vector<std::size_t> perm) {
    Matrix out = equiset::permute_rows(value(a), perm);
    const bool rg = needs(a);
    const std::uint32_t ia = a.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(std::move(out), rg, rg ? [ia, io, perm = std::move(perm)](Tape& t) {
        const Matrix& g = t.grad_ref(io);
        const Matrix& x = t.nodes_[ia].value;
        Matrix dx(x.rows(), x.cols());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const double* src = g.row_ptr(i);
            std::copy(src, src + g.cols(), dx.row_ptr(perm[i]));
        }
        t.accumulate(ia, std::move(dx));
    } : std::function<void(Tape&)>());
}

Var Tape::softmax_cross_entropy(Var logits, std::vector<int> labels) {
    const Matrix& z = value(logits);
    if (labels.size() != z.rows()) {
        throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(labels.size()) +
                                    " labels for " + z.shape_str() + " logits");
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= z.cols()) {
            throw std::domain_error("softmax_cross_entropy: label " + std::to_string(y) +
                                    " outside [0, " + std::to_string(z.cols()) + ")");
        }
    }
    const std::size_t n = z.rows(), c = z.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = z.row_ptr(i);
        double m = row[0];
        for (std::size_t j = 1; j < c; ++j) m = std::max(m, row[j]);
        double lse = 0.0;
        for (std::size_t j = 0; j < c; ++j) lse += std::exp(row[j] - m);
        total += std::log(lse) - (row[static_cast<std::size_t>(labels[i])] - m);
    }
    const bool rg = needs(logits);
    const std::uint32_t ia = logits.idx_;
    const std::uint32_t io = static_cast<std::uint32_t>(nodes_.size());
    return emit(Matrix(1, 1, {total / static_cast<double>(n)}), rg,
                rg ? [ia, io, labels = std::move(labels)](Tape& t) {
        const double g = t.grad_ref(io)(0, 0);
        const Matrix& z = t.nodes_[ia].value;
        const std::size_t n = z.rows(), c = z.cols();
        Matrix dz(n, c);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = z.row_ptr(i);
            double m = row[0];
            for (std::size_t j = 1; j < c; ++j) m = std::max(m, row[j]);
            double lse = 0.0;
            for (std::size_t j = 0; j < c; ++j) lse += std::exp(row[j] - m);
            for (std::size_t j = 0; j < c; ++j) {
                const double p = std::exp(row[j] - m) / lse;
                const double onehot = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
                dz(i, j) = g * inv_n * (p - onehot);
            }
        }
        t.accumulate(ia, std::move(dz));
    } : std::function<void(Tape&)>());
}

void Tape::backward(Var loss) {
    if (backward_run_) {
        throw std::logic_error("Tape::backward: called twice without reset");
    }
    const Node& loss_node = nodes_[loss.idx_];
    if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
        throw std::logic_error("Tape::backward: loss must be 1x1, got " +
                               loss_node.value.shape_str());
    }
    backward_run_ = true;
    accumulate(loss.idx_, Matrix(1, 1, {1.0}));
    for (std::uint32_t i = loss.idx_ + 1; i-- > 0;) {
        Node& node = nodes_[i];
        if (node.touched && node.backprop) node.backprop(*this);
    }
}

void Tape::reset() {
    nodes_.clear();
    backward_run_ = false;
}

}  // namespace equiset
