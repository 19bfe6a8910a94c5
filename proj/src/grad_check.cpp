#include "equiset/grad_check.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace equiset {

namespace {

double eval_scalar(const ScalarFn& f, std::span<const Matrix> params) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (const Matrix& p : params) vars.push_back(tape.constant(p));
    const Var out = f(tape, vars);
    const Matrix& v = tape.value(out);
    if (v.rows() != 1 || v.cols() != 1) {
        throw std::logic_error("grad_check: function output must be 1x1, got " + v.shape_str());
    }
    return v(0, 0);
}

}  // namespace

double grad_check(const ScalarFn& f, std::span<const Matrix> params, double step) {
    if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");

    Tape tape;
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (const Matrix& p : params) vars.push_back(tape.leaf(p));
    tape.backward(f(tape, vars));

    std::vector<Matrix> grads;
    grads.reserve(params.size());
    for (const Var& v : vars) grads.push_back(tape.grad(v));

    std::vector<Matrix> work(params.begin(), params.end());
    double max_err = 0.0;
    for (std::size_t p = 0; p < work.size(); ++p) {
        auto entries = work[p].data();
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const double original = entries[e];
            entries[e] = original + step;
            const double hi = eval_scalar(f, work);
            entries[e] = original - step;
            const double lo = eval_scalar(f, work);
            entries[e] = original;

            const double central = (hi - lo) / (2.0 * step);
            const double autodiff = grads[p].data()[e];
            const double err =
                std::abs(autodiff - central) / (std::abs(autodiff) + std::abs(central) + 1e-12);
            max_err = std::max(max_err, err);
        }
    }
    return max_err;
}

}  // namespace equiset
