#include "equiset/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "equiset/layers.hpp"
#include "equiset/rng.hpp"
#include "equiset/text_io.hpp"

namespace equiset {

namespace {

struct ArchEntry {
    Architecture arch;
    const char* name;
};

constexpr ArchEntry kArchTable[] = {
    {Architecture::PointNet, "pointnet"},   {Architecture::PointNetST, "pointnetst"},
    {Architecture::PointNetQT, "pointnetqt"}, {Architecture::DeepSets, "deepsets"},
    {Architecture::PointNetSeg, "pointnetseg"}, {Architecture::GraphNet, "graphnet"},
    {Architecture::Mlp, "mlp"},
};

bool is_bias(ParamRole role) { return role == ParamRole::C || role == ParamRole::DenseB; }

std::size_t mlp_params_for_hidden(const ModelSpec& spec, std::size_t hidden) {
    const std::size_t in0 = spec.n * spec.k_in;
    const std::size_t out_last = spec.n * spec.k_out;
    if (spec.depth == 1) return in0 * out_last + out_last;
    std::size_t total = in0 * hidden + hidden;
    for (std::size_t i = 1; i + 1 < spec.depth; ++i) total += hidden * hidden + hidden;
    total += hidden * out_last + out_last;
    return total;
}

}  // namespace

const char* architecture_name(Architecture arch) {
    for (const ArchEntry& e : kArchTable) {
        if (e.arch == arch) return e.name;
    }
    throw std::logic_error("architecture_name: unmapped enum value");
}

Architecture parse_architecture(std::string_view name) {
    for (const ArchEntry& e : kArchTable) {
        if (name == e.name) return e.arch;
    }
    std::string known;
    for (const ArchEntry& e : kArchTable) {
        if (!known.empty()) known += ", ";
        known += e.name;
    }
    throw std::invalid_argument("unknown architecture '" + std::string(name) +
                                "'; expected one of: " + known);
}

std::vector<Architecture> all_architectures() {
    std::vector<Architecture> all;
    for (const ArchEntry& e : kArchTable) all.push_back(e.arch);
    return all;
}

std::size_t resolved_transmission_index(const ModelSpec& spec) {
    return spec.transmission_index == 0 ? (spec.depth + 1) / 2 : spec.transmission_index;
}

std::size_t resolved_mlp_hidden(const ModelSpec& spec) {
    if (spec.mlp_hidden != 0) return spec.mlp_hidden;
    if (spec.depth == 1) return 0;  // a single dense layer has no hidden width
    if (spec.n == 0) {
        throw std::invalid_argument("mlp model needs the set size n to size its dense layers");
    }
    ModelSpec reference = spec;
    reference.architecture = Architecture::DeepSets;
    const std::size_t target = param_count(reference);

    // mlp_params_for_hidden is strictly increasing in the hidden width, so
    // the closest match brackets the first width meeting the target.
    std::size_t best = 1;
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t h = 1; h < 1'000'000; ++h) {
        const std::size_t count = mlp_params_for_hidden(spec, h);
        const std::size_t gap = count > target ? count - target : target - count;
        if (gap < best_gap) {
            best = h;
            best_gap = gap;
        }
        if (count >= target) break;
    }
    return best;
}

std::vector<Stage> model_stages(const ModelSpec& spec) {
    if (spec.depth == 0) throw std::invalid_argument("model: depth must be >= 1");
    if (spec.width == 0) throw std::invalid_argument("model: width must be >= 1");
    if (spec.k_in == 0 || spec.k_out == 0) {
        throw std::invalid_argument("model: k_in and k_out must be >= 1");
    }

    std::vector<Stage> stages;
    const std::size_t m = spec.depth;

    switch (spec.architecture) {
        case Architecture::PointNet:
        case Architecture::PointNetST:
        case Architecture::PointNetQT:
        case Architecture::DeepSets:
        case Architecture::GraphNet: {
            std::size_t ti = 0;
            if (spec.architecture == Architecture::PointNetST ||
                spec.architecture == Architecture::PointNetQT) {
                ti = resolved_transmission_index(spec);
                if (ti < 1 || ti > m) {
                    throw std::invalid_argument("model: transmission index " + std::to_string(ti) +
                                                " outside [1, " + std::to_string(m) + "]");
                }
            }
            for (std::size_t i = 1; i <= m; ++i) {
                Stage s;
                s.in = (i == 1) ? spec.k_in : spec.width;
                s.out = (i == m) ? spec.k_out : spec.width;
                s.relu_after = (i != m);
                switch (spec.architecture) {
                    case Architecture::PointNet: s.kind = StageKind::Affine; break;
                    case Architecture::DeepSets: s.kind = StageKind::AffineTransmit; break;
                    case Architecture::GraphNet: s.kind = StageKind::GraphConv; break;
                    case Architecture::PointNetST:
                        s.kind = (i == ti) ? StageKind::AffineTransmit : StageKind::Affine;
                        break;
                    default:  // PointNetQT
                        s.kind = (i == ti) ? StageKind::Quadratic : StageKind::Affine;
                        break;
                }
                stages.push_back(s);
            }
            break;
        }
        case Architecture::PointNetSeg: {
            const std::size_t half = (m + 1) / 2;
            for (std::size_t i = 1; i <= half; ++i) {
                Stage s;
                s.kind = StageKind::Affine;
                s.in = (i == 1) ? spec.k_in : spec.width;
                s.out = spec.width;
                s.relu_after = (i != half);
                stages.push_back(s);
            }
            Stage pool;
            pool.kind = StageKind::PoolConcat;
            pool.in = spec.width;
            pool.out = spec.k_in + spec.width;
            stages.push_back(pool);
            for (std::size_t i = 1; i <= half; ++i) {
                Stage s;
                s.kind = StageKind::Affine;
                s.in = (i == 1) ? spec.k_in + spec.width : spec.width;
                s.out = (i == half) ? spec.k_out : spec.width;
                s.relu_after = (i != half);
                stages.push_back(s);
            }
            break;
        }
        case Architecture::Mlp: {
            if (spec.n == 0) {
                throw std::invalid_argument("mlp model needs the set size n");
            }
            const std::size_t hidden = resolved_mlp_hidden(spec);
            const std::size_t in0 = spec.n * spec.k_in;
            const std::size_t out_last = spec.n * spec.k_out;
            for (std::size_t i = 1; i <= m; ++i) {
                Stage s;
                s.kind = StageKind::Dense;
                s.in = (i == 1) ? in0 : hidden;
                s.out = (i == m) ? out_last : hidden;
                s.relu_after = (i != m);
                stages.push_back(s);
            }
            break;
        }
    }
    return stages;
}

std::vector<ParamInfo> param_layout(const ModelSpec& spec) {
    const std::vector<Stage> stages = model_stages(spec);
    std::vector<ParamInfo> infos;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const Stage& stage = stages[s];
        auto push = [&](ParamRole role, std::size_t rows, std::size_t cols) {
            infos.push_back(ParamInfo{s, role, rows, cols});
        };
        switch (stage.kind) {
            case StageKind::Affine:
                push(ParamRole::A, stage.in, stage.out);
                push(ParamRole::C, 1, stage.out);
                break;
            case StageKind::AffineTransmit:
                push(ParamRole::A, stage.in, stage.out);
                push(ParamRole::B, stage.in, stage.out);
                push(ParamRole::C, 1, stage.out);
                break;
            case StageKind::Quadratic:
                push(ParamRole::W1, stage.in, stage.out);
                push(ParamRole::W2, stage.in, stage.out);
                push(ParamRole::W3, stage.in, stage.out);
                push(ParamRole::W4, stage.in, stage.out);
                push(ParamRole::W5, stage.in, stage.out);
                break;
            case StageKind::GraphConv:
                push(ParamRole::W1, stage.in, stage.out);
                push(ParamRole::W2, stage.in, stage.out);
                push(ParamRole::C, 1, stage.out);
                break;
            case StageKind::Dense:
                push(ParamRole::DenseW, stage.in, stage.out);
                push(ParamRole::DenseB, 1, stage.out);
                break;
            case StageKind::PoolConcat:
                break;
        }
    }
    return infos;
}

std::size_t param_count(const ModelSpec& spec) {
    std::size_t total = 0;
    for (const ParamInfo& info : param_layout(spec)) total += info.rows * info.cols;
    return total;
}

Model make_model(const ModelSpec& spec, std::uint64_t seed) {
    Model model;
    model.spec = spec;
    Rng rng(seed);
    for (const ParamInfo& info : param_layout(spec)) {
        Matrix p(info.rows, info.cols);
        if (!is_bias(info.role)) {
            // Uniform with variance 1 / (3 fan_in). Layers that sum several
            // parameter paths (transmission, quadratic) stay stable with this
            // scale where a ReLU-gain init overshoots.
            const double bound = 1.0 / std::sqrt(static_cast<double>(info.rows));
            for (double& v : p.data()) v = rng.uniform(-bound, bound);
        }
        model.params.push_back(std::move(p));
    }
    return model;
}

Var model_forward(Tape& tape, const ModelSpec& spec, std::span<const Var> params, Var x,
                  const Matrix* propagation) {
    const std::vector<Stage> stages = model_stages(spec);
    const std::size_t n = tape.value(x).rows();
    const std::size_t k = tape.value(x).cols();
    if (k != spec.k_in) {
        throw std::invalid_argument("model_forward: input has " + std::to_string(k) +
                                    " features, spec wants " + std::to_string(spec.k_in));
    }
    if (spec.architecture == Architecture::Mlp && n != spec.n) {
        throw std::invalid_argument("model_forward: mlp built for n=" + std::to_string(spec.n) +
                                    ", input has " + std::to_string(n) + " rows");
    }
    if (spec.architecture == Architecture::GraphNet && propagation == nullptr) {
        throw std::invalid_argument("model_forward: graphnet needs a propagation matrix");
    }

    std::size_t cursor = 0;
    auto next = [&]() {
        if (cursor >= params.size()) {
            throw std::invalid_argument("model_forward: too few parameters for the spec");
        }
        return params[cursor++];
    };

    const Var x0 = x;
    Var h = x;
    if (spec.architecture == Architecture::Mlp) h = tape.reshape(h, 1, n * k);

    for (const Stage& stage : stages) {
        switch (stage.kind) {
            case StageKind::Affine: {
                const Var a = next();
                const Var c = next();
                h = layers::affine_equivariant(tape, h, a, std::nullopt, c);
                break;
            }
            case StageKind::AffineTransmit: {
                const Var a = next();
                const Var b = next();
                const Var c = next();
                h = layers::affine_equivariant(tape, h, a, b, c);
                break;
            }
            case StageKind::Quadratic: {
                std::array<Var, 5> w;
                for (Var& wi : w) wi = next();
                h = layers::quadratic_equivariant(tape, h, w);
                break;
            }
            case StageKind::GraphConv: {
                const Var w1 = next();
                const Var w2 = next();
                const Var c = next();
                h = layers::graph_conv(tape, h, *propagation, w1, w2, c);
                break;
            }
            case StageKind::Dense: {
                const Var w = next();
                const Var b = next();
                h = tape.add(tape.matmul(h, w), b);
                break;
            }
            case StageKind::PoolConcat: {
                const Var pooled = tape.col_max(h);
                h = tape.concat_cols(x0, tape.broadcast_rows(pooled, n));
                break;
            }
        }
        if (stage.relu_after) h = tape.relu(h);
    }
    if (cursor != params.size()) {
        throw std::invalid_argument("model_forward: " + std::to_string(params.size()) +
                                    " parameters passed, spec uses " + std::to_string(cursor));
    }
    if (spec.architecture == Architecture::Mlp) h = tape.reshape(h, n, spec.k_out);
    return h;
}

Matrix model_apply(const Model& model, const Matrix& x, const Matrix* propagation) {
    Tape tape;
    std::vector<Var> params;
    params.reserve(model.params.size());
    for (const Matrix& p : model.params) params.push_back(tape.constant(p));
    const Var out = model_forward(tape, model.spec, params, tape.constant(x), propagation);
    return tape.value(out);
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_model: cannot open '" + path + "'");
    out << "equiset-checkpoint v1\n";
    out << "arch " << architecture_name(model.spec.architecture) << "\n";
    out << "depth " << model.spec.depth << "\n";
    out << "width " << model.spec.width << "\n";
    out << "k_in " << model.spec.k_in << "\n";
    out << "k_out " << model.spec.k_out << "\n";
    out << "n " << model.spec.n << "\n";
    out << "transmission_index " << model.spec.transmission_index << "\n";
    out << "mlp_hidden " << model.spec.mlp_hidden << "\n";
    out << "params " << model.params.size() << "\n";
    for (const Matrix& p : model.params) {
        out << "param " << p.rows() << " " << p.cols() << "\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i != 0) out << ' ';
            out << format_real(p.data()[i]);
        }
        out << "\n";
    }
    if (!out) throw std::invalid_argument("save_model: write to '" + path + "' failed");
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_model: cannot open '" + path + "'");
    auto expect = [&](const char* literal) {
        std::string token;
        if (!(in >> token) || token != literal) {
            throw std::invalid_argument("load_model: '" + path + "' is not a valid checkpoint (expected '" +
                                        literal + "', got '" + token + "')");
        }
    };
    auto read_count = [&](const char* key) {
        expect(key);
        long long v = 0;
        if (!(in >> v) || v < 0) {
            throw std::invalid_argument(std::string("load_model: bad value for ") + key);
        }
        return static_cast<std::size_t>(v);
    };

    expect("equiset-checkpoint");
    expect("v1");
    expect("arch");
    std::string arch_name;
    in >> arch_name;

    Model model;
    model.spec.architecture = parse_architecture(arch_name);
    model.spec.depth = read_count("depth");
    model.spec.width = read_count("width");
    model.spec.k_in = read_count("k_in");
    model.spec.k_out = read_count("k_out");
    model.spec.n = read_count("n");
    model.spec.transmission_index = read_count("transmission_index");
    model.spec.mlp_hidden = read_count("mlp_hidden");
    const std::size_t count = read_count("params");

    const std::vector<ParamInfo> layout = param_layout(model.spec);
    if (count != layout.size()) {
        throw std::invalid_argument("load_model: checkpoint stores " + std::to_string(count) +
                                    " parameter blocks, spec needs " +
                                    std::to_string(layout.size()));
    }
    for (const ParamInfo& info : layout) {
        const std::size_t rows = read_count("param");
        std::size_t cols = 0;
        {
            long long v = 0;
            if (!(in >> v) || v < 0) throw std::invalid_argument("load_model: bad param shape");
            cols = static_cast<std::size_t>(v);
        }
        if (rows != info.rows || cols != info.cols) {
            throw std::invalid_argument("load_model: parameter shape " + std::to_string(rows) +
                                        "x" + std::to_string(cols) + " does not match the spec's " +
                                        std::to_string(info.rows) + "x" +
                                        std::to_string(info.cols));
        }
        Matrix p(rows, cols);
        for (double& v : p.data()) {
            if (!(in >> v)) throw std::invalid_argument("load_model: truncated parameter data");
        }
        model.params.push_back(std::move(p));
    }
    return model;
}

}  // namespace equiset
