#include "equiset/datasets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "equiset/layers.hpp"
#include "equiset/model.hpp"
#include "equiset/pointcloud.hpp"
#include "equiset/rng.hpp"
#include "equiset/text_io.hpp"

namespace equiset::datasets {

const char* task_name(Task task) {
    switch (task) {
        case Task::Knapsack: return "knapsack";
        case Task::Quadratic: return "quadratic";
        case Task::Fiedler: return "fiedler";
        case Task::GcnApprox: return "gcn-approx";
    }
    throw std::logic_error("task_name: unmapped enum value");
}

Task parse_task(std::string_view name) {
    if (name == "knapsack") return Task::Knapsack;
    if (name == "quadratic") return Task::Quadratic;
    if (name == "fiedler") return Task::Fiedler;
    if (name == "gcn-approx") return Task::GcnApprox;
    throw std::invalid_argument("unknown task '" + std::string(name) +
                                "'; expected knapsack, quadratic, fiedler or gcn-approx");
}

Matrix quadratic_target(const Matrix& x) {
    double total = 0.0;
    for (double v : x.data()) {
        const double d = v - 0.5;
        total += d * d;
    }
    return Matrix::full(x.rows(), 1, total);
}

Dataset knapsack_dataset(std::uint64_t seed, std::size_t n, std::size_t count,
                         long long value_cap, long long cost_cap,
                         std::array<long long, 3> budgets) {
    Dataset dataset;
    dataset.task = Task::Knapsack;
    dataset.n = n;
    dataset.k_in = 4;
    dataset.k_out = 1;
    dataset.instances = gen_knapsack(seed, n, count, value_cap, cost_cap, budgets);
    dataset.examples.reserve(count);
    for (const KnapsackInstance& instance : dataset.instances) {
        Example ex;
        ex.x = instance.x;
        ex.y = Matrix(n, 1);
        for (std::size_t i = 0; i < n; ++i) ex.y(i, 0) = instance.z_star[i];
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

Dataset quadratic_dataset(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t count) {
    if (n == 0 || k == 0) throw std::invalid_argument("quadratic_dataset: n, k must be >= 1");
    Dataset dataset;
    dataset.task = Task::Quadratic;
    dataset.n = n;
    dataset.k_in = k;
    dataset.k_out = 1;
    Rng rng(seed);
    dataset.examples.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        Example ex;
        ex.x = Matrix(n, k);
        for (double& v : ex.x.data()) v = rng.normal(0.5, 1.0);
        ex.y = quadratic_target(ex.x);
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

Dataset fiedler_dataset(std::uint64_t seed, std::size_t n, std::size_t count,
                        std::size_t k_neighbors) {
    Dataset dataset;
    dataset.task = Task::Fiedler;
    dataset.n = n;
    dataset.k_in = 3;
    dataset.k_out = 1;
    Rng seeds(seed);
    dataset.examples.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        Example ex;
        ex.x = sample_point_cloud(seeds.next_u64(), n);
        ex.y = fiedler_target(ex.x, k_neighbors);
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

Dataset gcn_regression_dataset(std::uint64_t layer_seed, std::uint64_t data_seed,
                               std::size_t count, std::size_t n, std::size_t k_in,
                               std::size_t k_out, std::size_t k_neighbors) {
    if (n <= k_neighbors) {
        throw std::invalid_argument("gcn_regression_dataset: need n > k_neighbors");
    }
    Dataset dataset;
    dataset.task = Task::GcnApprox;
    dataset.n = n;
    dataset.k_in = k_in;
    dataset.k_out = k_out;

    // The labeling layer: one graph convolution with parameters fixed by
    // layer_seed, shared across train/test splits.
    ModelSpec layer_spec;
    layer_spec.architecture = Architecture::GraphNet;
    layer_spec.depth = 1;
    layer_spec.width = k_out;
    layer_spec.k_in = k_in;
    layer_spec.k_out = k_out;
    const Model layer = make_model(layer_spec, layer_seed);

    Rng rng(data_seed);
    dataset.examples.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        Example ex;
        ex.x = Matrix(n, k_in);
        for (double& v : ex.x.data()) v = rng.normal(0.5, 1.0);
        const Matrix propagation =
            layers::normalize_adjacency(knn_graph(ex.x, k_neighbors).adjacency);
        ex.y = model_apply(layer, ex.x, &propagation);
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_dataset: cannot open '" + path + "'");
    out << "equiset-dataset v1 task=" << task_name(dataset.task) << " n=" << dataset.n
        << " k=" << dataset.k_in;
    // k_out is implied by the task except for the graph-regression generator,
    // whose output width is configurable.
    if (dataset.task == Task::GcnApprox) out << " k_out=" << dataset.k_out;
    out << "\n";

    for (std::size_t e = 0; e < dataset.size(); ++e) {
        const Example& ex = dataset.examples[e];
        std::string line;
        auto append = [&line](double v) {
            if (!line.empty()) line += ' ';
            line += format_real(v);
        };
        for (double v : ex.x.data()) append(v);
        for (double v : ex.y.data()) append(v);
        if (dataset.task == Task::Knapsack) {
            const KnapsackInstance& instance = dataset.instances[e];
            for (long long w : instance.budgets) append(static_cast<double>(w));
            append(static_cast<double>(instance.v_star));
        }
        out << line << "\n";
    }
    if (!out) throw std::invalid_argument("save_dataset: write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_dataset: cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) {
        throw std::invalid_argument("load_dataset: '" + path + "' is empty");
    }
    std::stringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "equiset-dataset" || version != "v1") {
        throw std::invalid_argument("load_dataset: '" + path + "' is not an equiset-dataset v1 file");
    }

    Dataset dataset;
    bool have_task = false, have_n = false, have_k = false;
    std::size_t header_k_out = 0;
    std::string field;
    while (hs >> field) {
        const std::size_t eq = field.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("load_dataset: malformed header field '" + field + "'");
        }
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "task") {
            dataset.task = parse_task(value);
            have_task = true;
        } else if (key == "n") {
            dataset.n = static_cast<std::size_t>(parse_int(value, "dataset header n"));
            have_n = true;
        } else if (key == "k") {
            dataset.k_in = static_cast<std::size_t>(parse_int(value, "dataset header k"));
            have_k = true;
        } else if (key == "k_out") {
            header_k_out = static_cast<std::size_t>(parse_int(value, "dataset header k_out"));
        } else {
            throw std::invalid_argument("load_dataset: unknown header field '" + key + "'");
        }
    }
    if (!have_task || !have_n || !have_k || dataset.n == 0 || dataset.k_in == 0) {
        throw std::invalid_argument("load_dataset: header must carry task, n and k");
    }
    switch (dataset.task) {
        case Task::Knapsack:
            if (dataset.k_in != 4) {
                throw std::invalid_argument("load_dataset: knapsack data must have k=4");
            }
            dataset.k_out = 1;
            break;
        case Task::Quadratic:
        case Task::Fiedler: dataset.k_out = 1; break;
        case Task::GcnApprox: dataset.k_out = header_k_out == 0 ? 10 : header_k_out; break;
    }

    auto read_value = [&in, &path]() {
        double v = 0.0;
        if (!(in >> v)) {
            throw std::invalid_argument("load_dataset: '" + path + "' ends mid-record");
        }
        return v;
    };

    while (true) {
        // Peek for another record.
        double first = 0.0;
        if (!(in >> first)) break;

        Example ex;
        ex.x = Matrix(dataset.n, dataset.k_in);
        ex.x.data()[0] = first;
        for (std::size_t i = 1; i < ex.x.size(); ++i) ex.x.data()[i] = read_value();
        ex.y = Matrix(dataset.n, dataset.k_out);
        for (std::size_t i = 0; i < ex.y.size(); ++i) ex.y.data()[i] = read_value();

        if (dataset.task == Task::Knapsack) {
            KnapsackInstance instance;
            instance.x = ex.x;
            instance.z_star.resize(dataset.n);
            for (std::size_t i = 0; i < dataset.n; ++i) {
                const double z = ex.y(i, 0);
                if (z != 0.0 && z != 1.0) {
                    throw std::invalid_argument("load_dataset: knapsack labels must be 0/1");
                }
                instance.z_star[i] = static_cast<int>(z);
            }
            for (long long& w : instance.budgets) {
                const double v = read_value();
                if (v < 0.0 || v != std::floor(v)) {
                    throw std::invalid_argument("load_dataset: budgets must be non-negative integers");
                }
                w = static_cast<long long>(v);
            }
            const double v_star = read_value();
            if (v_star < 0.0 || v_star != std::floor(v_star)) {
                throw std::invalid_argument("load_dataset: optimal value must be a non-negative integer");
            }
            instance.v_star = static_cast<long long>(v_star);
            dataset.instances.push_back(std::move(instance));
        }
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

}  // namespace equiset::datasets
