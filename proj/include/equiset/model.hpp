#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equiset/tape.hpp"

namespace equiset {

enum class Architecture {
    PointNet,     // per-row affine stack, no cross-row terms
    PointNetST,   // one layer carries the cross-row (transmission) term
    PointNetQT,   // one quadratic transmission layer
    DeepSets,     // every layer carries the transmission term
    PointNetSeg,  // per-row stack, max-pool, concat with input, per-row stack
    GraphNet,     // graph convolution stack over a fixed propagation matrix
    Mlp           // dense layers on the flattened set (baseline, not equivariant)
};

const char* architecture_name(Architecture arch);
Architecture parse_architecture(std::string_view name);
std::vector<Architecture> all_architectures();

struct ModelSpec {
    Architecture architecture = Architecture::DeepSets;
    std::size_t depth = 6;   // number of layers m
    std::size_t width = 16;  // hidden per-row feature count
    std::size_t k_in = 1;
    std::size_t k_out = 1;
    // Set size. Required for Mlp (the flattened input is n * k_in wide);
    // other architectures accept any number of rows at run time.
    std::size_t n = 0;
    // 1-based layer carrying the transmission term for PointNetST/QT;
    // 0 picks the middle layer ceil(m/2).
    std::size_t transmission_index = 0;
    // Dense hidden width for Mlp; 0 sizes it so the total parameter count is
    // closest to the DeepSets model with the same depth/width/k_in/k_out.
    std::size_t mlp_hidden = 0;
};

std::size_t resolved_transmission_index(const ModelSpec& spec);
std::size_t resolved_mlp_hidden(const ModelSpec& spec);

// Layer sequence realizing a spec. PoolConcat is the parameter-free max-pool
// + concat step between the two PointNetSeg stacks.
enum class StageKind { Affine, AffineTransmit, Quadratic, GraphConv, Dense, PoolConcat };

struct Stage {
    StageKind kind;
    std::size_t in = 0;
    std::size_t out = 0;
    bool relu_after = false;
};

// Validates the spec and lays out its stages. Throws std::invalid_argument on
// bad counts or a transmission index outside [1, depth].
std::vector<Stage> model_stages(const ModelSpec& spec);

enum class ParamRole { A, B, C, W1, W2, W3, W4, W5, DenseW, DenseB };

struct ParamInfo {
    std::size_t stage;  // index into model_stages(spec)
    ParamRole role;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// Deterministic parameter order: stage-major, roles in declaration order.
std::vector<ParamInfo> param_layout(const ModelSpec& spec);
std::size_t param_count(const ModelSpec& spec);  // total scalar count

struct Model {
    ModelSpec spec;
    std::vector<Matrix> params;  // aligned with param_layout(spec)
};

// Weight matrices uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] with fan_in
// the matrix row count; biases zero.
Model make_model(const ModelSpec& spec, std::uint64_t seed);

// Forward pass on a tape; params must align with param_layout(spec).
// GraphNet requires `propagation` (a normalized adjacency matching x's row
// count); other architectures ignore it.
Var model_forward(Tape& tape, const ModelSpec& spec, std::span<const Var> params, Var x,
                  const Matrix* propagation = nullptr);

// Non-training forward on a private tape.
Matrix model_apply(const Model& model, const Matrix& x, const Matrix* propagation = nullptr);

// Textual checkpoint, versioned, lossless (17 significant digits round-trips
// doubles exactly).
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace equiset
