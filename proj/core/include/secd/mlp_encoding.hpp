#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "secd/milp_problem.hpp"
#include "secd/neuron_bounds.hpp"
#include "secd/surrogate.hpp"

namespace secd {

struct EncodingOptions {
    /// Per-neuron constants from the propagated bounds, with neuron fixing.
    /// When false every neuron gets the big-M rows with `global_m`.
    bool tighten = true;
    double global_m = 1e4;
    double safety_factor = 1.05;
};

struct MlpEncoding {
    VarId y1;  // "unsafe" logit
    VarId y2;  // "safe" logit
    std::vector<VarId> binaries;
    std::vector<std::pair<std::size_t, std::size_t>> binary_neurons;  // (hidden layer, neuron) per binary
    std::size_t always_on = 0;
    std::size_t always_off = 0;
    std::size_t undecided = 0;
};

/// Adds the exact mixed-integer form of the ReLU network to `problem`,
/// with the input normalization folded into the first layer. Every
/// undecided neuron gets h, r >= 0, a binary mu and the rows
/// h - r = W h_prev + b, h <= U mu, r <= L (1 - mu). Variable and row
/// names start with `prefix`. Throws InvalidArgument when the bounds do
/// not match the model or contradict their statuses.
MlpEncoding encode_mlp(MilpProblem& problem, const MlpModel& model, const NeuronBounds& bounds,
                       const std::vector<LinearExpr>& inputs, const std::string& prefix,
                       const EncodingOptions& options = {});
MlpEncoding encode_mlp(MilpProblem& problem, const MlpModel& model, const NeuronBounds& bounds,
                       const std::vector<VarId>& inputs, const std::string& prefix,
                       const EncodingOptions& options = {});

}  // namespace secd
