#include "secd/mlp_encoding.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace secd {

namespace {

void check_bounds(const MlpModel& model, const NeuronBounds& bounds) {
    const std::size_t hidden = model.hidden_layers();
    if (bounds.lower.size() != hidden || bounds.upper.size() != hidden || bounds.status.size() != hidden)
        throw InvalidArgument("encode_mlp: bounds do not match the model depth");
    for (std::size_t k = 0; k < hidden; ++k) {
        const auto width = static_cast<std::size_t>(model.weights[k].rows());
        if (static_cast<std::size_t>(bounds.lower[k].size()) != width ||
            static_cast<std::size_t>(bounds.upper[k].size()) != width || bounds.status[k].size() != width)
            throw InvalidArgument(fmt::format("encode_mlp: bounds for layer {} have the wrong width", k + 1));
        for (std::size_t j = 0; j < width; ++j) {
            const double lo = bounds.lower[k][static_cast<Eigen::Index>(j)];
            const double hi = bounds.upper[k][static_cast<Eigen::Index>(j)];
            const NeuronStatus s = bounds.status[k][j];
            if (!(lo <= hi) || (s == NeuronStatus::AlwaysOff && hi > 0.0) ||
                (s == NeuronStatus::AlwaysOn && lo < 0.0))
                throw InvalidArgument(fmt::format("encode_mlp: inconsistent bounds for neuron {}:{}", k + 1, j));
        }
    }
}

}  // namespace

MlpEncoding encode_mlp(MilpProblem& problem, const MlpModel& model, const NeuronBounds& bounds,
                       const std::vector<LinearExpr>& inputs, const std::string& prefix,
                       const EncodingOptions& options) {
    model.validate();
    if (inputs.size() != model.input_size())
        throw InvalidArgument(fmt::format("encode_mlp: {} inputs for a model with {} features", inputs.size(),
                                          model.input_size()));
    if (options.tighten) check_bounds(model, bounds);
    const MlpModel folded = model.with_normalization_folded();

    MlpEncoding enc;
    std::vector<LinearExpr> h = inputs;
    auto affine = [&](std::size_t k, Eigen::Index j) {
        LinearExpr z(folded.biases[k][j]);
        for (Eigen::Index i = 0; i < folded.weights[k].cols(); ++i) {
            const double w = folded.weights[k](j, i);
            if (w != 0.0) z.add(h[static_cast<std::size_t>(i)], w);
        }
        return std::move(z.normalize());
    };

    for (std::size_t k = 0; k < folded.hidden_layers(); ++k) {
        std::vector<LinearExpr> next;
        for (Eigen::Index j = 0; j < folded.weights[k].rows(); ++j) {
            LinearExpr z = affine(k, j);
            const auto ju = static_cast<std::size_t>(j);
            NeuronStatus status = NeuronStatus::Undecided;
            double upper = options.global_m, lower_mag = options.global_m;
            if (options.tighten) {
                status = bounds.status[k][ju];
                upper = options.safety_factor * std::max(0.0, bounds.upper[k][j]);
                lower_mag = options.safety_factor * std::max(0.0, -bounds.lower[k][j]);
            }
            if (status == NeuronStatus::AlwaysOff) {
                ++enc.always_off;
                next.emplace_back();
                continue;
            }
            if (status == NeuronStatus::AlwaysOn) {
                ++enc.always_on;
                next.push_back(std::move(z));
                continue;
            }
            ++enc.undecided;
            const std::string tag = fmt::format("{}{}_{}", prefix, k + 1, j + 1);
            const VarId hv = problem.add_continuous("h" + tag, 0.0, upper);
            const VarId rv = problem.add_continuous("r" + tag, 0.0, lower_mag);
            const VarId mu = problem.add_binary("mu" + tag);
            problem.add_constraint("relu" + tag, LinearExpr(hv).add(rv, -1.0) - z, Sense::Equal, 0.0);
            problem.add_constraint("act" + tag, LinearExpr(hv).add(mu, -upper), Sense::LessEqual, 0.0);
            problem.add_constraint("inact" + tag, LinearExpr(rv).add(mu, lower_mag), Sense::LessEqual, lower_mag);
            enc.binaries.push_back(mu);
            enc.binary_neurons.emplace_back(k, ju);
            next.emplace_back(hv);
        }
        h = std::move(next);
    }

    const std::size_t last = folded.weights.size() - 1;
    VarId outs[2];
    for (Eigen::Index j = 0; j < 2; ++j) {
        double lo = -kInf, hi = kInf;
        if (options.tighten) {
            const double span = bounds.output_upper[j] - bounds.output_lower[j];
            const double pad = (options.safety_factor - 1.0) * span + 1e-6 * (1.0 + std::abs(bounds.output_upper[j]) +
                                                                             std::abs(bounds.output_lower[j]));
            lo = bounds.output_lower[j] - pad;
            hi = bounds.output_upper[j] + pad;
        }
        const std::string name = fmt::format("y{}{}", prefix, j + 1);
        outs[j] = problem.add_continuous(name, lo, hi);
        problem.add_constraint("out" + name, LinearExpr(outs[j]) - affine(last, j), Sense::Equal, 0.0);
    }
    enc.y1 = outs[0];
    enc.y2 = outs[1];
    return enc;
}

MlpEncoding encode_mlp(MilpProblem& problem, const MlpModel& model, const NeuronBounds& bounds,
                       const std::vector<VarId>& inputs, const std::string& prefix, const EncodingOptions& options) {
    std::vector<LinearExpr> exprs;
    exprs.reserve(inputs.size());
    for (VarId v : inputs) exprs.emplace_back(v);
    return encode_mlp(problem, model, bounds, exprs, prefix, options);
}

}  // namespace secd
