#include "secd/neuron_bounds.hpp"

#include <algorithm>

#include <fmt/core.h>

namespace secd {

std::size_t NeuronBounds::count(NeuronStatus s) const {
    std::size_t c = 0;
    for (const auto& layer : status) c += static_cast<std::size_t>(std::count(layer.begin(), layer.end(), s));
    return c;
}

std::size_t NeuronBounds::neuron_count() const {
    std::size_t c = 0;
    for (const auto& layer : status) c += layer.size();
    return c;
}

NeuronStatus classify(double lower, double upper) {
    if (upper <= 0.0) return NeuronStatus::AlwaysOff;
    if (lower >= 0.0) return NeuronStatus::AlwaysOn;
    return NeuronStatus::Undecided;
}

namespace {

void affine_bounds(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                   const Eigen::VectorXd& hi, Eigen::VectorXd& zlo, Eigen::VectorXd& zhi) {
    const Eigen::MatrixXd pos = w.cwiseMax(0.0), neg = w.cwiseMin(0.0);
    zlo = pos * lo + neg * hi + b;
    zhi = pos * hi + neg * lo + b;
}

}  // namespace

NeuronBounds propagate_bounds(const MlpModel& model, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    model.validate();
    const auto n = static_cast<Eigen::Index>(model.input_size());
    if (lower.size() != n || upper.size() != n)
        throw InvalidArgument(fmt::format("propagate_bounds: box has {} entries, model expects {}", lower.size(), n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
            throw InvalidArgument(fmt::format("propagate_bounds: invalid box [{}, {}] at feature {}", lower[i], upper[i], i));

    const Eigen::VectorXd a = (lower - model.input_offset).cwiseProduct(model.input_scale);
    const Eigen::VectorXd c = (upper - model.input_offset).cwiseProduct(model.input_scale);
    Eigen::VectorXd hlo = a.cwiseMin(c), hhi = a.cwiseMax(c);

    NeuronBounds nb;
    for (std::size_t k = 0; k + 1 < model.weights.size(); ++k) {
        Eigen::VectorXd zlo, zhi;
        affine_bounds(model.weights[k], model.biases[k], hlo, hhi, zlo, zhi);
        std::vector<NeuronStatus> st(static_cast<std::size_t>(zlo.size()));
        for (Eigen::Index j = 0; j < zlo.size(); ++j) st[static_cast<std::size_t>(j)] = classify(zlo[j], zhi[j]);
        hlo = zlo.cwiseMax(0.0);
        hhi = zhi.cwiseMax(0.0);
        nb.lower.push_back(std::move(zlo));
        nb.upper.push_back(std::move(zhi));
        nb.status.push_back(std::move(st));
    }
    Eigen::VectorXd ylo, yhi;
    affine_bounds(model.weights.back(), model.biases.back(), hlo, hhi, ylo, yhi);
    nb.output_lower = ylo;
    nb.output_upper = yhi;
    return nb;
}

}  // namespace secd
