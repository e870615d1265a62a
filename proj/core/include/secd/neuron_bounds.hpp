#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "secd/surrogate.hpp"

namespace secd {

enum class NeuronStatus { AlwaysOn, AlwaysOff, Undecided };

/// Pre-activation bounds of every hidden neuron over an input box.
/// A neuron with upper <= 0 is always-off (this wins when both bounds
/// are zero); one with lower >= 0 is always-on.
struct NeuronBounds {
    std::vector<Eigen::VectorXd> lower;  // per hidden layer
    std::vector<Eigen::VectorXd> upper;
    std::vector<std::vector<NeuronStatus>> status;
    Eigen::Vector2d output_lower = Eigen::Vector2d::Zero();
    Eigen::Vector2d output_upper = Eigen::Vector2d::Zero();

    std::size_t count(NeuronStatus s) const;
    std::size_t neuron_count() const;
};

NeuronStatus classify(double lower, double upper);

/// Interval arithmetic through the network (normalization included).
/// Throws InvalidArgument on a non-finite or empty box or a malformed model.
NeuronBounds propagate_bounds(const MlpModel& model, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace secd
