#pragma once

#include <vector>

#include "secd/network.hpp"
#include "secd/p2_builder.hpp"
#include "secd/scenario.hpp"
#include "secd/surrogate.hpp"

namespace secd::testing {

/// Three-bus radial feeder 1 - 2 - 3 with PV at bus 3.
inline Network tiny_network() {
    return Network({{1, 0.0, 0.0, false}, {2, 0.4, 0.2, false}, {3, 0.3, 0.1, true}},
                   {{1, 2, 0.5, 0.3, 0.4}, {2, 3, 0.6, 0.4, 0.4}}, 1, 12.66, 10.0);
}

inline ScenarioConfig tiny_config(std::size_t horizon) {
    ScenarioConfig c;
    c.horizon = horizon;
    c.load_profile.assign(horizon, 1.0);
    c.pv_sunrise = 0.0;
    c.pv_sunset = static_cast<double>(horizon);
    c.pv_capacity = 0.5;
    c.heat_gain = 0.2;
    return c;
}

/// Network whose last layer ignores its input: y = (0, safe_logit).
inline MlpModel always_safe_mlp(std::size_t inputs, double safe_logit = 10.0, double trained_max = 100.0) {
    MlpModel m = MlpModel::random({static_cast<int>(inputs), 8, 8, 2}, 1);
    m.weights.back().setZero();
    m.biases.back() << 0.0, safe_logit;
    m.input_offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inputs));
    m.input_scale = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(inputs), 1.0 / trained_max);
    return m;
}

/// Unsafe logit 10 * relu(P_bus - limit) on one bus index, safe logit 1.
inline MlpModel threshold_mlp(std::size_t inputs, std::size_t bus, double limit) {
    const auto n = static_cast<Eigen::Index>(inputs);
    MlpModel m;
    m.weights = {Eigen::MatrixXd::Zero(2, n), Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    // Inputs are scaled by 0.01 before the first layer.
    m.weights[0](0, static_cast<Eigen::Index>(bus)) = 100.0;
    m.weights[2](0, 0) = 10.0;
    m.biases = {Eigen::Vector2d(-limit, 0.0), Eigen::Vector2d::Zero(), Eigen::Vector2d(0.0, 1.0)};
    m.input_offset = Eigen::VectorXd::Zero(n);
    m.input_scale = Eigen::VectorXd::Constant(n, 0.01);
    return m;
}

inline LrModel constant_lr(std::size_t inputs, double loss) {
    return LrModel{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inputs)), loss};
}

}  // namespace secd::testing
