#include "secd/p2_builder.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "secd/lp_simplex.hpp"
#include "secd/neuron_bounds.hpp"

namespace secd {

const char* to_string(DispatchMode mode) {
    switch (mode) {
        case DispatchMode::P2: return "p2";
        case DispatchMode::Benchmark1: return "benchmark1";
        case DispatchMode::NoFlex: return "noflex";
    }
    return "unknown";
}

DispatchMode parse_dispatch_mode(const std::string& text) {
    if (text == "p2") return DispatchMode::P2;
    if (text == "benchmark1") return DispatchMode::Benchmark1;
    if (text == "noflex") return DispatchMode::NoFlex;
    throw InvalidArgument(fmt::format("unknown dispatch mode '{}' (expected p2, benchmark1 or noflex)", text));
}

std::vector<LinearExpr> operation_expressions(const Scenario& s, const P2Layout& layout, std::size_t t) {
    const std::size_t n = s.bus_count();
    std::vector<LinearExpr> x(3 * n);
    for (std::size_t b = 0; b < n; ++b) {
        x[b] = LinearExpr(s.active[t][b]);
        x[n + b] = LinearExpr(s.reactive[t][b]);
    }
    for (std::size_t k = 0; k < s.zones.size(); ++k) x[s.zones[k]].add(layout.cooling[t][k], 1.0 / s.thermal.cop);
    for (std::size_t k = 0; k < s.pv_buses.size(); ++k) x[2 * n + s.pv_buses[k]] = LinearExpr(layout.pv[t][k]);
    return x;
}

P2Instance build_p2(const Scenario& s, const MlpModel* mlp, const LrModel& lr, const P2Options& options) {
    s.validate();
    const std::size_t T = s.horizon, n = s.bus_count();
    const bool with_mlp = options.mode != DispatchMode::Benchmark1;
    if (with_mlp && mlp == nullptr) throw InvalidArgument("build_p2: the classifier is required for this mode");
    if (with_mlp && mlp->input_size() != 3 * n)
        throw InvalidArgument(fmt::format("build_p2: classifier expects {} features, scenario has {}", mlp->input_size(), 3 * n));
    if (static_cast<std::size_t>(lr.weights.size()) != 3 * n)
        throw InvalidArgument(fmt::format("build_p2: loss model expects {} features, scenario has {}", lr.weights.size(), 3 * n));

    const ThermalCoefficients coef = discretize(s.thermal);
    P2Instance inst;
    MilpProblem& p = inst.problem;
    P2Layout& L = inst.layout;
    const double theta_lo = options.mode == DispatchMode::NoFlex ? s.comfort.theta_max : s.comfort.theta_min;

    LinearExpr cost;
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<VarId> qc, th, pv;
        for (std::size_t b : s.zones) {
            double cap = s.cooling_max[b];
            if (with_mlp && options.clip_to_training_domain) {
                const auto i = static_cast<Eigen::Index>(b);
                const double trained_max = mlp->input_offset[i] + 1.0 / mlp->input_scale[i];
                cap = std::clamp(s.thermal.cop * (trained_max - s.active[t][b]), 0.0, cap);
            }
            qc.push_back(p.add_continuous(fmt::format("qc_{}_{}", t, s.bus_ids[b]), 0.0, cap));
            th.push_back(p.add_continuous(fmt::format("theta_{}_{}", t, s.bus_ids[b]), theta_lo, s.comfort.theta_max));
        }
        for (std::size_t b : s.pv_buses)
            pv.push_back(p.add_continuous(fmt::format("pv_{}_{}", t, s.bus_ids[b]), 0.0, s.pv_available[t][b]));
        L.cooling.push_back(std::move(qc));
        L.theta.push_back(std::move(th));
        L.pv.push_back(std::move(pv));
        L.buy.push_back(p.add_continuous(fmt::format("buy_{}", t), 0.0, kInf));
        L.sell.push_back(p.add_continuous(fmt::format("sell_{}", t), 0.0, kInf));
        L.loss.push_back(p.add_continuous(fmt::format("loss_{}", t), -kInf, kInf));
        const double energy = 1000.0 * s.thermal.dt;  // MW per slot -> kWh
        cost.add(L.buy[t], energy * s.price_buy).add(L.sell[t], -energy * s.price_sell);
    }

    for (std::size_t t = 0; t < T; ++t) {
        // theta_t - alpha theta_{t-1} + beta qc_t = beta q_h + gamma theta_out
        for (std::size_t k = 0; k < s.zones.size(); ++k) {
            const std::size_t b = s.zones[k];
            LinearExpr e(L.theta[t][k]);
            double rhs = coef.beta * s.heat_load[t][b] + coef.gamma * s.ambient[t];
            if (t == 0)
                rhs += coef.alpha * s.theta_initial;
            else
                e.add(L.theta[t - 1][k], -coef.alpha);
            e.add(L.cooling[t][k], coef.beta);
            p.add_constraint(fmt::format("thermal_{}_{}", t, s.bus_ids[b]), std::move(e), Sense::Equal, rhs);
        }

        const std::vector<LinearExpr> x = operation_expressions(s, L, t);
        LinearExpr predicted(lr.bias);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (lr.weights[static_cast<Eigen::Index>(i)] != 0.0) predicted.add(x[i], lr.weights[static_cast<Eigen::Index>(i)]);
        p.add_constraint(fmt::format("lossfit_{}", t), LinearExpr(L.loss[t]) - predicted, Sense::Equal, 0.0);

        // buy - sell = sum P + loss - sum PV
        LinearExpr bal(L.buy[t]);
        bal.add(L.sell[t], -1.0).add(L.loss[t], -1.0);
        double demand = 0.0;
        for (std::size_t b = 0; b < n; ++b) demand += s.active[t][b];
        for (std::size_t k = 0; k < s.zones.size(); ++k) bal.add(L.cooling[t][k], -1.0 / s.thermal.cop);
        for (std::size_t k = 0; k < s.pv_buses.size(); ++k) bal.add(L.pv[t][k], 1.0);
        p.add_constraint(fmt::format("balance_{}", t), std::move(bal), Sense::Equal, demand);

        if (!with_mlp) continue;
        Eigen::VectorXd lo(3 * n), hi(3 * n);
        for (std::size_t b = 0; b < n; ++b) {
            lo[static_cast<Eigen::Index>(b)] = hi[static_cast<Eigen::Index>(b)] = s.active[t][b];
        }
        for (std::size_t k = 0; k < s.zones.size(); ++k)
            hi[static_cast<Eigen::Index>(s.zones[k])] += p.variable(L.cooling[t][k]).upper / s.thermal.cop;
        for (std::size_t b = 0; b < n; ++b) {
            lo[static_cast<Eigen::Index>(n + b)] = hi[static_cast<Eigen::Index>(n + b)] = s.reactive[t][b];
            lo[static_cast<Eigen::Index>(2 * n + b)] = 0.0;
            hi[static_cast<Eigen::Index>(2 * n + b)] = s.pv_available[t][b];
        }
        const NeuronBounds nb = propagate_bounds(*mlp, lo, hi);
        L.neurons_per_slot = nb.neuron_count();
        L.encodings.push_back(encode_mlp(p, *mlp, nb, x, fmt::format("_{}_", t), options.encoding));
        L.box_lower.push_back(std::move(lo));
        L.box_upper.push_back(std::move(hi));
    }
    if (with_mlp && options.soft_safety_penalty > 0.0)
        for (std::size_t t = 0; t < T; ++t) {
            L.safety_slack.push_back(p.add_continuous(fmt::format("vsafe_{}", t), 0.0, kInf));
            cost.add(L.safety_slack[t], options.soft_safety_penalty);
        }
    for (std::size_t t = 0; t < L.encodings.size(); ++t) {
        LinearExpr e = LinearExpr(L.encodings[t].y1).add(L.encodings[t].y2, -1.0);
        if (!L.safety_slack.empty()) e.add(L.safety_slack[t], -1.0);
        L.safety_rows.push_back(p.add_constraint(fmt::format("safe_{}", t), std::move(e), Sense::LessEqual,
                                                 -options.safety_margin));
    }
    p.set_objective(std::move(cost));
    return inst;
}

std::vector<double> activation_pattern(const Scenario& s, const MlpModel& mlp, const P2Instance& inst,
                                       const std::vector<double>& values) {
    std::vector<double> out = values;
    const P2Layout& L = inst.layout;
    for (std::size_t t = 0; t < L.encodings.size(); ++t) {
        const std::vector<LinearExpr> x = operation_expressions(s, L, t);
        Eigen::VectorXd features(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) features[static_cast<Eigen::Index>(i)] = x[i].evaluate(values);
        const ForwardTrace trace = forward(mlp, features);
        const MlpEncoding& enc = L.encodings[t];
        for (std::size_t i = 0; i < enc.binaries.size(); ++i) {
            const auto [k, j] = enc.binary_neurons[i];
            out[enc.binaries[i].index] = trace.pre_activations[k][static_cast<Eigen::Index>(j)] > 0.0 ? 1.0 : 0.0;
        }
    }
    return out;
}

struct PatternSearch::State {
    const Scenario& scenario;
    const MlpModel& mlp;
    P2Instance soft;
    BoundedSimplex lp;
    std::size_t hard_count;
    std::size_t max_rounds;
};

PatternSearch::PatternSearch(const Scenario& scenario, const MlpModel& mlp, const LrModel& lr,
                             const P2Options& options, std::size_t max_rounds) {
    P2Options soft_options = options;
    soft_options.soft_safety_penalty = options.soft_safety_penalty > 0.0 ? options.soft_safety_penalty : 1e4;
    P2Instance soft = build_p2(scenario, &mlp, lr, soft_options);
    const std::size_t hard_count = soft.problem.variable_count() - soft.layout.safety_slack.size();
    BoundedSimplex lp(soft.problem);
    state_ = std::make_unique<State>(State{scenario, mlp, std::move(soft), std::move(lp), hard_count, max_rounds});
}

PatternSearch::~PatternSearch() = default;

std::vector<double> PatternSearch::operator()(const std::vector<double>& relaxation) {
    State& st = *state_;
    const P2Layout& L = st.soft.layout;
    constexpr double kBoundary = 1e-7;
    std::vector<double> point = relaxation;
    point.resize(st.soft.problem.variable_count(), 0.0);
    point = activation_pattern(st.scenario, st.mlp, st.soft, point);
    for (std::size_t round = 0; round < st.max_rounds; ++round) {
        for (const MlpEncoding& enc : L.encodings)
            for (VarId b : enc.binaries) st.lp.set_bounds(b.index, point[b.index], point[b.index]);
        if (st.lp.solve() != LpStatus::Optimal) break;
        std::vector<double> next = st.lp.primal();
        double violation = 0.0;
        for (VarId v : L.safety_slack) violation += next[v.index];
        if (violation <= 1e-9) {
            point = std::move(next);
            break;
        }
        bool changed = false;
        for (std::size_t t = 0; t < L.encodings.size(); ++t) {
            const std::vector<LinearExpr> x = operation_expressions(st.scenario, L, t);
            Eigen::VectorXd features(static_cast<Eigen::Index>(x.size()));
            for (std::size_t i = 0; i < x.size(); ++i) features[static_cast<Eigen::Index>(i)] = x[i].evaluate(next);
            const ForwardTrace trace = forward(st.mlp, features);
            const MlpEncoding& enc = L.encodings[t];
            for (std::size_t i = 0; i < enc.binaries.size(); ++i) {
                const auto [k, j] = enc.binary_neurons[i];
                const double z = trace.pre_activations[k][static_cast<Eigen::Index>(j)];
                const double old = point[enc.binaries[i].index];
                const double bit = z > kBoundary ? 1.0 : (z < -kBoundary ? 0.0 : 1.0 - old);
                next[enc.binaries[i].index] = bit;
                changed = changed || bit != old;
            }
        }
        point = std::move(next);
        if (!changed) break;
    }
    point.resize(st.hard_count);
    return point;
}

}  // namespace secd
