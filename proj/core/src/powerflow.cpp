#include "secd/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "json.hpp"

namespace secd {

using cplx = std::complex<double>;

InjectionProfile InjectionProfile::nominal(const Network& network, double scale) {
    InjectionProfile p = zeros(network.bus_count());
    for (std::size_t i = 0; i < network.bus_count(); ++i) {
        p.active[i] = scale * network.buses()[i].base_active_load;
        p.reactive[i] = scale * network.buses()[i].base_reactive_load;
    }
    return p;
}

void SecurityLimits::validate() const {
    if (!(v_min > 0.0 && v_min < v_max))
        throw InvalidArgument("security limits need 0 < v_min < v_max");
    if (!(i_max > 0.0)) throw InvalidArgument("security limits need i_max > 0");
}

PowerFlowSolution solve_power_flow(const Network& network, const InjectionProfile& injections,
                                   const PowerFlowOptions& options) {
    const std::size_t n = network.bus_count();
    if (injections.active.size() != n || injections.reactive.size() != n)
        throw InvalidArgument(fmt::format("injection profile has {}/{} entries, network has {} buses",
                                          injections.active.size(), injections.reactive.size(), n));
    if (!(options.tolerance > 0.0)) throw InvalidArgument("power flow tolerance must be positive");

    const double zbase = network.base_impedance();
    const double sbase = network.base_mva();
    const auto& order = network.dfs_order();
    const auto& feeder = network.feeding_branch();
    const std::size_t slack = network.slack_index();

    std::vector<cplx> load(n), z(network.branch_count());
    for (std::size_t i = 0; i < n; ++i)
        if (i != slack) load[i] = cplx(injections.active[i], injections.reactive[i]) / sbase;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const Branch& br = network.branches()[k];
        z[k] = cplx(br.resistance, br.reactance) / zbase;
    }

    std::vector<cplx> v(n, cplx(1.0, 0.0)), next(n), injected(n), current(network.branch_count());
    PowerFlowSolution sol;
    double mismatch = 0.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        sol.iterations = it;
        for (std::size_t i = 0; i < n; ++i) injected[i] = std::conj(load[i] / v[i]);

        // Backward sweep: accumulate branch currents from the leaves.
        std::vector<cplx> subtree = injected;
        for (auto it_bus = order.rbegin(); it_bus != order.rend(); ++it_bus) {
            std::size_t b = *it_bus;
            if (b == slack) continue;
            std::size_t k = feeder[b];
            current[k] = subtree[b];
            subtree[network.branch_parent(k)] += subtree[b];
        }
        // Forward sweep from the root.
        next[slack] = cplx(1.0, 0.0);
        for (std::size_t b : order) {
            if (b == slack) continue;
            std::size_t k = feeder[b];
            next[b] = next[network.branch_parent(k)] - z[k] * current[k];
        }

        // Stop on the summed mismatch: it bounds the max bus mismatch and
        // also the power-conservation residual at the slack.
        mismatch = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == slack) continue;
            double m = std::abs(next[i] * std::conj(injected[i]) - load[i]);
            mismatch = std::max(mismatch, m);
            total += m;
        }
        v.swap(next);
        if (!std::isfinite(total)) break;
        if (total <= options.tolerance) {
            sol.converged = true;
            break;
        }
    }
    sol.residual = mismatch;

    sol.voltage.resize(n);
    sol.angle.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.voltage[i] = std::abs(v[i]);
        sol.angle[i] = std::arg(v[i]);
    }
    sol.branch_current.resize(current.size());
    const double ibase = network.base_current_ka();
    double loss = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
        sol.branch_current[k] = std::abs(current[k]) * ibase;
        loss += z[k].real() * std::norm(current[k]);
    }
    sol.total_loss = loss * sbase;

    cplx slack_out(0.0, 0.0);
    for (std::size_t k = 0; k < current.size(); ++k)
        if (network.branch_parent(k) == slack) slack_out += current[k];
    cplx s_slack = v[slack] * std::conj(slack_out);
    sol.slack_active = s_slack.real() * sbase;
    sol.slack_reactive = s_slack.imag() * sbase;
    return sol;
}

SecurityReport evaluate_security(const Network& network, const PowerFlowSolution& solution,
                                 const SecurityLimits& limits) {
    limits.validate();
    if (!solution.converged)
        throw InvalidArgument("security evaluation needs a converged power flow solution");
    SecurityReport rep;
    for (std::size_t i = 0; i < solution.voltage.size(); ++i) {
        double v = solution.voltage[i];
        int id = network.buses()[i].id;
        if (v < limits.v_min) {
            double m = limits.v_min - v;
            rep.violating_elements.push_back({Violation::Kind::UnderVoltage, id, m});
            rep.max_voltage_violation = std::max(rep.max_voltage_violation, m);
        } else if (v > limits.v_max) {
            double m = v - limits.v_max;
            rep.violating_elements.push_back({Violation::Kind::OverVoltage, id, m});
            rep.max_voltage_violation = std::max(rep.max_voltage_violation, m);
        }
    }
    for (std::size_t k = 0; k < solution.branch_current.size(); ++k) {
        double limit = std::min(limits.i_max, network.branches()[k].current_limit);
        double excess = solution.branch_current[k] - limit;
        if (excess > 0.0) {
            rep.violating_elements.push_back({Violation::Kind::OverCurrent, static_cast<int>(k), excess});
            rep.max_current_violation = std::max(rep.max_current_violation, excess);
        }
    }
    rep.safe = rep.max_voltage_violation == 0.0 && rep.max_current_violation == 0.0;
    return rep;
}

double conservation_residual(const Network& network, const InjectionProfile& injections,
                             const PowerFlowSolution& solution) {
    double demand = 0.0;
    for (std::size_t i = 0; i < network.bus_count(); ++i)
        if (i != network.slack_index()) demand += injections.active[i];
    return (solution.slack_active - demand - solution.total_loss) / network.base_mva();
}

std::string solution_to_json(const Network& network, const PowerFlowSolution& solution) {
    nlohmann::json doc;
    std::vector<int> ids;
    for (const Bus& b : network.buses()) ids.push_back(b.id);
    doc["bus_ids"] = ids;
    doc["voltage_pu"] = solution.voltage;
    doc["angle_rad"] = solution.angle;
    doc["branch_current_ka"] = solution.branch_current;
    doc["total_loss_mw"] = solution.total_loss;
    doc["slack_mw"] = solution.slack_active;
    doc["slack_mvar"] = solution.slack_reactive;
    doc["converged"] = solution.converged;
    doc["iterations"] = solution.iterations;
    doc["residual_pu"] = solution.residual;
    return doc.dump(2);
}

}  // namespace secd
