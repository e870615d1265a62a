#pragma once

#include <complex>
#include <string>
#include <vector>

#include "secd/network.hpp"

namespace secd {

/// Net bus demand seen by the oracle: active load minus used PV, and
/// reactive load. Indexed by bus position; the slack entry is ignored.
struct InjectionProfile {
    std::vector<double> active;    // MW
    std::vector<double> reactive;  // MVAr

    static InjectionProfile zeros(std::size_t bus_count) {
        return {std::vector<double>(bus_count, 0.0), std::vector<double>(bus_count, 0.0)};
    }
    static InjectionProfile nominal(const Network& network, double scale = 1.0);
};

struct PowerFlowOptions {
    double tolerance = 1e-8;  // max bus power mismatch, p.u.
    int max_iterations = 100;
};

struct PowerFlowSolution {
    std::vector<double> voltage;         // p.u.
    std::vector<double> angle;           // rad
    std::vector<double> branch_current;  // kA, same order as Network::branches()
    double total_loss = 0.0;             // MW
    double slack_active = 0.0;           // MW delivered by the slack bus
    double slack_reactive = 0.0;         // MVAr
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // final max bus power mismatch, p.u.
};

struct SecurityLimits {
    double v_min = 0.9;   // p.u.
    double v_max = 1.1;   // p.u.
    double i_max = 0.249; // kA; applied together with each branch's own limit

    void validate() const;
};

struct Violation {
    enum class Kind { UnderVoltage, OverVoltage, OverCurrent };
    Kind kind;
    int element;       // bus id for voltages, branch index for currents
    double magnitude;  // p.u. for voltages, kA for currents
};

struct SecurityReport {
    bool safe = true;
    double max_voltage_violation = 0.0;  // p.u.
    double max_current_violation = 0.0;  // kA
    std::vector<Violation> violating_elements;
};

/// Backward/forward sweep AC power flow for a radial feeder with
/// constant-power loads and the slack held at 1.0 p.u.
///
/// Throws InvalidArgument on dimension mismatch or a non-positive
/// tolerance. Non-convergence is reported through `converged`.
PowerFlowSolution solve_power_flow(const Network& network, const InjectionProfile& injections,
                                   const PowerFlowOptions& options = {});

/// Per-element limit violations. Throws InvalidArgument if the solution
/// did not converge.
SecurityReport evaluate_security(const Network& network, const PowerFlowSolution& solution,
                                 const SecurityLimits& limits);

/// Conservation check: slack injection minus (load - PV + loss), in p.u.
double conservation_residual(const Network& network, const InjectionProfile& injections,
                             const PowerFlowSolution& solution);

std::string solution_to_json(const Network& network, const PowerFlowSolution& solution);

}  // namespace secd
