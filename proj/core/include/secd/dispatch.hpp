#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "secd/branch_and_bound.hpp"
#include "secd/p2_builder.hpp"
#include "secd/powerflow.hpp"
#include "secd/scenario.hpp"
#include "secd/surrogate.hpp"

namespace secd {

struct DispatchOptions {
    P2Options p2;  // p2.mode selects the variant
    SolveOptions solver;
    /// Installs PatternSearch as the primal heuristic in modes with the
    /// classifier.
    bool pattern_heuristic = true;
    /// On infeasibility, re-solves relaxed copies to name the cause.
    bool triage = true;
    std::size_t triage_node_limit = 50;
};

/// Physical schedule unpacked from a dispatch MILP solution. Series are
/// indexed [t][zone] and [t][pv bus]; empty when no incumbent was found.
struct DispatchResult {
    std::string scenario;
    DispatchMode mode = DispatchMode::P2;
    MilpStatus status = MilpStatus::Infeasible;
    std::vector<int> zone_buses;  // bus ids
    std::vector<int> pv_buses;    // bus ids
    std::vector<std::vector<double>> cooling;       // q_c, MW
    std::vector<std::vector<double>> theta;         // degC
    std::vector<std::vector<double>> pv_used;       // MW
    std::vector<std::vector<double>> pv_available;  // MW
    std::vector<double> buy, sell;                  // MW
    std::vector<double> predicted_loss;             // MW, loss model
    std::vector<double> energy_cost;                // $ per slot
    double total_cost = 0.0;                        // $
    double curtailment = 0.0;                       // MWh
    // Solver statistics.
    double objective = kInf;
    double best_bound = -kInf;
    double root_bound = -kInf;
    double gap = kInf;
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    std::size_t binaries = 0;
    double seconds = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> diagnosis;  // infeasibility triage

    bool has_schedule() const { return !cooling.empty(); }
    std::size_t horizon() const { return cooling.size(); }
};

struct SlotValidation {
    bool converged = false;
    double voltage_violation_pu = 0.0;
    double voltage_violation_v = 0.0;   // line-to-line volts
    double current_violation_ka = 0.0;
    double current_violation_a = 0.0;
    double v_min = 0.0;                 // p.u.
    double v_max = 0.0;
    double i_max = 0.0;                 // kA
    double true_loss = 0.0;             // MW, oracle
    double predicted_loss = 0.0;        // MW, loss model
    double conservation_residual = 0.0; // p.u.
    double comfort_violation = 0.0;     // degC, re-simulated zone temperatures outside the band
    std::vector<std::string> elements;  // "bus:<id>" or "line:<from>-<to>"

    bool violated() const { return !converged || voltage_violation_pu > 0.0 || current_violation_ka > 0.0; }
};

/// Oracle check of a schedule, one entry per slot.
struct ValidationSeries {
    std::string scenario;
    DispatchMode mode = DispatchMode::P2;
    std::vector<SlotValidation> slots;

    std::size_t violation_hours() const;
    std::size_t nonconverged() const;
    double max_voltage_violation() const;  // p.u.
    double max_current_violation() const;  // kA
    double max_comfort_violation() const;  // degC
    /// mean |true - predicted| loss over mean true loss.
    double loss_residual_ratio() const;
    /// True when some slot exceeds the tolerances or did not converge.
    bool exceeds(double voltage_tolerance_pu, double current_tolerance_ka) const;
};

/// Builds the variant selected by options.p2.mode, solves it and unpacks
/// the incumbent. `mlp` may be null for Benchmark1. Infeasible runs carry
/// a slot-level diagnosis and, with options.triage, the result of the
/// relaxed re-solves (never applied to the schedule).
DispatchResult run_dispatch(const Scenario& scenario, const MlpModel* mlp, const LrModel& lr,
                            const DispatchOptions& options);
DispatchResult run_p2(const Scenario& scenario, const MlpModel& mlp, const LrModel& lr, DispatchOptions options = {});
DispatchResult run_benchmark1(const Scenario& scenario, const LrModel& lr, DispatchOptions options = {});
DispatchResult run_no_flexibility(const Scenario& scenario, const MlpModel& mlp, const LrModel& lr,
                                  DispatchOptions options = {});

/// Operation vector of slot t implied by the schedule.
OperationVector operation_vector(const DispatchResult& result, const Scenario& scenario, std::size_t t);

/// Runs the oracle on every slot of the schedule. Non-convergent slots
/// are flagged, not thrown. Throws InvalidArgument when the result has no
/// schedule or does not match the scenario.
ValidationSeries validate(const DispatchResult& result, const Network& network, const Scenario& scenario,
                          const SecurityLimits& limits);

std::string result_to_json(const DispatchResult& result);
DispatchResult result_from_json(const std::string& text);
void save_result(const DispatchResult& result, const std::filesystem::path& path);
DispatchResult load_result(const std::filesystem::path& path);

std::string validation_to_json(const ValidationSeries& series);
ValidationSeries validation_from_json(const std::string& text);
void save_validation(const ValidationSeries& series, const std::filesystem::path& path);
ValidationSeries load_validation(const std::filesystem::path& path);

}  // namespace secd
