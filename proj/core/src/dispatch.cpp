#include "secd/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/core.h>

#include "csv.hpp"
#include "json.hpp"

namespace secd {

using nlohmann::json;

namespace {

constexpr double kComplementarityTolerance = 1e-9;

double value_of(const std::vector<double>& values, VarId v) { return values[v.index]; }

SolveOptions with_heuristic(const Scenario& s, const MlpModel* mlp, const LrModel& lr, const P2Options& p2,
                            SolveOptions so, bool enabled) {
    if (!enabled || mlp == nullptr || p2.mode == DispatchMode::Benchmark1 || so.heuristic) return so;
    auto search = std::make_shared<PatternSearch>(s, *mlp, lr, p2);
    so.heuristic = [search](const std::vector<double>& x) { return (*search)(x); };
    return so;
}

void unpack(const Scenario& s, const P2Instance& inst, const std::vector<double>& x, DispatchResult& r) {
    const P2Layout& L = inst.layout;
    const double energy = 1000.0 * s.thermal.dt;
    r.total_cost = 0.0;
    r.curtailment = 0.0;
    for (std::size_t t = 0; t < s.horizon; ++t) {
        std::vector<double> qc, th, pv, av;
        for (std::size_t k = 0; k < s.zones.size(); ++k) {
            qc.push_back(value_of(x, L.cooling[t][k]));
            th.push_back(value_of(x, L.theta[t][k]));
        }
        for (std::size_t k = 0; k < s.pv_buses.size(); ++k) {
            pv.push_back(value_of(x, L.pv[t][k]));
            av.push_back(s.pv_available[t][s.pv_buses[k]]);
            r.curtailment += (av.back() - pv.back()) * s.thermal.dt;
        }
        r.cooling.push_back(std::move(qc));
        r.theta.push_back(std::move(th));
        r.pv_used.push_back(std::move(pv));
        r.pv_available.push_back(std::move(av));
        const double buy = value_of(x, L.buy[t]);
        const double sell = value_of(x, L.sell[t]);
        r.buy.push_back(buy);
        r.sell.push_back(sell);
        r.predicted_loss.push_back(value_of(x, L.loss[t]));
        r.energy_cost.push_back(energy * (s.price_buy * buy - s.price_sell * sell));
        r.total_cost += r.energy_cost.back();
        if (buy * sell > kComplementarityTolerance) {
            if (s.price_buy > s.price_sell && s.price_sell > 0.0)
                r.warnings.push_back(fmt::format("slot {}: buy {:.6g} MW and sell {:.6g} MW are both positive", t, buy, sell));
            else
                r.warnings.push_back(fmt::format("slot {}: simultaneous buy and sell allowed by the price pair", t));
        }
    }
}

// Names the safety rows that appear in the root infeasibility proof.
void diagnose_certificate(const P2Instance& inst, const std::vector<double>& certificate, DispatchResult& r) {
    if (certificate.empty()) {
        r.diagnosis.push_back("infeasibility was proven in the search tree; no root certificate");
        return;
    }
    std::vector<std::size_t> slots;
    const auto& rows = inst.layout.safety_rows;
    for (std::size_t t = 0; t < rows.size(); ++t)
        if (std::abs(certificate[rows[t]]) > 1e-9) slots.push_back(t);
    std::size_t others = 0;
    for (std::size_t i = 0; i < certificate.size(); ++i)
        if (std::abs(certificate[i]) > 1e-9 && std::find(rows.begin(), rows.end(), i) == rows.end()) ++others;
    if (slots.empty()) {
        r.diagnosis.push_back(fmt::format("root proof uses no safety row ({} other rows)", others));
        return;
    }
    std::string list;
    for (std::size_t t : slots) list += (list.empty() ? "" : ",") + std::to_string(t);
    r.diagnosis.push_back(fmt::format("root proof binds the safety rows of slots {} ({} other rows)", list, others));
}

void triage(const Scenario& s, const MlpModel* mlp, const LrModel& lr, const DispatchOptions& options,
            DispatchResult& r) {
    SolveOptions so = options.solver;
    so.node_limit = options.triage_node_limit;
    so.log_every = 0;

    P2Instance relaxed = build_p2(s, mlp, lr, options.p2);
    for (const auto& slot : relaxed.layout.theta)
        for (VarId v : slot) relaxed.problem.set_bounds(v, -kInf, kInf);
    const MilpSolution comfort = solve(relaxed.problem, with_heuristic(s, mlp, lr, options.p2, so, options.pattern_heuristic));
    if (comfort.has_incumbent()) {
        r.diagnosis.push_back("triage: feasible once the comfort band is removed");
        return;
    }
    r.diagnosis.push_back(fmt::format("triage: removing the comfort band does not help ({})", to_string(comfort.status)));

    if (options.p2.mode == DispatchMode::Benchmark1) return;
    P2Options soft_options = options.p2;
    soft_options.soft_safety_penalty = 1e4;
    P2Instance soft = build_p2(s, mlp, lr, soft_options);
    const MilpSolution sol = solve(soft.problem, with_heuristic(s, mlp, lr, options.p2, so, options.pattern_heuristic));
    if (!sol.has_incumbent()) {
        r.diagnosis.push_back(fmt::format("triage: relaxing every safety row does not help ({})", to_string(sol.status)));
        return;
    }
    bool any = false;
    for (std::size_t t = 0; t < soft.layout.safety_slack.size(); ++t) {
        const double v = value_of(sol.values, soft.layout.safety_slack[t]);
        if (v > 1e-7) {
            any = true;
            r.diagnosis.push_back(fmt::format("triage: slot {} needs its safety row relaxed by {:.6g}", t, v));
        }
    }
    if (!any) r.diagnosis.push_back("triage: the soft formulation needs no relaxation within the node budget");
}

}  // namespace

DispatchResult run_dispatch(const Scenario& s, const MlpModel* mlp, const LrModel& lr, const DispatchOptions& options) {
    const P2Instance inst = build_p2(s, mlp, lr, options.p2);
    const SolveOptions so = with_heuristic(s, mlp, lr, options.p2, options.solver, options.pattern_heuristic);
    const MilpSolution sol = solve(inst.problem, so);

    DispatchResult r;
    r.scenario = s.name;
    r.mode = options.p2.mode;
    r.status = sol.status;
    for (std::size_t b : s.zones) r.zone_buses.push_back(s.bus_ids[b]);
    for (std::size_t b : s.pv_buses) r.pv_buses.push_back(s.bus_ids[b]);
    r.objective = sol.objective;
    r.best_bound = sol.best_bound;
    r.root_bound = sol.root_bound;
    r.gap = sol.gap;
    r.nodes = sol.nodes;
    r.lp_iterations = sol.lp_iterations;
    r.binaries = inst.problem.binary_count();
    r.seconds = sol.seconds;

    if (sol.has_incumbent()) {
        unpack(s, inst, sol.values, r);
    } else if (sol.status == MilpStatus::Infeasible) {
        diagnose_certificate(inst, sol.infeasibility_certificate, r);
        if (options.triage) triage(s, mlp, lr, options, r);
    }
    return r;
}

DispatchResult run_p2(const Scenario& s, const MlpModel& mlp, const LrModel& lr, DispatchOptions options) {
    options.p2.mode = DispatchMode::P2;
    return run_dispatch(s, &mlp, lr, options);
}

DispatchResult run_benchmark1(const Scenario& s, const LrModel& lr, DispatchOptions options) {
    options.p2.mode = DispatchMode::Benchmark1;
    return run_dispatch(s, nullptr, lr, options);
}

DispatchResult run_no_flexibility(const Scenario& s, const MlpModel& mlp, const LrModel& lr, DispatchOptions options) {
    options.p2.mode = DispatchMode::NoFlex;
    return run_dispatch(s, &mlp, lr, options);
}

OperationVector operation_vector(const DispatchResult& r, const Scenario& s, std::size_t t) {
    OperationVector x = OperationVector::zeros(s.bus_count());
    x.active = s.active.at(t);
    x.reactive = s.reactive.at(t);
    for (std::size_t k = 0; k < s.zones.size(); ++k) x.active[s.zones[k]] += r.cooling.at(t).at(k) / s.thermal.cop;
    for (std::size_t k = 0; k < s.pv_buses.size(); ++k) x.pv[s.pv_buses[k]] = r.pv_used.at(t).at(k);
    return x;
}

ValidationSeries validate(const DispatchResult& r, const Network& network, const Scenario& s,
                          const SecurityLimits& limits) {
    if (!r.has_schedule()) throw InvalidArgument(fmt::format("validate: result '{}' has no schedule", r.scenario));
    if (r.horizon() != s.horizon) throw InvalidArgument("validate: horizon differs from the scenario");
    if (network.bus_count() != s.bus_count()) throw InvalidArgument("validate: network does not match the scenario");
    if (r.zone_buses.size() != s.zones.size() || r.pv_buses.size() != s.pv_buses.size())
        throw InvalidArgument("validate: zone or PV layout differs from the scenario");
    for (std::size_t k = 0; k < s.zones.size(); ++k)
        if (r.zone_buses[k] != s.bus_ids[s.zones[k]]) throw InvalidArgument("validate: zone buses differ");
    for (std::size_t k = 0; k < s.pv_buses.size(); ++k)
        if (r.pv_buses[k] != s.bus_ids[s.pv_buses[k]]) throw InvalidArgument("validate: PV buses differ");
    for (std::size_t t = 0; t < s.horizon; ++t)
        if (r.cooling[t].size() != s.zones.size() || r.pv_used[t].size() != s.pv_buses.size() ||
            r.predicted_loss.size() != s.horizon)
            throw InvalidArgument(fmt::format("validate: slot {} is incomplete", t));

    ValidationSeries v;
    v.scenario = r.scenario;
    v.mode = r.mode;
    v.slots.resize(s.horizon);

    const ThermalCoefficients coef = discretize(s.thermal);
    for (std::size_t k = 0; k < s.zones.size(); ++k) {
        std::vector<double> heat(s.horizon), cooling(s.horizon);
        for (std::size_t t = 0; t < s.horizon; ++t) {
            heat[t] = s.heat_load[t][s.zones[k]];
            cooling[t] = r.cooling[t][k];
        }
        const std::vector<double> theta = simulate(s.theta_initial, heat, cooling, s.ambient, coef);
        for (std::size_t t = 0; t < s.horizon; ++t) {
            const double out = std::max({0.0, s.comfort.theta_min - theta[t], theta[t] - s.comfort.theta_max});
            v.slots[t].comfort_violation = std::max(v.slots[t].comfort_violation, out);
        }
    }

    const double volts_per_pu = network.base_kv() * 1000.0;
    for (std::size_t t = 0; t < s.horizon; ++t) {
        SlotValidation& slot = v.slots[t];
        slot.predicted_loss = r.predicted_loss[t];
        const InjectionProfile inj = operation_vector(r, s, t).injections();
        const PowerFlowSolution pf = solve_power_flow(network, inj);
        slot.converged = pf.converged;
        if (!pf.converged) {
            slot.elements.push_back("nonconvergent");
            continue;
        }
        const SecurityReport rep = evaluate_security(network, pf, limits);
        slot.voltage_violation_pu = rep.max_voltage_violation;
        slot.voltage_violation_v = rep.max_voltage_violation * volts_per_pu;
        slot.current_violation_ka = rep.max_current_violation;
        slot.current_violation_a = rep.max_current_violation * 1000.0;
        slot.v_min = *std::min_element(pf.voltage.begin(), pf.voltage.end());
        slot.v_max = *std::max_element(pf.voltage.begin(), pf.voltage.end());
        slot.i_max = pf.branch_current.empty() ? 0.0 : *std::max_element(pf.branch_current.begin(), pf.branch_current.end());
        slot.true_loss = pf.total_loss;
        slot.conservation_residual = conservation_residual(network, inj, pf);
        for (const Violation& e : rep.violating_elements) {
            if (e.kind == Violation::Kind::OverCurrent) {
                const Branch& br = network.branches().at(static_cast<std::size_t>(e.element));
                slot.elements.push_back(fmt::format("line:{}-{}", br.from_bus, br.to_bus));
            } else {
                slot.elements.push_back(fmt::format("bus:{}", e.element));
            }
        }
    }
    return v;
}

std::size_t ValidationSeries::violation_hours() const {
    return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const SlotValidation& s) { return s.violated(); }));
}

std::size_t ValidationSeries::nonconverged() const {
    return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const SlotValidation& s) { return !s.converged; }));
}

double ValidationSeries::max_voltage_violation() const {
    double m = 0.0;
    for (const SlotValidation& s : slots) m = std::max(m, s.voltage_violation_pu);
    return m;
}

double ValidationSeries::max_current_violation() const {
    double m = 0.0;
    for (const SlotValidation& s : slots) m = std::max(m, s.current_violation_ka);
    return m;
}

double ValidationSeries::max_comfort_violation() const {
    double m = 0.0;
    for (const SlotValidation& s : slots) m = std::max(m, s.comfort_violation);
    return m;
}

double ValidationSeries::loss_residual_ratio() const {
    double residual = 0.0, total = 0.0;
    for (const SlotValidation& s : slots) {
        if (!s.converged) continue;
        residual += std::abs(s.true_loss - s.predicted_loss);
        total += s.true_loss;
    }
    return total > 0.0 ? residual / total : (residual > 0.0 ? kInf : 0.0);
}

bool ValidationSeries::exceeds(double voltage_tolerance_pu, double current_tolerance_ka) const {
    for (const SlotValidation& s : slots)
        if (!s.converged || s.voltage_violation_pu > voltage_tolerance_pu || s.current_violation_ka > current_tolerance_ka)
            return true;
    return false;
}

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::nan("");
    }
    throw ParseError("expected a number");
}

MilpStatus parse_status(const std::string& s) {
    for (MilpStatus st : {MilpStatus::Optimal, MilpStatus::Infeasible, MilpStatus::BudgetExceeded, MilpStatus::Unbounded})
        if (s == to_string(st)) return st;
    throw ParseError("unknown solver status '" + s + "'");
}

template <class F>
auto parse_guard(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("{}: {}", what, e.what()));
    } catch (const InvalidArgument& e) {
        throw ParseError(fmt::format("{}: {}", what, e.what()));
    }
}

}  // namespace

std::string result_to_json(const DispatchResult& r) {
    json j;
    j["scenario"] = r.scenario;
    j["mode"] = to_string(r.mode);
    j["status"] = to_string(r.status);
    j["zone_buses"] = r.zone_buses;
    j["pv_buses"] = r.pv_buses;
    j["cooling_mw"] = r.cooling;
    j["theta_c"] = r.theta;
    j["pv_used_mw"] = r.pv_used;
    j["pv_available_mw"] = r.pv_available;
    j["buy_mw"] = r.buy;
    j["sell_mw"] = r.sell;
    j["predicted_loss_mw"] = r.predicted_loss;
    j["energy_cost"] = r.energy_cost;
    j["total_cost"] = number(r.total_cost);
    j["curtailment_mwh"] = number(r.curtailment);
    j["solver"] = {{"objective", number(r.objective)},   {"best_bound", number(r.best_bound)},
                   {"root_bound", number(r.root_bound)}, {"gap", number(r.gap)},
                   {"nodes", r.nodes},                   {"lp_iterations", r.lp_iterations},
                   {"binaries", r.binaries},             {"seconds", r.seconds}};
    j["warnings"] = r.warnings;
    j["diagnosis"] = r.diagnosis;
    return j.dump(2) + "\n";
}

DispatchResult result_from_json(const std::string& text) {
    return parse_guard("dispatch result", [&] {
        const json j = json::parse(text);
        DispatchResult r;
        r.scenario = j.at("scenario").get<std::string>();
        r.mode = parse_dispatch_mode(j.at("mode").get<std::string>());
        r.status = parse_status(j.at("status").get<std::string>());
        r.zone_buses = j.at("zone_buses").get<std::vector<int>>();
        r.pv_buses = j.at("pv_buses").get<std::vector<int>>();
        r.cooling = j.at("cooling_mw").get<std::vector<std::vector<double>>>();
        r.theta = j.at("theta_c").get<std::vector<std::vector<double>>>();
        r.pv_used = j.at("pv_used_mw").get<std::vector<std::vector<double>>>();
        r.pv_available = j.at("pv_available_mw").get<std::vector<std::vector<double>>>();
        r.buy = j.at("buy_mw").get<std::vector<double>>();
        r.sell = j.at("sell_mw").get<std::vector<double>>();
        r.predicted_loss = j.at("predicted_loss_mw").get<std::vector<double>>();
        r.energy_cost = j.at("energy_cost").get<std::vector<double>>();
        r.total_cost = read_number(j.at("total_cost"));
        r.curtailment = read_number(j.at("curtailment_mwh"));
        const json& s = j.at("solver");
        r.objective = read_number(s.at("objective"));
        r.best_bound = read_number(s.at("best_bound"));
        r.root_bound = read_number(s.at("root_bound"));
        r.gap = read_number(s.at("gap"));
        r.nodes = s.at("nodes").get<std::size_t>();
        r.lp_iterations = s.at("lp_iterations").get<std::size_t>();
        r.binaries = s.at("binaries").get<std::size_t>();
        r.seconds = s.at("seconds").get<double>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        r.diagnosis = j.at("diagnosis").get<std::vector<std::string>>();
        const std::size_t T = r.cooling.size();
        if (r.theta.size() != T || r.pv_used.size() != T || r.pv_available.size() != T || r.buy.size() != T ||
            r.sell.size() != T || r.predicted_loss.size() != T || r.energy_cost.size() != T)
            throw ParseError("dispatch result: series lengths differ");
        return r;
    });
}

void save_result(const DispatchResult& r, const std::filesystem::path& path) { write_text_file(path, result_to_json(r)); }

DispatchResult load_result(const std::filesystem::path& path) { return result_from_json(read_text_file(path)); }

std::string validation_to_json(const ValidationSeries& v) {
    json slots = json::array();
    for (const SlotValidation& s : v.slots)
        slots.push_back({{"converged", s.converged},
                         {"voltage_violation_pu", s.voltage_violation_pu},
                         {"voltage_violation_v", s.voltage_violation_v},
                         {"current_violation_ka", s.current_violation_ka},
                         {"current_violation_a", s.current_violation_a},
                         {"v_min", s.v_min},
                         {"v_max", s.v_max},
                         {"i_max_ka", s.i_max},
                         {"true_loss_mw", s.true_loss},
                         {"predicted_loss_mw", s.predicted_loss},
                         {"conservation_residual", s.conservation_residual},
                         {"comfort_violation_c", s.comfort_violation},
                         {"elements", s.elements}});
    json j;
    j["scenario"] = v.scenario;
    j["mode"] = to_string(v.mode);
    j["slots"] = std::move(slots);
    return j.dump(2) + "\n";
}

ValidationSeries validation_from_json(const std::string& text) {
    return parse_guard("validation series", [&] {
        const json j = json::parse(text);
        ValidationSeries v;
        v.scenario = j.at("scenario").get<std::string>();
        v.mode = parse_dispatch_mode(j.at("mode").get<std::string>());
        for (const json& e : j.at("slots")) {
            SlotValidation s;
            s.converged = e.at("converged").get<bool>();
            s.voltage_violation_pu = e.at("voltage_violation_pu").get<double>();
            s.voltage_violation_v = e.at("voltage_violation_v").get<double>();
            s.current_violation_ka = e.at("current_violation_ka").get<double>();
            s.current_violation_a = e.at("current_violation_a").get<double>();
            s.v_min = e.at("v_min").get<double>();
            s.v_max = e.at("v_max").get<double>();
            s.i_max = e.at("i_max_ka").get<double>();
            s.true_loss = e.at("true_loss_mw").get<double>();
            s.predicted_loss = e.at("predicted_loss_mw").get<double>();
            s.conservation_residual = e.at("conservation_residual").get<double>();
            s.comfort_violation = e.at("comfort_violation_c").get<double>();
            s.elements = e.at("elements").get<std::vector<std::string>>();
            v.slots.push_back(std::move(s));
        }
        return v;
    });
}

void save_validation(const ValidationSeries& v, const std::filesystem::path& path) {
    write_text_file(path, validation_to_json(v));
}

ValidationSeries load_validation(const std::filesystem::path& path) { return validation_from_json(read_text_file(path)); }

}  // namespace secd
