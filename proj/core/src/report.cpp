#include "secd/report.hpp"

#include <cmath>
#include <set>

#include <fmt/core.h>

#include "csv.hpp"
#include "json.hpp"

namespace secd {

using nlohmann::json;

std::string ReportRun::label() const { return fmt::format("{}_{}", result.scenario, to_string(result.mode)); }

namespace {

std::string num(double v) { return format_double(v); }

json json_number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::size_t longest_horizon(const std::vector<ReportRun>& runs) {
    std::size_t T = 0;
    for (const ReportRun& r : runs) T = std::max(T, r.result.horizon());
    return T;
}

}  // namespace

std::string hourly_costs_csv(const std::vector<ReportRun>& runs) {
    std::vector<std::string> header{"slot"};
    for (const ReportRun& r : runs)
        if (r.result.has_schedule()) header.push_back(r.label());
    std::string out = join(header, ",") + "\n";
    for (std::size_t t = 0; t < longest_horizon(runs); ++t) {
        std::vector<std::string> row{std::to_string(t)};
        for (const ReportRun& r : runs)
            if (r.result.has_schedule()) row.push_back(t < r.result.horizon() ? num(r.result.energy_cost[t]) : "");
        out += join(row, ",") + "\n";
    }
    return out;
}

std::string violations_csv(const std::vector<ReportRun>& runs) {
    std::string out =
        "run,slot,converged,voltage_violation_pu,voltage_violation_v,current_violation_ka,current_violation_a,"
        "v_min,v_max,i_max_ka,true_loss_mw,predicted_loss_mw,elements\n";
    for (const ReportRun& r : runs) {
        if (!r.validation) continue;
        for (std::size_t t = 0; t < r.validation->slots.size(); ++t) {
            const SlotValidation& s = r.validation->slots[t];
            out += join({r.label(), std::to_string(t), s.converged ? "1" : "0", num(s.voltage_violation_pu),
                         num(s.voltage_violation_v), num(s.current_violation_ka), num(s.current_violation_a),
                         num(s.v_min), num(s.v_max), num(s.i_max), num(s.true_loss), num(s.predicted_loss),
                         join(s.elements, ";")},
                        ",") +
                   "\n";
        }
    }
    return out;
}

std::string temperatures_csv(const std::vector<ReportRun>& runs) {
    std::string out = "run,slot,bus,theta_c,cooling_mw\n";
    for (const ReportRun& r : runs)
        for (std::size_t t = 0; t < r.result.horizon(); ++t)
            for (std::size_t k = 0; k < r.result.zone_buses.size(); ++k)
                out += join({r.label(), std::to_string(t), std::to_string(r.result.zone_buses[k]),
                             num(r.result.theta[t][k]), num(r.result.cooling[t][k])},
                            ",") +
                       "\n";
    return out;
}

std::string pv_curtailment_csv(const std::vector<ReportRun>& runs) {
    std::string out = "run,slot,available_mw,used_mw,curtailed_mw\n";
    for (const ReportRun& r : runs)
        for (std::size_t t = 0; t < r.result.horizon(); ++t) {
            double available = 0.0, used = 0.0;
            for (std::size_t k = 0; k < r.result.pv_buses.size(); ++k) {
                available += r.result.pv_available[t][k];
                used += r.result.pv_used[t][k];
            }
            out += join({r.label(), std::to_string(t), num(available), num(used), num(available - used)}, ",") + "\n";
        }
    return out;
}

std::string summary_json(const std::vector<ReportRun>& runs) {
    json list = json::array();
    for (const ReportRun& run : runs) {
        const DispatchResult& r = run.result;
        json e;
        e["run"] = run.label();
        e["scenario"] = r.scenario;
        e["mode"] = to_string(r.mode);
        e["status"] = to_string(r.status);
        e["has_schedule"] = r.has_schedule();
        e["total_cost"] = json_number(r.has_schedule() ? r.total_cost : kInf);
        e["curtailment_mwh"] = r.curtailment;
        e["solver"] = {{"objective", json_number(r.objective)}, {"best_bound", json_number(r.best_bound)},
                       {"root_bound", json_number(r.root_bound)}, {"gap", json_number(r.gap)},
                       {"nodes", r.nodes}, {"binaries", r.binaries}};
        if (run.validation) {
            const ValidationSeries& v = *run.validation;
            e["validation"] = {{"violation_hours", v.violation_hours()},
                               {"nonconverged", v.nonconverged()},
                               {"max_voltage_violation_pu", v.max_voltage_violation()},
                               {"max_current_violation_ka", v.max_current_violation()},
                               {"max_comfort_violation_c", v.max_comfort_violation()},
                               {"loss_residual_ratio", json_number(v.loss_residual_ratio())}};
        }
        e["warnings"] = r.warnings;
        e["diagnosis"] = r.diagnosis;
        list.push_back(std::move(e));
    }
    return json{{"runs", std::move(list)}}.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_report(const std::vector<ReportRun>& runs, const std::filesystem::path& out_dir) {
    if (runs.empty()) throw InvalidArgument("report: no results to report");
    std::set<std::string> labels;
    for (const ReportRun& r : runs) {
        if (!labels.insert(r.label()).second) throw InvalidArgument("report: duplicate run " + r.label());
        if (r.validation && r.validation->slots.size() != r.result.horizon())
            throw InvalidArgument("report: validation of " + r.label() + " does not match its schedule");
    }
    const std::vector<std::pair<std::string, std::string>> files{
        {"hourly_costs.csv", hourly_costs_csv(runs)},
        {"violations.csv", violations_csv(runs)},
        {"temperatures.csv", temperatures_csv(runs)},
        {"pv_curtailment.csv", pv_curtailment_csv(runs)},
        {"summary.json", summary_json(runs)},
    };
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("report: cannot create " + out_dir.string());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, text] : files) {
        written.push_back(out_dir / name);
        write_text_file(written.back(), text);
    }
    return written;
}

}  // namespace secd
