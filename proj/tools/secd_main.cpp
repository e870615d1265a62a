// secd: command line front end of the security-constrained dispatch pipeline.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "secd/branch_and_bound.hpp"
#include "secd/config.hpp"
#include "secd/dispatch.hpp"
#include "secd/mps.hpp"
#include "secd/pipeline.hpp"
#include "secd/report.hpp"

namespace fs = std::filesystem;
using namespace secd;

namespace {

enum Exit { kOk = 0, kError = 1, kInfeasible = 2, kBudget = 3, kViolations = 4 };

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    PipelineConfig load() const {
        PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (seed) c.seed = *seed;
        if (!out_dir.empty()) c.output_dir = out_dir;
        c.validate();
        fs::create_directories(c.output_dir);
        return c;
    }
};

void add_common(CLI::App* app, Common& common) {
    app->add_option("-c,--config", common.config_path, "JSON pipeline config")->check(CLI::ExistingFile);
    app->add_option("--seed", common.seed, "Overrides the config seed");
    app->add_option("-o,--out-dir", common.out_dir, "Overrides the config output_dir");
}

fs::path out_file(const PipelineConfig& c, const std::string& name) { return fs::path(c.output_dir) / name; }

std::string run_label(const std::string& scenario, const std::string& mode) { return scenario + "_" + mode; }

int dispatch_exit(const DispatchResult& r, const PipelineConfig& c) {
    switch (r.status) {
        case MilpStatus::Optimal: return kOk;
        case MilpStatus::Infeasible:
        case MilpStatus::Unbounded: return kInfeasible;
        case MilpStatus::BudgetExceeded:
            return r.has_schedule() && r.gap <= c.dispatch.acceptable_gap ? kOk : kBudget;
    }
    return kError;
}

int cmd_generate(const Common& common) {
    const PipelineConfig c = common.load();
    const Network network = resolve_network(c.network);
    const Dataset data = generate_dataset(network, c);
    const fs::path path = out_file(c, "dataset.csv");
    save_dataset(data, path);
    fmt::print("dataset {} samples ({} unsafe) from {} draws -> {}\n", data.size(), data.count(SecurityLabel::Unsafe),
               data.metadata.draws, path.string());
    return kOk;
}

int cmd_train(const Common& common, const std::string& data_path) {
    const PipelineConfig c = common.load();
    const Dataset data = load_dataset(data_path.empty() ? out_file(c, "dataset.csv") : fs::path(data_path));
    const TrainedModels m = train_models(data, c);
    save_mlp(m.mlp, out_file(c, "mlp.json"));
    save_lr(m.lr, out_file(c, "lr.json"));
    std::ofstream(out_file(c, "train_report.json")) << train_report_json(m);
    fmt::print("held-out accuracy {:.4f} false-safe rate {:.4f} ({} train, {} test)\n", m.report.accuracy,
               m.report.false_safe_rate, m.train_size, m.test_size);
    return kOk;
}

struct ModelPaths {
    std::string mlp;
    std::string lr;
};

int cmd_dispatch(const Common& common, const std::string& mode_text, const std::string& scenario_name,
                 const ModelPaths& paths) {
    const PipelineConfig c = common.load();
    const DispatchMode mode = parse_dispatch_mode(mode_text);
    const Network network = resolve_network(c.network);
    const Scenario s = reference_scenario(network, c.scenario, scenario_name);
    const LrModel lr = load_lr(paths.lr.empty() ? out_file(c, "lr.json") : fs::path(paths.lr));
    std::optional<MlpModel> mlp;
    if (mode != DispatchMode::Benchmark1) mlp = load_mlp(paths.mlp.empty() ? out_file(c, "mlp.json") : fs::path(paths.mlp));
    const DispatchResult r = run_dispatch(s, mlp ? &*mlp : nullptr, lr, c.dispatch.options(mode));
    const fs::path path = out_file(c, run_label(scenario_name, mode_text) + ".result.json");
    save_result(r, path);
    fmt::print("{} {}: status {} cost {:.4f} root {:.4f} gap {:.4g} nodes {} binaries {}\n", scenario_name, mode_text,
               to_string(r.status), r.total_cost, r.root_bound, r.gap, r.nodes, r.binaries);
    for (const std::string& w : r.warnings) fmt::print(stderr, "warning: {}\n", w);
    for (const std::string& d : r.diagnosis) fmt::print(stderr, "diagnosis: {}\n", d);
    return dispatch_exit(r, c);
}

int cmd_validate(const Common& common, std::string result_path, const std::string& scenario, const std::string& mode) {
    const PipelineConfig c = common.load();
    if (result_path.empty()) result_path = out_file(c, run_label(scenario, mode) + ".result.json").string();
    const DispatchResult r = load_result(result_path);
    if (!r.has_schedule()) {
        fmt::print(stderr, "{}: no schedule to validate (status {})\n", result_path, to_string(r.status));
        return kInfeasible;
    }
    const Network network = resolve_network(c.network);
    const Scenario s = reference_scenario(network, c.scenario, r.scenario);
    const ValidationSeries v = validate(r, network, s, c.limits);
    const fs::path path = out_file(c, run_label(r.scenario, to_string(r.mode)) + ".validation.json");
    save_validation(v, path);
    fmt::print("{} {}: violation hours {} max voltage {:.6g} p.u. max current {:.6g} kA loss residual {:.4f}\n",
               r.scenario, to_string(r.mode), v.violation_hours(), v.max_voltage_violation(),
               v.max_current_violation(), v.loss_residual_ratio());
    return v.exceeds(c.validation.voltage_tolerance_pu, c.validation.current_tolerance_ka) ? kViolations : kOk;
}

int cmd_report(const Common& common, std::vector<std::string> result_paths, std::string report_dir) {
    const PipelineConfig c = common.load();
    if (result_paths.empty()) {
        for (const auto& e : fs::directory_iterator(c.output_dir)) {
            const std::string name = e.path().filename().string();
            if (name.size() > 12 && name.ends_with(".result.json")) result_paths.push_back(e.path().string());
        }
        std::sort(result_paths.begin(), result_paths.end());
    }
    std::vector<ReportRun> runs;
    for (const std::string& p : result_paths) {
        ReportRun run{load_result(p), std::nullopt};
        const fs::path v = fs::path(p).parent_path() / (run.label() + ".validation.json");
        if (fs::exists(v)) run.validation = load_validation(v);
        runs.push_back(std::move(run));
    }
    if (report_dir.empty()) report_dir = out_file(c, "report").string();
    for (const fs::path& f : write_report(runs, report_dir)) fmt::print("wrote {}\n", f.string());
    return kOk;
}

int cmd_export(const Common& common, const std::string& mode_text, const std::string& scenario_name,
               const ModelPaths& paths, std::string path) {
    const PipelineConfig c = common.load();
    const DispatchMode mode = parse_dispatch_mode(mode_text);
    const Network network = resolve_network(c.network);
    const Scenario s = reference_scenario(network, c.scenario, scenario_name);
    const LrModel lr = load_lr(paths.lr.empty() ? out_file(c, "lr.json") : fs::path(paths.lr));
    std::optional<MlpModel> mlp;
    if (mode != DispatchMode::Benchmark1) mlp = load_mlp(paths.mlp.empty() ? out_file(c, "mlp.json") : fs::path(paths.mlp));
    const P2Instance inst = build_p2(s, mlp ? &*mlp : nullptr, lr, c.dispatch.options(mode).p2);
    if (path.empty()) path = out_file(c, run_label(scenario_name, mode_text) + ".mps").string();
    export_mps(inst.problem, path, "SECD");
    fmt::print("{} columns ({} binary), {} rows -> {}\n", inst.problem.variable_count(), inst.problem.binary_count(),
               inst.problem.constraint_count(), path);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security-constrained dispatch of building cooling loads with a learned feeder classifier"};
    app.require_subcommand(1);
    Common common;
    ModelPaths models;
    std::string mode = "p2", scenario = "heavy", data_path, result_path, report_dir, mps_path;
    std::vector<std::string> results;
    const std::vector<std::string> modes{"p2", "benchmark1", "noflex"};
    const std::vector<std::string> scenarios{"heavy", "light"};

    CLI::App* gen = app.add_subcommand("generate-data", "Sample and label operating points");
    add_common(gen, common);

    CLI::App* train = app.add_subcommand("train", "Train the classifier and the loss model");
    add_common(train, common);
    train->add_option("--data", data_path, "Dataset CSV (default <out>/dataset.csv)");

    CLI::App* disp = app.add_subcommand("dispatch", "Solve one dispatch variant");
    add_common(disp, common);
    disp->add_option("--mode", mode, "p2, benchmark1 or noflex")->check(CLI::IsMember(modes));
    disp->add_option("--scenario", scenario, "heavy or light")->check(CLI::IsMember(scenarios));
    disp->add_option("--mlp", models.mlp, "Classifier JSON (default <out>/mlp.json)");
    disp->add_option("--lr", models.lr, "Loss model JSON (default <out>/lr.json)");

    CLI::App* val = app.add_subcommand("validate", "Check a schedule against the power-flow oracle");
    add_common(val, common);
    val->add_option("--result", result_path, "Result JSON (default <out>/<scenario>_<mode>.result.json)");
    val->add_option("--mode", mode, "p2, benchmark1 or noflex")->check(CLI::IsMember(modes));
    val->add_option("--scenario", scenario, "heavy or light")->check(CLI::IsMember(scenarios));

    CLI::App* rep = app.add_subcommand("report", "Write comparison CSVs and a summary");
    add_common(rep, common);
    rep->add_option("results", results, "Result JSON files (default every *.result.json in <out>)");
    rep->add_option("--report-dir", report_dir, "Output directory (default <out>/report)");

    CLI::App* mps = app.add_subcommand("export-mps", "Write the dispatch MILP in MPS format");
    add_common(mps, common);
    mps->add_option("--mode", mode, "p2, benchmark1 or noflex")->check(CLI::IsMember(modes));
    mps->add_option("--scenario", scenario, "heavy or light")->check(CLI::IsMember(scenarios));
    mps->add_option("--mlp", models.mlp, "Classifier JSON (default <out>/mlp.json)");
    mps->add_option("--lr", models.lr, "Loss model JSON (default <out>/lr.json)");
    mps->add_option("--out", mps_path, "MPS path (default <out>/<scenario>_<mode>.mps)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(common);
        if (train->parsed()) return cmd_train(common, data_path);
        if (disp->parsed()) return cmd_dispatch(common, mode, scenario, models);
        if (val->parsed()) return cmd_validate(common, result_path, scenario, mode);
        if (rep->parsed()) return cmd_report(common, results, report_dir);
        if (mps->parsed()) return cmd_export(common, mode, scenario, models, mps_path);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kError;
    }
    return kError;
}
