#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "secd/report.hpp"

using namespace secd;
namespace fs = std::filesystem;

namespace {

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

// Two-slot, two-zone, one-PV schedule with round numbers.
ReportRun mini_run(DispatchMode mode, bool with_validation) {
    DispatchResult r;
    r.scenario = "mini";
    r.mode = mode;
    r.status = MilpStatus::Optimal;
    r.zone_buses = {2, 3};
    r.pv_buses = {3};
    r.cooling = {{0.5, 0.25}, {0.75, 0.125}};
    r.theta = {{27.5, 26.0}, {28.0, 24.5}};
    r.pv_used = {{0.5}, {0.25}};
    r.pv_available = {{0.5}, {1.0}};
    r.buy = {1.5, 0.0};
    r.sell = {0.0, 0.25};
    r.predicted_loss = {0.0625, 0.03125};
    r.energy_cost = {168.3, -14.0};
    r.total_cost = 154.3;
    r.curtailment = 0.75;
    r.objective = 154.3;
    r.best_bound = 154.3;
    r.root_bound = 150.0;
    r.gap = 0.0;
    r.nodes = 3;
    r.binaries = 8;
    ReportRun run{r, std::nullopt};
    if (with_validation) {
        ValidationSeries v;
        v.scenario = "mini";
        v.mode = mode;
        SlotValidation ok;
        ok.converged = true;
        ok.v_min = 0.95;
        ok.v_max = 1.0;
        ok.i_max = 0.125;
        ok.true_loss = 0.0625;
        ok.predicted_loss = 0.0625;
        SlotValidation bad = ok;
        bad.v_min = 0.875;
        bad.voltage_violation_pu = 0.025;
        bad.voltage_violation_v = 316.5;
        bad.true_loss = 0.0375;
        bad.predicted_loss = 0.03125;
        bad.elements = {"bus:3", "bus:2"};
        v.slots = {ok, bad};
        run.validation = v;
    }
    return run;
}

std::vector<ReportRun> mini_runs() {
    ReportRun infeasible = mini_run(DispatchMode::NoFlex, false);
    DispatchResult& r = infeasible.result;
    r.status = MilpStatus::Infeasible;
    r.cooling.clear();
    r.theta.clear();
    r.pv_used.clear();
    r.pv_available.clear();
    r.buy.clear();
    r.sell.clear();
    r.predicted_loss.clear();
    r.energy_cost.clear();
    r.total_cost = 0.0;
    r.curtailment = 0.0;
    r.objective = kInf;
    r.best_bound = kInf;
    r.gap = kInf;
    r.diagnosis = {"root proof binds the safety rows of slots 1"};
    return {mini_run(DispatchMode::P2, true), mini_run(DispatchMode::Benchmark1, false), infeasible};
}

}  // namespace

TEST_CASE("column contract") {
    const std::vector<ReportRun> runs = mini_runs();
    const auto costs = lines(hourly_costs_csv(runs));
    REQUIRE(costs.size() == 3u);
    CHECK(costs[0] == "slot,mini_p2,mini_benchmark1");
    CHECK(costs[1] == "0,168.3,168.3");
    CHECK(lines(violations_csv(runs))[0] ==
          "run,slot,converged,voltage_violation_pu,voltage_violation_v,current_violation_ka,current_violation_a,"
          "v_min,v_max,i_max_ka,true_loss_mw,predicted_loss_mw,elements");
    CHECK(lines(violations_csv(runs)).size() == 3u);
    CHECK(lines(temperatures_csv(runs))[0] == "run,slot,bus,theta_c,cooling_mw");
    CHECK(lines(temperatures_csv(runs)).size() == 1u + 2u * 2u * 2u);
    const auto pv = lines(pv_curtailment_csv(runs));
    CHECK(pv[0] == "run,slot,available_mw,used_mw,curtailed_mw");
    CHECK(pv[2] == "mini_p2,1,1,0.25,0.75");
}

TEST_CASE("the mini report matches the golden snapshot") {
    const fs::path out = fs::path(SECD_TEST_TMP) / "report";
    fs::remove_all(out);
    const std::vector<fs::path> files = write_report(mini_runs(), out);
    CHECK(files.size() == 5u);
    const fs::path golden = fs::path(SECD_SOURCE_DIR) / "tests/golden/report";
    for (const fs::path& f : files) {
        INFO(f.filename().string());
        CHECK(read(f) == read(golden / f.filename()));
    }
    // Writing again gives the same bytes.
    const std::vector<fs::path> again = write_report(mini_runs(), out);
    for (const fs::path& f : again) CHECK(read(f) == read(golden / f.filename()));
}

TEST_CASE("bad input writes nothing") {
    const fs::path out = fs::path(SECD_TEST_TMP) / "empty";
    fs::remove_all(out);
    CHECK_THROWS_AS(write_report({}, out), InvalidArgument);
    CHECK_FALSE(fs::exists(out));
    std::vector<ReportRun> dup{mini_run(DispatchMode::P2, false), mini_run(DispatchMode::P2, false)};
    CHECK_THROWS_AS(write_report(dup, out), InvalidArgument);
    ReportRun mismatch = mini_run(DispatchMode::P2, true);
    mismatch.validation->slots.pop_back();
    CHECK_THROWS_AS(write_report({mismatch}, out), InvalidArgument);
    CHECK_FALSE(fs::exists(out));
}
