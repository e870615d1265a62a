#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lp_oracle.hpp"
#include "secd/branch_and_bound.hpp"

using namespace secd;
using namespace secd::testing;

namespace {

MilpProblem knapsack() {
    const double value[10] = {10, 13, 7, 8, 15, 4, 9, 11, 6, 12};
    const double weight[10] = {5, 7, 3, 4, 8, 2, 5, 6, 3, 7};
    MilpProblem p;
    LinearExpr cap, obj;
    for (int i = 0; i < 10; ++i) {
        const VarId b = p.add_binary("b" + std::to_string(i));
        cap.add(b, weight[i]);
        obj.add(b, -value[i]);
    }
    p.add_constraint("cap", cap, Sense::LessEqual, 20.0);
    p.set_objective(obj);
    return p;
}

double knapsack_brute_force() {
    const double value[10] = {10, 13, 7, 8, 15, 4, 9, 11, 6, 12};
    const double weight[10] = {5, 7, 3, 4, 8, 2, 5, 6, 3, 7};
    double best = 0.0;
    for (int mask = 0; mask < 1024; ++mask) {
        double v = 0, w = 0;
        for (int i = 0; i < 10; ++i)
            if (mask >> i & 1) v += value[i], w += weight[i];
        if (w <= 20.0) best = std::max(best, v);
    }
    return -best;
}

}  // namespace

TEST_CASE("knapsack optimum matches brute force") {
    const MilpSolution s = solve(knapsack());
    REQUIRE(s.status == MilpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(knapsack_brute_force()));
    CHECK(s.gap <= 1e-6);
    CHECK(s.root_bound <= s.objective + 1e-9);
    CHECK(knapsack().integrality_violation(s.values) <= 1e-6);
}

TEST_CASE("random mixed problems match enumeration") {
    SplitMix64 rng(101);
    int solved = 0, infeasible = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t bins = 2 + static_cast<std::size_t>(rng.next() % 9);
        const std::size_t conts = 1 + static_cast<std::size_t>(rng.next() % 2);
        const MilpProblem p = random_problem(rng, bins + conts, 2 + static_cast<std::size_t>(rng.next() % 2), bins);
        const std::optional<double> oracle = enumerate_binaries(p);
        const MilpSolution s = solve(p);
        if (!oracle) {
            CHECK(s.status == MilpStatus::Infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE(s.status == MilpStatus::Optimal);
        CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-6));
        CHECK(p.max_violation(s.values) <= 1e-6);
        CHECK(p.integrality_violation(s.values) <= 1e-6);
        ++solved;
    }
    CHECK(solved >= 20);
    MESSAGE(solved << " optimal, " << infeasible << " infeasible");
}

TEST_CASE("progress is monotone and bounds stay valid under a node budget") {
    SplitMix64 rng(7);
    for (int k = 0; k < 30; ++k) {
        const MilpProblem p = random_problem(rng, 12, 3, 10);
        const std::optional<double> oracle = enumerate_binaries(p);
        if (!oracle) continue;
        const MilpSolution full = solve(p);
        REQUIRE(full.status == MilpStatus::Optimal);
        for (std::size_t prev = 0; prev < full.progress.size(); ++prev) {
            if (prev == 0) continue;
            CHECK(full.progress[prev].incumbent <= full.progress[prev - 1].incumbent);
            CHECK(full.progress[prev].bound >= full.progress[prev - 1].bound);
        }
        for (std::size_t limit : {1u, 2u, 3u, 5u}) {
            SolveOptions o;
            o.node_limit = limit;
            const MilpSolution s = solve(p, o);
            CHECK(s.nodes <= limit);
            // The reported bound never passes the true optimum.
            CHECK(s.best_bound <= *oracle + 1e-7);
            if (s.status == MilpStatus::BudgetExceeded && s.has_incumbent()) CHECK(s.objective >= *oracle - 1e-7);
        }
    }
}

TEST_CASE("heuristic incumbents are verified and used") {
    const MilpProblem p = knapsack();
    SolveOptions o;
    int calls = 0;
    o.heuristic = [&](const std::vector<double>& x) {
        ++calls;
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::floor(x[i]);
        return r;
    };
    o.node_limit = 1;
    const MilpSolution s = solve(p, o);
    CHECK(calls >= 1);
    REQUIRE(s.has_incumbent());
    CHECK(p.max_violation(s.values) <= 1e-7);

    SolveOptions bad;
    bad.heuristic = [](const std::vector<double>& x) { return std::vector<double>(x.size(), 1.0); };
    const MilpSolution t = solve(p, bad);
    CHECK(t.objective == doctest::Approx(knapsack_brute_force()));
}

TEST_CASE("infeasible and degenerate problems") {
    MilpProblem p;
    const VarId a = p.add_binary("a"), b = p.add_binary("b");
    p.add_constraint("two", LinearExpr(a) + LinearExpr(b), Sense::GreaterEqual, 1.5);
    p.add_constraint("one", LinearExpr(a) + LinearExpr(b), Sense::LessEqual, 1.2);
    const MilpSolution s = solve(p);
    CHECK(s.status == MilpStatus::Infeasible);
    CHECK_FALSE(s.has_incumbent());
    CHECK_FALSE(s.infeasibility_certificate.empty());

    MilpProblem frac;
    const VarId c = frac.add_binary("c");
    frac.add_constraint("half", LinearExpr(c, 2.0), Sense::Equal, 1.0);
    const MilpSolution f = solve(frac);
    CHECK(f.status == MilpStatus::Infeasible);
    CHECK(f.nodes >= 1u);

    MilpProblem empty;
    const MilpSolution e = solve(empty);
    CHECK(e.status == MilpStatus::Optimal);
    CHECK(e.objective == 0.0);
}

TEST_CASE("solve is repeatable") {
    SplitMix64 rng(55);
    const MilpProblem p = random_problem(rng, 14, 4, 12);
    SolveOptions o;
    o.node_limit = 40;
    const MilpSolution a = solve(p, o), b = solve(p, o);
    CHECK(a.values == b.values);
    CHECK(a.nodes == b.nodes);
    CHECK(a.best_bound == b.best_bound);
}
