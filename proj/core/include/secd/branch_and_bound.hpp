#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "secd/milp_problem.hpp"

namespace secd {

enum class MilpStatus { Optimal, Infeasible, BudgetExceeded, Unbounded };

const char* to_string(MilpStatus status);

struct SolveOptions {
    double relative_gap = 1e-6;
    double absolute_gap = 1e-9;
    double integrality_tolerance = 1e-6;
    double feasibility_tolerance = 1e-7;
    std::size_t node_limit = 1'000'000;
    double time_limit_seconds = 600.0;
    std::size_t log_every = 200;  // nodes between periodic log lines; 0 disables them
    /// Optional primal heuristic: maps a fractional relaxation point to a
    /// point whose rounded binaries are pinned and polished by an LP.
    std::function<std::vector<double>(const std::vector<double>&)> heuristic;
    std::size_t heuristic_every = 25;  // once an incumbent exists; every node before that
};

struct SearchProgress {
    std::size_t node = 0;
    double incumbent = kInf;
    double bound = -kInf;
};

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    std::vector<double> values;  // empty without an incumbent
    double objective = kInf;
    double best_bound = -kInf;
    double root_bound = -kInf;   // root LP relaxation value
    double gap = kInf;           // relative
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    double seconds = 0.0;
    /// Row multipliers of the root infeasibility proof; nonzero entries
    /// name the constraints involved.
    std::vector<double> infeasibility_certificate;
    std::vector<std::string> log;
    std::vector<SearchProgress> progress;  // one entry per processed node

    bool has_incumbent() const { return !values.empty(); }
};

/// Best-first branch and bound on the LP relaxation, branching on the
/// most fractional binary (ties to the lowest index). The search runs
/// depth-first until the first incumbent. Single-threaded; the returned
/// optimum depends only on the problem and options.
MilpSolution solve(const MilpProblem& problem, const SolveOptions& options = {});

/// LP relaxation value of the problem (integrality dropped).
double relaxation_bound(const MilpProblem& problem);

}  // namespace secd
