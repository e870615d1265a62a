#include "secd/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "secd/lp_simplex.hpp"

namespace secd {

const char* to_string(MilpStatus status) {
    switch (status) {
        case MilpStatus::Optimal: return "optimal";
        case MilpStatus::Infeasible: return "infeasible";
        case MilpStatus::BudgetExceeded: return "budget-exceeded";
        case MilpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

struct Node {
    double bound = -kInf;
    std::size_t id = 0;
    std::vector<std::pair<std::size_t, double>> fixes;
};

struct WorseNode {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

std::string fmt_value(double v) { return std::isfinite(v) ? fmt::format("{:.10g}", v) : (v > 0 ? "inf" : "-inf"); }

double relative_gap(double incumbent, double bound) {
    if (!std::isfinite(incumbent)) return kInf;
    if (!std::isfinite(bound)) return kInf;
    return std::max(0.0, incumbent - bound) / std::max(std::abs(incumbent), 1e-10);
}

}  // namespace

double relaxation_bound(const MilpProblem& problem) {
    BoundedSimplex lp(problem);
    switch (lp.solve()) {
        case LpStatus::Optimal: return lp.objective();
        case LpStatus::Unbounded: return -kInf;
        default: return kInf;
    }
}

MilpSolution solve(const MilpProblem& problem, const SolveOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };

    problem.validate();
    std::vector<std::size_t> binaries;
    for (std::size_t j = 0; j < problem.variable_count(); ++j)
        if (problem.variables()[j].kind == VarKind::Binary) binaries.push_back(j);

    MilpSolution sol;
    BoundedSimplex lp(problem);
    auto finish = [&](MilpStatus status) {
        sol.status = status;
        sol.lp_iterations = lp.iterations();
        sol.seconds = elapsed();
        sol.gap = relative_gap(sol.objective, sol.best_bound);
        sol.log.push_back(fmt::format("done status={} nodes={} incumbent={} bound={} gap={}", to_string(status),
                                      sol.nodes, fmt_value(sol.objective), fmt_value(sol.best_bound),
                                      fmt_value(sol.gap)));
        return sol;
    };

    const LpStatus root = lp.solve();
    if (root == LpStatus::Infeasible) {
        sol.infeasibility_certificate = lp.farkas();
        sol.best_bound = kInf;
        return finish(MilpStatus::Infeasible);
    }
    if (root == LpStatus::Unbounded) return finish(MilpStatus::Unbounded);
    if (root == LpStatus::IterationLimit) return finish(MilpStatus::BudgetExceeded);
    sol.root_bound = lp.objective();
    sol.best_bound = sol.root_bound;
    sol.log.push_back(fmt::format("root relaxation={} binaries={} rows={} cols={}", fmt_value(sol.root_bound),
                                  binaries.size(), problem.constraint_count(), problem.variable_count()));

    auto prune_tolerance = [&](double incumbent) {
        if (!std::isfinite(incumbent)) return 0.0;
        return std::max(options.absolute_gap, options.relative_gap * std::abs(incumbent));
    };
    auto apply = [&](const Node& node) {
        for (std::size_t b : binaries) lp.set_bounds(b, problem.variables()[b].lower, problem.variables()[b].upper);
        for (auto [var, value] : node.fixes) lp.set_bounds(var, value, value);
    };

    // Depth-first (a stack) until the first incumbent, then a best-first heap.
    std::vector<Node> open;
    open.push_back(Node{sol.root_bound, 0, {}});
    bool best_first = false;
    std::size_t next_id = 1;
    bool budget_hit = false;
    double incumbent = kInf;
    double in_process = kInf;  // bound of the node being processed

    auto global_bound = [&] {
        double lb = std::min(incumbent, in_process);
        if (best_first) {
            if (!open.empty()) lb = std::min(lb, open.front().bound);
        } else {
            for (const Node& n : open) lb = std::min(lb, n.bound);
        }
        return lb;
    };
    auto log_state = [&](const char* tag) {
        sol.log.push_back(fmt::format("{}node={} open={} incumbent={} bound={} gap={}", tag, sol.nodes, open.size(),
                                      fmt_value(incumbent), fmt_value(sol.best_bound),
                                      fmt_value(relative_gap(incumbent, sol.best_bound))));
    };
    auto push = [&](Node node) {
        open.push_back(std::move(node));
        if (best_first) std::push_heap(open.begin(), open.end(), WorseNode{});
    };
    auto pop = [&] {
        if (best_first) std::pop_heap(open.begin(), open.end(), WorseNode{});
        Node node = std::move(open.back());
        open.pop_back();
        return node;
    };
    // Pins the binaries of `x` (rounded), re-solves and keeps the point if
    // it improves the incumbent.
    auto try_candidate = [&](const std::vector<double>& x) {
        std::vector<double> candidate = x;
        for (std::size_t b : binaries) {
            candidate[b] = std::round(x[b]);
            lp.set_bounds(b, candidate[b], candidate[b]);
        }
        lp.set_cutoff(kInf);
        if (lp.solve() == LpStatus::Optimal) {
            candidate = lp.primal();
            for (std::size_t b : binaries) candidate[b] = std::round(candidate[b]);
        }
        const double value = problem.objective_value(candidate);
        if (value < incumbent && problem.max_violation(candidate) <= options.feasibility_tolerance) {
            incumbent = value;
            sol.values = std::move(candidate);
            sol.objective = value;
            if (!best_first) {
                best_first = true;
                std::make_heap(open.begin(), open.end(), WorseNode{});
            }
            sol.best_bound = std::max(sol.best_bound, std::min(global_bound(), incumbent));
            log_state("incumbent ");
        }
    };

    while (!open.empty()) {
        Node node = pop();
        if (node.bound >= incumbent - prune_tolerance(incumbent)) continue;
        if (sol.nodes >= options.node_limit || elapsed() >= options.time_limit_seconds) {
            push(std::move(node));
            budget_hit = true;
            break;
        }
        ++sol.nodes;
        in_process = node.bound;
        apply(node);
        lp.set_cutoff(std::isfinite(incumbent) ? incumbent - prune_tolerance(incumbent) : kInf);
        const LpStatus st = lp.solve();
        if (st == LpStatus::IterationLimit) {
            push(std::move(node));
            budget_hit = true;
            break;
        }
        if (st == LpStatus::Unbounded) return finish(MilpStatus::Unbounded);

        if (st == LpStatus::Optimal) {
            const double bound = std::max(node.bound, lp.objective());
            in_process = bound;
            if (bound < incumbent - prune_tolerance(incumbent)) {
                const std::vector<double> x = lp.primal();
                std::size_t branch = problem.variable_count();
                double most = options.integrality_tolerance;
                for (std::size_t b : binaries) {
                    const double frac = std::abs(x[b] - std::round(x[b]));
                    if (frac > most) {
                        most = frac;
                        branch = b;
                    }
                }
                const bool run_heuristic =
                    options.heuristic && branch != problem.variable_count() &&
                    (!std::isfinite(incumbent) || (options.heuristic_every > 0 && sol.nodes % options.heuristic_every == 1));
                if (branch == problem.variable_count()) {
                    try_candidate(x);
                } else {
                    if (run_heuristic) {
                        try_candidate(options.heuristic(x));
                        apply(node);
                    }
                    if (bound < incumbent - prune_tolerance(incumbent)) {
                        Node down{bound, next_id++, node.fixes};
                        Node up{bound, next_id++, std::move(node.fixes)};
                        down.fixes.push_back({branch, 0.0});
                        up.fixes.push_back({branch, 1.0});
                        const bool prefer_up = x[branch] >= 0.5;
                        // The preferred child goes last so the stack pops it first.
                        push(prefer_up ? std::move(down) : std::move(up));
                        push(prefer_up ? std::move(up) : std::move(down));
                    }
                }
            }
        }

        in_process = kInf;
        sol.best_bound = std::max(sol.best_bound, std::min(global_bound(), incumbent));
        sol.progress.push_back({sol.nodes, incumbent, sol.best_bound});
        if (options.log_every > 0 && sol.nodes % options.log_every == 0) log_state("");
        if (std::isfinite(incumbent) && incumbent - sol.best_bound <= prune_tolerance(incumbent)) break;
    }

    if (budget_hit) {
        sol.best_bound = std::max(sol.best_bound, std::min(global_bound(), incumbent));
        return finish(MilpStatus::BudgetExceeded);
    }
    if (!std::isfinite(incumbent)) {
        sol.best_bound = kInf;
        return finish(MilpStatus::Infeasible);
    }
    sol.best_bound = std::max(sol.best_bound, std::min(global_bound(), incumbent));
    return finish(MilpStatus::Optimal);
}

}  // namespace secd
