#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "secd/datagen.hpp"
#include "secd/milp_problem.hpp"

namespace secd::testing {

/// Random problem with `n` variables boxed in [0, ub] and `m` random rows;
/// the first `binaries` variables are binary.
inline MilpProblem random_problem(SplitMix64& rng, std::size_t n, std::size_t m, std::size_t binaries) {
    MilpProblem p;
    std::vector<VarId> v;
    for (std::size_t j = 0; j < n; ++j)
        v.push_back(j < binaries ? p.add_binary("b" + std::to_string(j))
                                 : p.add_continuous("x" + std::to_string(j), 0.0, std::round(rng.uniform(1.0, 5.0))));
    for (std::size_t i = 0; i < m; ++i) {
        LinearExpr e;
        for (std::size_t j = 0; j < n; ++j) e.add(v[j], std::round(rng.uniform(-4.0, 6.0)));
        const double r = rng.uniform();
        const Sense s = r < 0.6 ? Sense::LessEqual : (r < 0.9 ? Sense::GreaterEqual : Sense::Equal);
        p.add_constraint("r" + std::to_string(i), e, s, std::round(rng.uniform(-2.0, 8.0)));
    }
    LinearExpr obj;
    for (std::size_t j = 0; j < n; ++j) obj.add(v[j], std::round(rng.uniform(-5.0, 5.0)));
    p.set_objective(obj);
    return p;
}

/// LP optimum of a problem whose variables are all finitely bounded, by
/// enumerating every vertex over the variables left free after `fixed`
/// pins selected ones.
inline std::optional<double> vertex_enumeration(const MilpProblem& p,
                                                const std::vector<std::optional<double>>& fixed = {}) {
    const std::size_t total = p.variable_count();
    std::vector<double> lo(total), up(total);
    std::vector<std::size_t> free_vars;
    for (std::size_t j = 0; j < total; ++j) {
        lo[j] = p.variables()[j].lower;
        up[j] = p.variables()[j].upper;
        if (j < fixed.size() && fixed[j]) lo[j] = up[j] = *fixed[j];
        if (lo[j] < up[j]) free_vars.push_back(j);
    }
    const std::size_t n = free_vars.size();
    const auto N = static_cast<Eigen::Index>(n);
    const std::vector<double> base = lo;
    struct Plane {
        Eigen::RowVectorXd a;
        double b;
    };
    std::vector<Plane> planes;
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(N);
        e[static_cast<Eigen::Index>(k)] = 1.0;
        planes.push_back({e, lo[free_vars[k]]});
        planes.push_back({e, up[free_vars[k]]});
    }
    std::vector<std::ptrdiff_t> slot(total, -1);
    for (std::size_t k = 0; k < n; ++k) slot[free_vars[k]] = static_cast<std::ptrdiff_t>(k);
    for (const Constraint& c : p.constraints()) {
        Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(N);
        double b = c.rhs;
        for (const Term& t : c.expr.terms) {
            if (slot[t.var.index] >= 0)
                a[slot[t.var.index]] += t.coef;
            else
                b -= t.coef * base[t.var.index];
        }
        planes.push_back({a, b});
    }
    auto evaluate = [&](const Eigen::VectorXd& x) -> std::optional<double> {
        std::vector<double> v = base;
        for (std::size_t k = 0; k < n; ++k) v[free_vars[k]] = x[static_cast<Eigen::Index>(k)];
        for (std::size_t j = 0; j < total; ++j)
            if (v[j] < lo[j] - 1e-7 || v[j] > up[j] + 1e-7) return std::nullopt;
        for (const Constraint& c : p.constraints()) {
            const double lhs = c.expr.evaluate(v) - c.expr.constant;
            if (c.sense != Sense::GreaterEqual && lhs > c.rhs + 1e-7) return std::nullopt;
            if (c.sense != Sense::LessEqual && lhs < c.rhs - 1e-7) return std::nullopt;
        }
        return p.objective_value(v);
    };
    std::optional<double> best;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
        if (depth == n) {
            Eigen::MatrixXd a(N, N);
            Eigen::VectorXd b(N);
            for (std::size_t k = 0; k < n; ++k) {
                a.row(static_cast<Eigen::Index>(k)) = planes[pick[k]].a;
                b[static_cast<Eigen::Index>(k)] = planes[pick[k]].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
            if (lu.rank() < N) return;
            const std::optional<double> f = evaluate(lu.solve(b));
            if (f && (!best || *f < *best)) best = f;
            return;
        }
        for (std::size_t k = start; k < planes.size(); ++k) {
            pick[depth] = k;
            rec(depth + 1, k + 1);
        }
    };
    rec(0, 0);
    return best;
}

/// MILP optimum by enumerating every binary assignment.
inline std::optional<double> enumerate_binaries(const MilpProblem& p) {
    std::vector<std::size_t> bins;
    for (std::size_t j = 0; j < p.variable_count(); ++j)
        if (p.variables()[j].kind == VarKind::Binary) bins.push_back(j);
    std::optional<double> best;
    for (std::size_t mask = 0; mask < (std::size_t{1} << bins.size()); ++mask) {
        std::vector<std::optional<double>> fixed(p.variable_count());
        for (std::size_t k = 0; k < bins.size(); ++k) fixed[bins[k]] = (mask >> k) & 1u ? 1.0 : 0.0;
        const std::optional<double> v = vertex_enumeration(p, fixed);
        if (v && (!best || *v < *best)) best = v;
    }
    return best;
}

}  // namespace secd::testing
