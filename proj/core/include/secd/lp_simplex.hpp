#pragma once

#include <cstddef>
#include <vector>

#include "secd/milp_problem.hpp"

namespace secd {

enum class LpStatus { Optimal, Infeasible, Unbounded, Cutoff, IterationLimit };

struct LpOptions {
    double primal_tolerance = 1e-9;
    double dual_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    std::size_t iteration_limit = 1'000'000;
    /// Stop the dual simplex once the objective provably exceeds this.
    double cutoff = kInf;
};

/// Bounded-variable simplex on the LP relaxation of a MilpProblem
/// (integrality ignored). Rows are turned into logical variables,
/// A x - s = 0 with s bounded by the row sense, and the method keeps a
/// dense tableau x_B = T x_N over the nonbasic variables. The dual
/// simplex drives solves after bound changes; a primal pass cleans up
/// unbounded nonbasics and residual dual infeasibilities.
class BoundedSimplex {
public:
    explicit BoundedSimplex(const MilpProblem& problem, LpOptions options = {});

    /// Changes the bounds of structural variable `j`; the current basis is
    /// kept so that the next solve warm-starts.
    void set_bounds(std::size_t j, double lower, double upper);
    double lower(std::size_t j) const { return lo_[j]; }
    double upper(std::size_t j) const { return up_[j]; }
    void set_cutoff(double cutoff) { options_.cutoff = cutoff; }

    LpStatus solve();

    /// Structural variable values of the last solve.
    std::vector<double> primal() const;
    double objective() const;
    std::size_t iterations() const { return iterations_; }
    std::size_t refactorizations() const { return refactorizations_; }
    /// Row multipliers y of the infeasible row combination found by the
    /// last Infeasible solve (nonzero entries mark the rows involved).
    const std::vector<double>& farkas() const { return farkas_; }
    /// Max |A x - s| over rows for the current point.
    double row_residual() const;

private:
    enum class Phase { Done, Infeasible, Unbounded, Cutoff, Limit };

    std::size_t m_ = 0, n_ = 0;
    double offset_ = 0.0;  // objective constant
    LpOptions options_;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_;  // sparse A by row
    std::vector<double> cost_;                // n + m
    std::vector<double> lo_, up_;             // n + m
    std::vector<double> x_;                   // n + m
    std::vector<char> artificial_;            // nonbasic parked at a finite stand-in for an infinite bound
    std::vector<std::size_t> basic_;          // row -> variable
    std::vector<std::size_t> nonbasic_;       // slot -> variable
    std::vector<std::ptrdiff_t> where_;       // variable -> row (>= 0) or -(slot + 1)
    std::vector<double> t_;                   // m x n, row-major
    std::vector<double> d_;                   // reduced costs per slot
    std::vector<double> farkas_;
    std::size_t iterations_ = 0;
    std::size_t refactorizations_ = 0;
    std::size_t since_recompute_ = 0;

    double& T(std::size_t i, std::size_t j) { return t_[i * n_ + j]; }
    double T(std::size_t i, std::size_t j) const { return t_[i * n_ + j]; }

    void place_nonbasic(std::size_t slot);
    void move_nonbasic(std::size_t slot, double value);
    void recompute_basic_values();
    void recompute_reduced_costs();
    void refactorize();
    void pivot(std::size_t row, std::size_t slot);
    bool restore_dual_feasibility();
    Phase dual_simplex();
    Phase primal_simplex();
    void build_farkas(std::size_t row);
    double current_objective() const;
    bool has_artificial() const;
};

}  // namespace secd
