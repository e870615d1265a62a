#include "secd/lp_simplex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

namespace secd {

namespace {

constexpr double kBig = 1e7;            // stand-in for an infinite bound during the dual phase
constexpr std::size_t kRecomputeEvery = 100;

}  // namespace

BoundedSimplex::BoundedSimplex(const MilpProblem& problem, LpOptions options) : options_(options) {
    problem.validate();
    n_ = problem.variable_count();
    m_ = problem.constraint_count();
    rows_.resize(m_);
    cost_.assign(n_ + m_, 0.0);
    lo_.resize(n_ + m_);
    up_.resize(n_ + m_);
    x_.assign(n_ + m_, 0.0);
    artificial_.assign(n_ + m_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
        lo_[j] = problem.variables()[j].lower;
        up_[j] = problem.variables()[j].upper;
    }
    for (const Term& t : problem.objective().terms) cost_[t.var.index] += t.coef;
    offset_ = problem.objective().constant;
    t_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        const Constraint& c = problem.constraints()[i];
        for (const Term& t : c.expr.terms) {
            rows_[i].push_back({t.var.index, t.coef});
            T(i, t.var.index) += t.coef;
        }
        lo_[n_ + i] = c.sense == Sense::LessEqual ? -kInf : c.rhs;
        up_[n_ + i] = c.sense == Sense::GreaterEqual ? kInf : c.rhs;
    }
    basic_.resize(m_);
    nonbasic_.resize(n_);
    where_.resize(n_ + m_);
    for (std::size_t i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        where_[n_ + i] = static_cast<std::ptrdiff_t>(i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
        nonbasic_[j] = j;
        where_[j] = -static_cast<std::ptrdiff_t>(j) - 1;
    }
    d_.assign(cost_.begin(), cost_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
    recompute_basic_values();
}

void BoundedSimplex::place_nonbasic(std::size_t slot) {
    const std::size_t v = nonbasic_[slot];
    const double dj = d_[slot];
    const double tol = options_.dual_tolerance;
    artificial_[v] = 0;
    double value;
    if (lo_[v] == up_[v]) {
        value = lo_[v];
    } else if (dj > tol) {
        value = std::isfinite(lo_[v]) ? lo_[v] : (artificial_[v] = 1, -kBig);
    } else if (dj < -tol) {
        value = std::isfinite(up_[v]) ? up_[v] : (artificial_[v] = 1, kBig);
    } else if (x_[v] >= lo_[v] && x_[v] <= up_[v]) {
        value = x_[v];
    } else {
        value = std::isfinite(lo_[v]) ? lo_[v] : std::isfinite(up_[v]) ? up_[v] : 0.0;
    }
    x_[v] = value;
}

void BoundedSimplex::move_nonbasic(std::size_t slot, double value) {
    const std::size_t v = nonbasic_[slot];
    const double delta = value - x_[v];
    if (delta == 0.0) return;
    x_[v] = value;
    for (std::size_t i = 0; i < m_; ++i) {
        const double a = T(i, slot);
        if (a != 0.0) x_[basic_[i]] += a * delta;
    }
}

void BoundedSimplex::set_bounds(std::size_t j, double lower, double upper) {
    lo_[j] = lower;
    up_[j] = upper;
    if (where_[j] >= 0) return;
    const std::size_t slot = static_cast<std::size_t>(-where_[j] - 1);
    double value = x_[j];
    if (lower == upper || value < lower)
        value = lower;
    else if (value > upper)
        value = upper;
    if (artificial_[j] && ((value < 0 && std::isfinite(lower)) || (value > 0 && std::isfinite(upper)))) {
        artificial_[j] = 0;
        value = value < 0 ? lower : upper;
    }
    move_nonbasic(slot, value);
}

void BoundedSimplex::recompute_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
        double s = 0.0;
        const double* row = &t_[i * n_];
        for (std::size_t j = 0; j < n_; ++j)
            if (row[j] != 0.0) s += row[j] * x_[nonbasic_[j]];
        x_[basic_[i]] = s;
    }
    since_recompute_ = 0;
}

void BoundedSimplex::recompute_reduced_costs() {
    for (std::size_t j = 0; j < n_; ++j) d_[j] = cost_[nonbasic_[j]];
    for (std::size_t i = 0; i < m_; ++i) {
        const double cb = cost_[basic_[i]];
        if (cb == 0.0) continue;
        const double* row = &t_[i * n_];
        for (std::size_t j = 0; j < n_; ++j) d_[j] += cb * row[j];
    }
}

void BoundedSimplex::refactorize() {
    ++refactorizations_;
    if (m_ == 0) return;
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(n_);
    for (std::size_t i = 0; i < m_; ++i)
        for (auto [j, a] : rows_[i]) cols[j].push_back({i, a});
    auto column = [&](std::size_t v, auto&& emit) {
        if (v < n_)
            for (auto [i, a] : cols[v]) emit(i, a);
        else
            emit(v - n_, -1.0);
    };

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < m_; ++k)
        column(basic_[k], [&](std::size_t i, double a) { trip.emplace_back(static_cast<int>(i), static_cast<int>(k), a); });
    Eigen::SparseMatrix<double> basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    basis.setFromTriplets(trip.begin(), trip.end());
    basis.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(basis);

    if (lu.info() != Eigen::Success) {
        // Singular basis: fall back to the all-logical basis.
        for (std::size_t i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            where_[n_ + i] = static_cast<std::ptrdiff_t>(i);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            where_[j] = -static_cast<std::ptrdiff_t>(j) - 1;
        }
        std::fill(t_.begin(), t_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            for (auto [j, a] : rows_[i]) T(i, j) += a;
        recompute_reduced_costs();
        for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
        recompute_basic_values();
        return;
    }

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (std::size_t k = 0; k < n_; ++k)
        column(nonbasic_[k], [&](std::size_t i, double a) { rhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = a; });
    Eigen::MatrixXd sol = lu.solve(rhs);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = -sol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            T(i, j) = std::abs(v) < 1e-14 ? 0.0 : v;
        }
    recompute_reduced_costs();
    recompute_basic_values();
}

void BoundedSimplex::pivot(std::size_t p, std::size_t q) {
    double* prow = &t_[p * n_];
    const double a = prow[q];
    std::vector<std::size_t> nz;
    nz.reserve(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        if (j == q || prow[j] == 0.0) continue;
        prow[j] = -prow[j] / a;
        nz.push_back(j);
    }
    prow[q] = 1.0 / a;

    for (std::size_t i = 0; i < m_; ++i) {
        if (i == p) continue;
        double* row = &t_[i * n_];
        const double c = row[q];
        if (c == 0.0) continue;
        for (std::size_t j : nz) row[j] += c * prow[j];
        row[q] = c / a;
    }
    const double c = d_[q];
    if (c != 0.0) {
        for (std::size_t j : nz) d_[j] += c * prow[j];
        d_[q] = c / a;
    }

    const std::size_t leaving = basic_[p], entering = nonbasic_[q];
    basic_[p] = entering;
    nonbasic_[q] = leaving;
    where_[entering] = static_cast<std::ptrdiff_t>(p);
    where_[leaving] = -static_cast<std::ptrdiff_t>(q) - 1;
    ++iterations_;
    if (++since_recompute_ >= kRecomputeEvery) recompute_basic_values();
}

bool BoundedSimplex::restore_dual_feasibility() {
    bool moved = false;
    const double tol = options_.dual_tolerance;
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t v = nonbasic_[j];
        const bool inc = x_[v] < up_[v] && !(artificial_[v] && x_[v] >= kBig);
        const bool dec = x_[v] > lo_[v] && !(artificial_[v] && x_[v] <= -kBig);
        if ((inc && d_[j] < -tol) || (dec && d_[j] > tol)) {
            const double before = x_[v];
            place_nonbasic(j);
            const double after = x_[v];
            x_[v] = before;
            move_nonbasic(j, after);
            moved = true;
        }
    }
    return moved;
}

double BoundedSimplex::current_objective() const {
    double z = 0.0;
    for (std::size_t v = 0; v < n_; ++v) z += cost_[v] * x_[v];
    return z;
}

bool BoundedSimplex::has_artificial() const {
    for (std::size_t j = 0; j < n_; ++j)
        if (artificial_[nonbasic_[j]]) return true;
    return false;
}

BoundedSimplex::Phase BoundedSimplex::dual_simplex() {
    const double ptol = options_.primal_tolerance, dtol = options_.dual_tolerance, pivtol = options_.pivot_tolerance;
    std::size_t stalled = 0;
    bool bland = false;
    double obj = current_objective();
    while (true) {
        if (iterations_ >= options_.iteration_limit) return Phase::Limit;
        if (since_recompute_ == 0) obj = current_objective();
        if (std::isfinite(options_.cutoff) && obj + offset_ > options_.cutoff + 1e-9 * (1.0 + std::abs(options_.cutoff)) &&
            !has_artificial())
            return Phase::Cutoff;

        std::size_t p = m_;
        double worst = 0.0;
        bool to_lower = true;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t v = basic_[i];
            const double below = lo_[v] - x_[v], above = x_[v] - up_[v];
            const double viol = std::max(below, above);
            if (viol <= ptol * std::max(1.0, std::abs(below > above ? lo_[v] : up_[v]))) continue;
            if (bland ? (p == m_ || v < basic_[p]) : viol > worst) {
                worst = viol;
                p = i;
                to_lower = below > above;
            }
        }
        if (p == m_) return Phase::Done;

        const double* prow = &t_[p * n_];
        // Entering candidates move x_B[p] toward the violated bound.
        auto eligible = [&](std::size_t j) {
            const double a = prow[j];
            if (std::abs(a) <= pivtol) return false;
            const std::size_t v = nonbasic_[j];
            if (lo_[v] == up_[v]) return false;
            const bool inc = x_[v] < up_[v] && !(artificial_[v] && x_[v] >= kBig);
            const bool dec = x_[v] > lo_[v] && !(artificial_[v] && x_[v] <= -kBig);
            return to_lower ? ((a > 0 && inc) || (a < 0 && dec)) : ((a < 0 && inc) || (a > 0 && dec));
        };
        std::size_t q = n_;
        if (bland) {
            double best = kInf;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!eligible(j)) continue;
                const double r = std::abs(d_[j]) / std::abs(prow[j]);
                if (r < best - 1e-12 || (r <= best + 1e-12 && (q == n_ || nonbasic_[j] < nonbasic_[q]))) {
                    best = std::min(best, r);
                    q = j;
                }
            }
        } else {
            double bound = kInf;
            for (std::size_t j = 0; j < n_; ++j)
                if (eligible(j)) bound = std::min(bound, (std::abs(d_[j]) + dtol) / std::abs(prow[j]));
            double best_pivot = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!eligible(j)) continue;
                if (std::abs(d_[j]) / std::abs(prow[j]) <= bound && std::abs(prow[j]) > best_pivot) {
                    best_pivot = std::abs(prow[j]);
                    q = j;
                }
            }
        }
        if (q == n_) {
            build_farkas(p);
            return Phase::Infeasible;
        }

        const std::size_t leaving = basic_[p];
        const double target = to_lower ? lo_[leaving] : up_[leaving];
        const double delta = (target - x_[leaving]) / prow[q];
        const double gain = d_[q] * delta;
        move_nonbasic(q, x_[nonbasic_[q]] + delta);
        x_[leaving] = target;
        pivot(p, q);

        obj += gain;
        if (gain <= 1e-12 * (1.0 + std::abs(obj))) {
            if (++stalled > 10 * std::max<std::size_t>(m_, 1)) bland = true;
        } else {
            stalled = 0;
            bland = false;
        }
    }
}

BoundedSimplex::Phase BoundedSimplex::primal_simplex() {
    const double ptol = options_.primal_tolerance, dtol = options_.dual_tolerance, pivtol = options_.pivot_tolerance;
    std::size_t stalled = 0;
    bool bland = false;
    while (true) {
        if (iterations_ >= options_.iteration_limit) return Phase::Limit;
        std::size_t q = n_;
        double dir = 0.0, best = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t v = nonbasic_[j];
            double s = 0.0;
            if (x_[v] < up_[v] && d_[j] < -dtol)
                s = 1.0;
            else if (x_[v] > lo_[v] && d_[j] > dtol)
                s = -1.0;
            if (s == 0.0) continue;
            if (bland ? (q == n_ || v < nonbasic_[q]) : std::abs(d_[j]) > best) {
                best = std::abs(d_[j]);
                q = j;
                dir = s;
            }
        }
        if (q == n_) return Phase::Done;

        const std::size_t entering = nonbasic_[q];
        const double own = dir > 0 ? up_[entering] - x_[entering] : x_[entering] - lo_[entering];
        auto room = [&](std::size_t i, double rate) {
            const std::size_t b = basic_[i];
            return rate > 0 ? up_[b] - x_[b] : x_[b] - lo_[b];
        };
        double bound = kInf;
        for (std::size_t i = 0; i < m_; ++i) {
            const double rate = T(i, q) * dir;
            if (std::abs(rate) <= pivtol) continue;
            const double r = room(i, rate);
            if (std::isfinite(r)) bound = std::min(bound, (std::max(r, 0.0) + ptol) / std::abs(rate));
        }
        std::size_t p = m_;
        double step = kInf, best_rate = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double rate = T(i, q) * dir;
            if (std::abs(rate) <= pivtol) continue;
            const double r = room(i, rate);
            if (!std::isfinite(r)) continue;
            const double t = std::max(r, 0.0) / std::abs(rate);
            if (bland ? (t < step - 1e-12 || (t <= step + 1e-12 && p != m_ && basic_[i] < basic_[p]))
                      : (t <= bound && std::abs(rate) > best_rate)) {
                step = bland ? std::min(step, t) : t;
                best_rate = std::abs(rate);
                p = i;
            }
        }
        if (p == m_ && !std::isfinite(own)) return Phase::Unbounded;

        if (p == m_ || own <= step) {
            move_nonbasic(q, dir > 0 ? up_[entering] : lo_[entering]);
            stalled = 0;
            bland = false;
            continue;
        }
        const std::size_t leaving = basic_[p];
        const double rate = T(p, q) * dir;
        const double hit = rate > 0 ? up_[leaving] : lo_[leaving];
        const double gain = std::abs(d_[q]) * step;
        move_nonbasic(q, x_[entering] + dir * step);
        x_[leaving] = hit;
        pivot(p, q);
        if (gain <= 1e-12) {
            if (++stalled > 10 * std::max<std::size_t>(m_, 1)) bland = true;
        } else {
            stalled = 0;
            bland = false;
        }
    }
}

void BoundedSimplex::build_farkas(std::size_t row) {
    farkas_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        const std::ptrdiff_t w = where_[n_ + i];
        if (w >= 0)
            farkas_[i] = static_cast<std::size_t>(w) == row ? -1.0 : 0.0;
        else
            farkas_[i] = T(row, static_cast<std::size_t>(-w - 1));
    }
}

double BoundedSimplex::row_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
        double s = -x_[n_ + i];
        for (auto [j, a] : rows_[i]) s += a * x_[j];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

LpStatus BoundedSimplex::solve() {
    farkas_.clear();
    bool refactored = false;
    for (int attempt = 0; attempt < 4; ++attempt) {
        restore_dual_feasibility();
        Phase ph = dual_simplex();
        if (ph == Phase::Cutoff) return LpStatus::Cutoff;
        if (ph == Phase::Limit) return LpStatus::IterationLimit;
        if (ph == Phase::Infeasible) {
            if (!refactored) {
                refactorize();
                refactored = true;
                continue;
            }
            return LpStatus::Infeasible;
        }
        for (std::size_t j = 0; j < n_; ++j) artificial_[nonbasic_[j]] = 0;
        ph = primal_simplex();
        if (ph == Phase::Limit) return LpStatus::IterationLimit;
        if (ph == Phase::Unbounded) return LpStatus::Unbounded;

        double scale = 1.0;
        for (double v : x_) scale = std::max(scale, std::abs(v));
        bool bounds_ok = true;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t v = basic_[i];
            if (x_[v] < lo_[v] - 1e-7 * std::max(1.0, std::abs(lo_[v])) ||
                x_[v] > up_[v] + 1e-7 * std::max(1.0, std::abs(up_[v])))
                bounds_ok = false;
        }
        if (bounds_ok && row_residual() <= 1e-9 * scale) return LpStatus::Optimal;
        refactorize();
        refactored = true;
    }
    return LpStatus::Optimal;
}

std::vector<double> BoundedSimplex::primal() const { return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)}; }

double BoundedSimplex::objective() const { return current_objective() + offset_; }

}  // namespace secd
