#include "secd/milp_problem.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace secd {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    for (const Term& t : other.terms) terms.push_back({t.var, scale * t.coef});
    constant += scale * other.constant;
    return *this;
}

LinearExpr& LinearExpr::normalize() {
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const Term& t : terms) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    terms = std::move(merged);
    return *this;
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
    double v = constant;
    for (const Term& t : terms) v += t.coef * values.at(t.var.index);
    return v;
}

VarId MilpProblem::add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw MilpError(fmt::format("variable '{}': invalid bounds [{}, {}]", name, lower, upper));
    if (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0))
        throw MilpError(fmt::format("binary '{}' must have bounds inside [0, 1]", name));
    if (!var_names_.emplace(name, variables_.size()).second)
        throw MilpError(fmt::format("duplicate variable name '{}'", name));
    variables_.push_back({std::move(name), kind, lower, upper});
    return VarId{variables_.size() - 1};
}

std::size_t MilpProblem::add_constraint(std::string name, LinearExpr expr, Sense sense, double rhs) {
    for (const Term& t : expr.terms)
        if (t.var.index >= variables_.size())
            throw MilpError(fmt::format("constraint '{}' references unknown variable {}", name, t.var.index));
    if (!row_names_.emplace(name, constraints_.size()).second)
        throw MilpError(fmt::format("duplicate constraint name '{}'", name));
    rhs -= expr.constant;
    expr.constant = 0.0;
    expr.normalize();
    constraints_.push_back({std::move(name), std::move(expr), sense, rhs});
    return constraints_.size() - 1;
}

void MilpProblem::set_objective(LinearExpr objective) {
    for (const Term& t : objective.terms)
        if (t.var.index >= variables_.size())
            throw MilpError(fmt::format("objective references unknown variable {}", t.var.index));
    objective_ = std::move(objective.normalize());
}

void MilpProblem::set_bounds(VarId v, double lower, double upper) {
    Variable& var = variables_.at(v.index);
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw MilpError(fmt::format("variable '{}': invalid bounds [{}, {}]", var.name, lower, upper));
    if (var.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0))
        throw MilpError(fmt::format("binary '{}' must have bounds inside [0, 1]", var.name));
    var.lower = lower;
    var.upper = upper;
}

std::size_t MilpProblem::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

std::optional<VarId> MilpProblem::find_variable(const std::string& name) const {
    auto it = var_names_.find(name);
    if (it == var_names_.end()) return std::nullopt;
    return VarId{it->second};
}

std::optional<std::size_t> MilpProblem::find_constraint(const std::string& name) const {
    auto it = row_names_.find(name);
    if (it == row_names_.end()) return std::nullopt;
    return it->second;
}

void MilpProblem::validate() const {
    for (const Variable& v : variables_) {
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper || v.lower == kInf || v.upper == -kInf)
            throw MilpError(fmt::format("variable '{}': invalid bounds [{}, {}]", v.name, v.lower, v.upper));
        if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
            throw MilpError(fmt::format("binary '{}' must have bounds inside [0, 1]", v.name));
    }
    auto check_expr = [&](const LinearExpr& e, const std::string& where) {
        for (const Term& t : e.terms) {
            if (t.var.index >= variables_.size())
                throw MilpError(fmt::format("{} references unknown variable {}", where, t.var.index));
            if (!std::isfinite(t.coef)) throw MilpError(fmt::format("{} has a non-finite coefficient", where));
        }
        if (!std::isfinite(e.constant)) throw MilpError(fmt::format("{} has a non-finite constant", where));
    };
    for (const Constraint& c : constraints_) {
        check_expr(c.expr, fmt::format("constraint '{}'", c.name));
        if (!std::isfinite(c.rhs)) throw MilpError(fmt::format("constraint '{}' has a non-finite rhs", c.name));
    }
    check_expr(objective_, "objective");
}

double MilpProblem::max_violation(const std::vector<double>& values) const {
    if (values.size() != variables_.size()) throw MilpError("max_violation: value vector has the wrong size");
    double worst = 0.0;
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        worst = std::max(worst, variables_[j].lower - values[j]);
        worst = std::max(worst, values[j] - variables_[j].upper);
    }
    for (const Constraint& c : constraints_) {
        const double lhs = c.expr.evaluate(values);
        if (c.sense != Sense::GreaterEqual) worst = std::max(worst, lhs - c.rhs);
        if (c.sense != Sense::LessEqual) worst = std::max(worst, c.rhs - lhs);
    }
    return worst;
}

double MilpProblem::integrality_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < variables_.size(); ++j)
        if (variables_[j].kind == VarKind::Binary)
            worst = std::max(worst, std::abs(values.at(j) - std::round(values[j])));
    return worst;
}

}  // namespace secd
