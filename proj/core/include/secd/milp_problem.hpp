#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "secd/error.hpp"

namespace secd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
    std::size_t index = 0;
    auto operator<=>(const VarId&) const = default;
};

enum class VarKind { Continuous, Binary };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInf;

    bool operator==(const Variable&) const = default;
};

struct Term {
    VarId var;
    double coef = 0.0;

    bool operator==(const Term&) const = default;
};

/// Sparse affine expression sum(coef * var) + constant.
struct LinearExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    LinearExpr() = default;
    explicit LinearExpr(double c) : constant(c) {}
    LinearExpr(VarId v, double coef = 1.0) : terms{{v, coef}} {}

    LinearExpr& add(VarId v, double coef) {
        terms.push_back({v, coef});
        return *this;
    }
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);
    LinearExpr& operator+=(const LinearExpr& other) { return add(other, 1.0); }
    LinearExpr& operator-=(const LinearExpr& other) { return add(other, -1.0); }

    /// Sorts by variable, merges duplicates and drops zero coefficients.
    LinearExpr& normalize();
    double evaluate(const std::vector<double>& values) const;

    bool operator==(const LinearExpr&) const = default;
};

inline LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
inline LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
inline LinearExpr operator*(double s, const LinearExpr& e) { return LinearExpr().add(e, s); }

enum class Sense { LessEqual, Equal, GreaterEqual };

/// expr (sense) rhs, with the expression constant already moved to rhs.
struct Constraint {
    std::string name;
    LinearExpr expr;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;

    bool operator==(const Constraint&) const = default;
};

class MilpError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Minimization problem over continuous and binary variables. Names are
/// unique per kind (variables, constraints).
class MilpProblem {
public:
    VarId add_variable(std::string name, VarKind kind, double lower, double upper);
    VarId add_continuous(std::string name, double lower, double upper) {
        return add_variable(std::move(name), VarKind::Continuous, lower, upper);
    }
    VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0); }

    std::size_t add_constraint(std::string name, LinearExpr expr, Sense sense, double rhs);
    void set_objective(LinearExpr objective);
    void set_bounds(VarId v, double lower, double upper);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const LinearExpr& objective() const { return objective_; }
    const Variable& variable(VarId v) const { return variables_.at(v.index); }
    std::size_t variable_count() const { return variables_.size(); }
    std::size_t constraint_count() const { return constraints_.size(); }
    std::size_t binary_count() const;
    std::optional<VarId> find_variable(const std::string& name) const;
    std::optional<std::size_t> find_constraint(const std::string& name) const;

    /// Throws MilpError on a malformed problem: unknown ids, non-finite
    /// coefficients, lower > upper, or binaries outside [0, 1].
    void validate() const;

    double objective_value(const std::vector<double>& values) const { return objective_.evaluate(values); }
    /// Largest violation of any bound or constraint, in the row's units.
    double max_violation(const std::vector<double>& values) const;
    /// Largest distance of a binary from {0, 1}.
    double integrality_violation(const std::vector<double>& values) const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    LinearExpr objective_;
    std::unordered_map<std::string, std::size_t> var_names_;
    std::unordered_map<std::string, std::size_t> row_names_;
};

}  // namespace secd
