#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "secd/mlp_encoding.hpp"
#include "secd/scenario.hpp"
#include "secd/surrogate.hpp"

namespace secd {

enum class DispatchMode { P2, Benchmark1, NoFlex };

const char* to_string(DispatchMode mode);
DispatchMode parse_dispatch_mode(const std::string& text);

struct P2Options {
    DispatchMode mode = DispatchMode::P2;
    EncodingOptions encoding;
    /// Safety row is y1 - y2 <= -margin.
    double safety_margin = 0.0;
    /// Caps cooling so that every bus's active demand stays within the
    /// range the classifier was trained on (read from its normalization).
    bool clip_to_training_domain = true;
    /// When positive, each safety row gets a slack v_t >= 0 priced at this
    /// weight per unit of logit. The slacks are appended after every other
    /// variable, so all other indices match the hard formulation.
    double soft_safety_penalty = 0.0;
};

/// Where each physical quantity lives in the assembled problem.
struct P2Layout {
    std::vector<std::vector<VarId>> cooling;  // [t][zone]
    std::vector<std::vector<VarId>> theta;    // [t][zone]
    std::vector<std::vector<VarId>> pv;       // [t][pv bus]
    std::vector<VarId> buy, sell, loss;
    std::vector<MlpEncoding> encodings;       // empty without the classifier
    std::vector<std::size_t> safety_rows;     // per slot
    std::vector<VarId> safety_slack;          // per slot, soft formulation only
    std::vector<Eigen::VectorXd> box_lower;   // classifier input box per slot
    std::vector<Eigen::VectorXd> box_upper;
    std::size_t neurons_per_slot = 0;
};

struct P2Instance {
    MilpProblem problem;
    P2Layout layout;
};

/// Operation vector of slot t as affine expressions of the decisions.
std::vector<LinearExpr> operation_expressions(const Scenario& scenario, const P2Layout& layout, std::size_t t);

/// Assembles the dispatch MILP. `mlp` may be null only for Benchmark1.
/// Throws InvalidArgument on dimension mismatches between scenario and models.
P2Instance build_p2(const Scenario& scenario, const MlpModel* mlp, const LrModel& lr, const P2Options& options);

/// Copies `values` and sets every ReLU binary to the activation pattern of
/// the classifier evaluated at the operation vectors implied by `values`.
std::vector<double> activation_pattern(const Scenario& scenario, const MlpModel& mlp, const P2Instance& instance,
                                       const std::vector<double>& values);

/// Primal heuristic for the dispatch MILP. Starting from the activation
/// pattern of a relaxation point, it solves the soft formulation with the
/// pattern pinned, then flips the neurons that end on a region boundary
/// and repeats until the safety slacks vanish or the pattern stops
/// changing. Returns a point of the hard formulation whose binaries carry
/// the last pattern.
class PatternSearch {
public:
    PatternSearch(const Scenario& scenario, const MlpModel& mlp, const LrModel& lr, const P2Options& options,
                  std::size_t max_rounds = 25);
    ~PatternSearch();
    PatternSearch(const PatternSearch&) = delete;
    PatternSearch& operator=(const PatternSearch&) = delete;

    std::vector<double> operator()(const std::vector<double>& relaxation);

private:
    struct State;
    std::unique_ptr<State> state_;
};

}  // namespace secd
