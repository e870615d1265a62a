#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "secd/datagen.hpp"
#include "secd/dispatch.hpp"
#include "secd/powerflow.hpp"
#include "secd/scenario.hpp"
#include "secd/surrogate.hpp"

namespace secd {

struct DatasetConfig {
    std::size_t samples = 10000;
    double unsafe_fraction = 0.6;
    double train_fraction = 0.7;
    unsigned workers = 0;  // 0 means hardware concurrency
    std::uint64_t draw_budget = 0;
    SamplingConfig sampling;
};

struct TrainConfig {
    std::vector<int> hidden = {8, 8};
    Hyperparams hyper;
    /// Fit the loss model on the safe training samples only.
    bool loss_fit_safe_only = true;
};

struct DispatchConfig {
    double safety_margin = 4.0;
    bool clip_to_training_domain = true;
    EncodingOptions encoding;
    double relative_gap = 1e-6;
    std::size_t node_limit = 150;
    double time_limit_seconds = 600.0;
    std::size_t heuristic_every = 25;
    /// A budget-exceeded run whose incumbent is within this relative gap
    /// counts as solved.
    double acceptable_gap = 0.02;
    bool triage = true;
    std::size_t triage_node_limit = 50;

    DispatchOptions options(DispatchMode mode) const;
};

struct ValidationConfig {
    double voltage_tolerance_pu = 0.0;
    double current_tolerance_ka = 0.0;
};

/// Everything a pipeline run reads. Files produced by the CLI live in
/// `output_dir`.
struct PipelineConfig {
    std::uint64_t seed = 42;
    std::string network = "builtin:ieee33";
    SecurityLimits limits;
    DatasetConfig dataset;
    TrainConfig train;
    ScenarioConfig scenario;
    DispatchConfig dispatch;
    ValidationConfig validation;
    std::string output_dir = "out";

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
    std::vector<int> widths(std::size_t input_size) const;
};

/// Missing keys keep their defaults; unknown keys are a ParseError.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

}  // namespace secd
