#pragma once

#include <cstdint>
#include <string>

#include "secd/config.hpp"

namespace secd {

/// "heavy" or "light" reference day on the configured scenario constants.
Scenario reference_scenario(const Network& network, const ScenarioConfig& config, const std::string& name);

Dataset generate_dataset(const Network& network, const PipelineConfig& config);

struct TrainedModels {
    MlpModel mlp;
    LrModel lr;
    TrainReport report;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

/// Splits `data` with the config seed, trains the classifier on the
/// training part, scores it on the held-out part and fits the loss model.
TrainedModels train_models(const Dataset& data, const PipelineConfig& config);

/// Training summary as JSON (accuracy, confusion, per-epoch curves).
std::string train_report_json(const TrainedModels& models);

}  // namespace secd
