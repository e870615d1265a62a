#include "secd/pipeline.hpp"

#include <thread>

#include <fmt/core.h>

#include "json.hpp"

namespace secd {

Scenario reference_scenario(const Network& network, const ScenarioConfig& config, const std::string& name) {
    if (name == "heavy") return make_scenario(network, config, config.heavy_scale, name);
    if (name == "light") return make_scenario(network, config, config.light_scale, name);
    throw InvalidArgument(fmt::format("unknown scenario '{}' (expected heavy or light)", name));
}

Dataset generate_dataset(const Network& network, const PipelineConfig& config) {
    GenerateOptions options;
    options.sampling = config.dataset.sampling;
    options.draw_budget = config.dataset.draw_budget;
    options.workers = config.dataset.workers > 0 ? config.dataset.workers : std::max(1u, std::thread::hardware_concurrency());
    return generate(network, config.limits, config.dataset.samples, config.dataset.unsafe_fraction, config.seed, options);
}

TrainedModels train_models(const Dataset& data, const PipelineConfig& config) {
    const DatasetSplit parts = split(data, config.dataset.train_fraction, config.seed);
    TrainedModels out;
    out.train_size = parts.train.size();
    out.test_size = parts.test.size();
    auto [mlp, report] = train_mlp(parts.train, config.widths(data.feature_count()), config.train.hyper, config.seed,
                                   &parts.test);
    out.mlp = std::move(mlp);
    out.report = std::move(report);
    if (config.train.loss_fit_safe_only) {
        Dataset safe;
        safe.metadata = parts.train.metadata;
        for (const LabeledSample& s : parts.train.samples)
            if (s.label == SecurityLabel::Safe) safe.samples.push_back(s);
        out.lr = fit_lr(safe.size() > 0 ? safe : parts.train);
    } else {
        out.lr = fit_lr(parts.train);
    }
    return out;
}

std::string train_report_json(const TrainedModels& m) {
    const Confusion& c = m.report.confusion;
    nlohmann::json j;
    j["train_samples"] = m.train_size;
    j["test_samples"] = m.test_size;
    j["accuracy"] = m.report.accuracy;
    j["false_safe_rate"] = m.report.false_safe_rate;
    j["confusion"] = {{"true_unsafe", c.true_unsafe},
                      {"false_safe", c.false_safe},
                      {"true_safe", c.true_safe},
                      {"false_unsafe", c.false_unsafe}};
    j["epoch_loss"] = m.report.epoch_loss;
    j["epoch_test_accuracy"] = m.report.epoch_test_accuracy;
    return j.dump(2) + "\n";
}

}  // namespace secd
