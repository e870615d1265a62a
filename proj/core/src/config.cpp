#include "secd/config.hpp"

#include <set>

#include <fmt/core.h>

#include "csv.hpp"
#include "json.hpp"

namespace secd {

using nlohmann::json;

DispatchOptions DispatchConfig::options(DispatchMode mode) const {
    DispatchOptions o;
    o.p2.mode = mode;
    o.p2.encoding = encoding;
    o.p2.safety_margin = safety_margin;
    o.p2.clip_to_training_domain = clip_to_training_domain;
    o.solver.relative_gap = relative_gap;
    o.solver.node_limit = node_limit;
    o.solver.time_limit_seconds = time_limit_seconds;
    o.solver.heuristic_every = heuristic_every;
    o.triage = triage;
    o.triage_node_limit = triage_node_limit;
    return o;
}

void PipelineConfig::validate() const {
    limits.validate();
    dataset.sampling.validate();
    scenario.validate();
    if (dataset.samples < 2) throw InvalidArgument("config: dataset.samples must be at least 2");
    if (!(dataset.unsafe_fraction >= 0.0 && dataset.unsafe_fraction <= 1.0))
        throw InvalidArgument("config: dataset.unsafe_fraction must be in [0, 1]");
    if (!(dataset.train_fraction > 0.0 && dataset.train_fraction < 1.0))
        throw InvalidArgument("config: dataset.train_fraction must be in (0, 1)");
    if (train.hidden.empty()) throw InvalidArgument("config: train.hidden needs at least one layer");
    for (int w : train.hidden)
        if (w <= 0) throw InvalidArgument("config: hidden widths must be positive");
    if (train.hyper.epochs <= 0 || train.hyper.batch_size <= 0 || !(train.hyper.learning_rate > 0.0))
        throw InvalidArgument("config: epochs, batch_size and learning_rate must be positive");
    if (!(dispatch.relative_gap >= 0.0)) throw InvalidArgument("config: dispatch.relative_gap must be >= 0");
    if (!(dispatch.time_limit_seconds > 0.0)) throw InvalidArgument("config: dispatch.time_limit_seconds must be > 0");
    if (!(dispatch.encoding.safety_factor >= 1.0)) throw InvalidArgument("config: encoding.safety_factor must be >= 1");
    if (!(dispatch.encoding.global_m > 0.0)) throw InvalidArgument("config: encoding.global_m must be > 0");
    if (!(dispatch.acceptable_gap >= 0.0)) throw InvalidArgument("config: dispatch.acceptable_gap must be >= 0");
    if (dispatch.node_limit == 0) throw InvalidArgument("config: dispatch.node_limit must be positive");
    if (!(validation.voltage_tolerance_pu >= 0.0) || !(validation.current_tolerance_ka >= 0.0))
        throw InvalidArgument("config: validation tolerances must be >= 0");
}

std::vector<int> PipelineConfig::widths(std::size_t input_size) const {
    std::vector<int> w{static_cast<int>(input_size)};
    w.insert(w.end(), train.hidden.begin(), train.hidden.end());
    w.push_back(2);
    return w;
}

namespace {

// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(fmt::format("config: '{}' must be an object", path_));
    }
    void done() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ParseError(fmt::format("config: unknown key '{}{}'", prefix(), key));
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ParseError(fmt::format("config: '{}{}' has the wrong type", prefix(), key));
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    Section child(const std::string& key) { return Section(j_.at(key), prefix() + key); }

private:
    std::string prefix() const { return path_.empty() ? "" : path_ + "."; }
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("config: {}", e.what()));
    }
    PipelineConfig c;
    {
        Section root(j, "");
        root.get("seed", c.seed);
        root.get("network", c.network);
        root.get("output_dir", c.output_dir);
        if (root.has("limits")) {
            Section s = root.child("limits");
            s.get("v_min", c.limits.v_min);
            s.get("v_max", c.limits.v_max);
            s.get("i_max_ka", c.limits.i_max);
            s.done();
        }
        if (root.has("dataset")) {
            Section s = root.child("dataset");
            s.get("samples", c.dataset.samples);
            s.get("unsafe_fraction", c.dataset.unsafe_fraction);
            s.get("train_fraction", c.dataset.train_fraction);
            s.get("workers", c.dataset.workers);
            s.get("draw_budget", c.dataset.draw_budget);
            if (s.has("sampling")) {
                Section b = s.child("sampling");
                SamplingConfig& m = c.dataset.sampling;
                b.get("active_scale_lo", m.active_scale_lo);
                b.get("active_scale_hi", m.active_scale_hi);
                b.get("reactive_scale_lo", m.reactive_scale_lo);
                b.get("reactive_scale_hi", m.reactive_scale_hi);
                b.get("pv_capacity_mw", m.pv_capacity);
                b.get("load_correlation", m.load_correlation);
                b.get("pv_correlation", m.pv_correlation);
                b.get("randomize_correlation", m.randomize_correlation);
                b.done();
            }
            s.done();
        }
        if (root.has("train")) {
            Section s = root.child("train");
            s.get("hidden", c.train.hidden);
            s.get("epochs", c.train.hyper.epochs);
            s.get("batch_size", c.train.hyper.batch_size);
            s.get("learning_rate", c.train.hyper.learning_rate);
            s.get("momentum", c.train.hyper.momentum);
            s.get("decay_factor", c.train.hyper.decay_factor);
            s.get("decay_every", c.train.hyper.decay_every);
            s.get("loss_fit_safe_only", c.train.loss_fit_safe_only);
            s.done();
        }
        if (root.has("scenario")) {
            Section s = root.child("scenario");
            ScenarioConfig& m = c.scenario;
            s.get("horizon", m.horizon);
            s.get("ambient_mean_c", m.ambient_mean);
            s.get("ambient_amplitude_c", m.ambient_amplitude);
            s.get("ambient_peak_hour", m.ambient_peak_hour);
            s.get("heat_gain_mw_per_c", m.heat_gain);
            s.get("heat_base_temp_c", m.heat_base_temp);
            s.get("pv_capacity_mw", m.pv_capacity);
            s.get("pv_sunrise", m.pv_sunrise);
            s.get("pv_sunset", m.pv_sunset);
            s.get("load_profile", m.load_profile);
            s.get("heavy_scale", m.heavy_scale);
            s.get("light_scale", m.light_scale);
            s.get("price_buy", m.price_buy);
            s.get("price_sell", m.price_sell);
            s.get("theta_initial_c", m.theta_initial);
            s.get("cooling_headroom", m.cooling_headroom);
            s.get("capacitance_mwh_per_c", m.thermal.capacitance);
            s.get("resistance_c_per_mw", m.thermal.resistance);
            s.get("cop", m.thermal.cop);
            s.get("dt_h", m.thermal.dt);
            s.get("theta_min_c", m.comfort.theta_min);
            s.get("theta_max_c", m.comfort.theta_max);
            s.get("weather_csv", m.weather_csv);
            s.done();
        }
        if (root.has("dispatch")) {
            Section s = root.child("dispatch");
            DispatchConfig& m = c.dispatch;
            s.get("safety_margin", m.safety_margin);
            s.get("clip_to_training_domain", m.clip_to_training_domain);
            s.get("tighten", m.encoding.tighten);
            s.get("global_m", m.encoding.global_m);
            s.get("safety_factor", m.encoding.safety_factor);
            s.get("relative_gap", m.relative_gap);
            s.get("node_limit", m.node_limit);
            s.get("time_limit_seconds", m.time_limit_seconds);
            s.get("heuristic_every", m.heuristic_every);
            s.get("acceptable_gap", m.acceptable_gap);
            s.get("triage", m.triage);
            s.get("triage_node_limit", m.triage_node_limit);
            s.done();
        }
        if (root.has("validation")) {
            Section s = root.child("validation");
            s.get("voltage_tolerance_pu", c.validation.voltage_tolerance_pu);
            s.get("current_tolerance_ka", c.validation.current_tolerance_ka);
            s.done();
        }
        root.done();
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const PipelineConfig& c) {
    const SamplingConfig& sm = c.dataset.sampling;
    const ScenarioConfig& sc = c.scenario;
    const DispatchConfig& d = c.dispatch;
    json j;
    j["seed"] = c.seed;
    j["network"] = c.network;
    j["output_dir"] = c.output_dir;
    j["limits"] = {{"v_min", c.limits.v_min}, {"v_max", c.limits.v_max}, {"i_max_ka", c.limits.i_max}};
    j["dataset"] = {{"samples", c.dataset.samples},
                    {"unsafe_fraction", c.dataset.unsafe_fraction},
                    {"train_fraction", c.dataset.train_fraction},
                    {"workers", c.dataset.workers},
                    {"draw_budget", c.dataset.draw_budget},
                    {"sampling",
                     {{"active_scale_lo", sm.active_scale_lo},
                      {"active_scale_hi", sm.active_scale_hi},
                      {"reactive_scale_lo", sm.reactive_scale_lo},
                      {"reactive_scale_hi", sm.reactive_scale_hi},
                      {"pv_capacity_mw", sm.pv_capacity},
                      {"load_correlation", sm.load_correlation},
                      {"pv_correlation", sm.pv_correlation},
                      {"randomize_correlation", sm.randomize_correlation}}}};
    j["train"] = {{"hidden", c.train.hidden},
                  {"epochs", c.train.hyper.epochs},
                  {"batch_size", c.train.hyper.batch_size},
                  {"learning_rate", c.train.hyper.learning_rate},
                  {"momentum", c.train.hyper.momentum},
                  {"decay_factor", c.train.hyper.decay_factor},
                  {"decay_every", c.train.hyper.decay_every},
                  {"loss_fit_safe_only", c.train.loss_fit_safe_only}};
    j["scenario"] = {{"horizon", sc.horizon},
                     {"ambient_mean_c", sc.ambient_mean},
                     {"ambient_amplitude_c", sc.ambient_amplitude},
                     {"ambient_peak_hour", sc.ambient_peak_hour},
                     {"heat_gain_mw_per_c", sc.heat_gain},
                     {"heat_base_temp_c", sc.heat_base_temp},
                     {"pv_capacity_mw", sc.pv_capacity},
                     {"pv_sunrise", sc.pv_sunrise},
                     {"pv_sunset", sc.pv_sunset},
                     {"load_profile", sc.load_profile},
                     {"heavy_scale", sc.heavy_scale},
                     {"light_scale", sc.light_scale},
                     {"price_buy", sc.price_buy},
                     {"price_sell", sc.price_sell},
                     {"theta_initial_c", sc.theta_initial},
                     {"cooling_headroom", sc.cooling_headroom},
                     {"capacitance_mwh_per_c", sc.thermal.capacitance},
                     {"resistance_c_per_mw", sc.thermal.resistance},
                     {"cop", sc.thermal.cop},
                     {"dt_h", sc.thermal.dt},
                     {"theta_min_c", sc.comfort.theta_min},
                     {"theta_max_c", sc.comfort.theta_max},
                     {"weather_csv", sc.weather_csv}};
    j["dispatch"] = {{"safety_margin", d.safety_margin},
                     {"clip_to_training_domain", d.clip_to_training_domain},
                     {"tighten", d.encoding.tighten},
                     {"global_m", d.encoding.global_m},
                     {"safety_factor", d.encoding.safety_factor},
                     {"relative_gap", d.relative_gap},
                     {"node_limit", d.node_limit},
                     {"time_limit_seconds", d.time_limit_seconds},
                     {"heuristic_every", d.heuristic_every},
                     {"acceptable_gap", d.acceptable_gap},
                     {"triage", d.triage},
                     {"triage_node_limit", d.triage_node_limit}};
    j["validation"] = {{"voltage_tolerance_pu", c.validation.voltage_tolerance_pu},
                       {"current_tolerance_ka", c.validation.current_tolerance_ka}};
    return j.dump(2) + "\n";
}

}  // namespace secd
