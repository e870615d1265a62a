#include "secd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

namespace secd {

std::vector<double> default_load_profile() {
    return {0.527, 0.493, 0.468, 0.459, 0.468, 0.510, 0.578, 0.646, 0.697, 0.722, 0.739, 0.748,
            0.748, 0.739, 0.739, 0.748, 0.782, 0.833, 0.884, 0.918, 0.901, 0.833, 0.731, 0.612};
}

void ScenarioConfig::validate() const {
    thermal.validate();
    if (horizon == 0) throw InvalidArgument("scenario: horizon must be positive");
    if (!load_profile.empty() && load_profile.size() != horizon)
        throw InvalidArgument(fmt::format("scenario: load profile has {} values for a horizon of {}",
                                          load_profile.size(), horizon));
    for (double v : load_profile)
        if (!(v >= 0.0)) throw InvalidArgument("scenario: load profile values must be >= 0");
    if (price_buy < 0.0 || price_sell < 0.0) throw InvalidArgument("scenario: prices must be >= 0");
    if (pv_capacity < 0.0 || heat_gain < 0.0) throw InvalidArgument("scenario: pv capacity and heat gain must be >= 0");
    if (!(pv_sunset > pv_sunrise)) throw InvalidArgument("scenario: sunset must follow sunrise");
    if (!(comfort.theta_min < comfort.theta_max)) throw InvalidArgument("scenario: empty comfort band");
    if (theta_initial < comfort.theta_min || theta_initial > comfort.theta_max)
        throw InvalidArgument("scenario: initial temperature outside the comfort band");
    if (!(cooling_headroom >= 1.0)) throw InvalidArgument("scenario: cooling headroom must be >= 1");
    if (heavy_scale < 0.0 || light_scale < 0.0) throw InvalidArgument("scenario: load scales must be >= 0");
}

void Scenario::validate() const {
    thermal.validate();
    const std::size_t n = bus_ids.size();
    auto check = [&](const std::vector<std::vector<double>>& s, const char* what) {
        if (s.size() != horizon) throw InvalidArgument(fmt::format("scenario: {} has {} slots, horizon is {}", what, s.size(), horizon));
        for (const auto& row : s)
            if (row.size() != n) throw InvalidArgument(fmt::format("scenario: {} row has the wrong bus count", what));
    };
    if (ambient.size() != horizon) throw InvalidArgument("scenario: ambient series has the wrong length");
    check(active, "active load");
    check(reactive, "reactive load");
    check(pv_available, "available PV");
    check(heat_load, "heat load");
    if (cooling_max.size() != n) throw InvalidArgument("scenario: cooling cap has the wrong bus count");
    if (price_buy < 0.0 || price_sell < 0.0) throw InvalidArgument("scenario: prices must be >= 0");
    std::vector<char> has_pv(n, 0);
    for (std::size_t b : pv_buses) has_pv.at(b) = 1;
    for (std::size_t t = 0; t < horizon; ++t)
        for (std::size_t b = 0; b < n; ++b) {
            if (pv_available[t][b] < 0.0 || (!has_pv[b] && pv_available[t][b] != 0.0))
                throw InvalidArgument(fmt::format("scenario: invalid available PV at slot {} bus {}", t, bus_ids[b]));
            if (heat_load[t][b] < 0.0) throw InvalidArgument("scenario: heat load must be >= 0");
        }
}

Scenario make_scenario(const Network& network, const ScenarioConfig& config, double load_scale,
                       const std::string& name) {
    config.validate();
    const std::size_t T = config.horizon, n = network.bus_count();
    std::vector<double> profile = config.load_profile.empty() ? default_load_profile() : config.load_profile;
    if (profile.size() != T)
        throw InvalidArgument(fmt::format("scenario: load profile has {} values for a horizon of {}", profile.size(), T));

    Scenario s;
    s.name = name;
    s.horizon = T;
    s.price_buy = config.price_buy;
    s.price_sell = config.price_sell;
    s.load_scale = load_scale;
    s.theta_initial = config.theta_initial;
    s.thermal = config.thermal;
    s.comfort = config.comfort;
    for (const Bus& b : network.buses()) s.bus_ids.push_back(b.id);
    for (std::size_t b = 0; b < n; ++b)
        if (b != network.slack_index()) s.zones.push_back(b);
    for (int id : network.pv_buses()) s.pv_buses.push_back(network.index_of(id));
    std::sort(s.pv_buses.begin(), s.pv_buses.end());

    std::vector<double> total_heat(T);
    if (!config.weather_csv.empty()) {
        WeatherProfile w = load_weather_csv(config.weather_csv);
        if (w.ambient.size() != T) throw InvalidArgument("scenario: weather file length differs from the horizon");
        s.ambient = w.ambient;
        total_heat = w.heat_load;
    } else {
        for (std::size_t t = 0; t < T; ++t) {
            const double hour = (static_cast<double>(t) + 0.5) * config.thermal.dt;
            s.ambient.push_back(config.ambient_mean + config.ambient_amplitude *
                                                          std::cos(2.0 * std::numbers::pi * (hour - config.ambient_peak_hour) / 24.0));
            total_heat[t] = config.heat_gain * std::max(0.0, s.ambient[t] - config.heat_base_temp);
        }
    }

    double zone_load = 0.0;
    for (std::size_t b : s.zones) zone_load += network.buses()[b].base_active_load;
    const double max_ambient = *std::max_element(s.ambient.begin(), s.ambient.end());
    s.active.assign(T, std::vector<double>(n, 0.0));
    s.reactive.assign(T, std::vector<double>(n, 0.0));
    s.pv_available.assign(T, std::vector<double>(n, 0.0));
    s.heat_load.assign(T, std::vector<double>(n, 0.0));
    s.cooling_max.assign(n, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double hour = (static_cast<double>(t) + 0.5) * config.thermal.dt;
        const double sun = std::sin(std::numbers::pi * (hour - config.pv_sunrise) / (config.pv_sunset - config.pv_sunrise));
        const double pv = hour > config.pv_sunrise && hour < config.pv_sunset ? config.pv_capacity * std::max(0.0, sun) : 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const Bus& bus = network.buses()[b];
            s.active[t][b] = load_scale * profile[t] * bus.base_active_load;
            s.reactive[t][b] = load_scale * profile[t] * bus.base_reactive_load;
        }
        for (std::size_t b : s.pv_buses) s.pv_available[t][b] = pv;
        if (zone_load > 0.0)
            for (std::size_t b : s.zones)
                s.heat_load[t][b] = load_scale * total_heat[t] * network.buses()[b].base_active_load / zone_load;
    }
    const double leak = std::max(0.0, max_ambient - config.comfort.theta_min) / config.thermal.resistance;
    for (std::size_t b : s.zones) {
        double peak = 0.0;
        for (std::size_t t = 0; t < T; ++t) peak = std::max(peak, s.heat_load[t][b]);
        s.cooling_max[b] = config.cooling_headroom * (peak + leak);
    }
    s.validate();
    return s;
}

}  // namespace secd
