#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "secd/network.hpp"
#include "secd/thermal.hpp"

namespace secd {

/// Constants of the synthetic 24-hour day. Ambient is a cosine peaking at
/// `ambient_peak_hour`; the feeder heat load is
/// heat_gain * max(0, ambient - heat_base_temp), split over zones in
/// proportion to base active load; available PV is a half-sine between
/// sunrise and sunset scaled to `pv_capacity` at every PV bus.
struct ScenarioConfig {
    std::size_t horizon = 24;
    double ambient_mean = 31.0;
    double ambient_amplitude = 3.0;
    double ambient_peak_hour = 15.0;
    double heat_gain = 0.6;        // MW per degC
    double heat_base_temp = 26.0;  // degC
    double pv_capacity = 1.0;      // MW per PV bus
    double pv_sunrise = 6.0;
    double pv_sunset = 19.0;
    std::vector<double> load_profile;  // multiplier on nominal load per slot
    double heavy_scale = 1.0;
    double light_scale = 0.5;
    double price_buy = 0.1122;   // $/kWh
    double price_sell = 0.056;   // $/kWh
    double theta_initial = 28.0;
    double cooling_headroom = 2.5;  // q_c cap over the hold-at-theta_min requirement
    ThermalParams thermal;
    ComfortBand comfort;
    std::string weather_csv;  // optional override of ambient and total heat load

    void validate() const;
};

std::vector<double> default_load_profile();

/// Fully expanded dispatch input. Per-slot series are indexed [t][bus]
/// in network bus order; the load scale is already applied.
struct Scenario {
    std::string name;
    std::size_t horizon = 0;
    std::vector<int> bus_ids;
    std::vector<std::size_t> zones;      // bus indices with a thermal zone
    std::vector<std::size_t> pv_buses;   // bus indices with PV
    std::vector<double> ambient;
    std::vector<std::vector<double>> active;        // P_e, MW
    std::vector<std::vector<double>> reactive;      // Q, MVAr
    std::vector<std::vector<double>> pv_available;  // G_av, MW
    std::vector<std::vector<double>> heat_load;     // q_h, MW
    std::vector<double> cooling_max;                // per bus, MW (0 without zone)
    double price_buy = 0.0;
    double price_sell = 0.0;
    double load_scale = 1.0;
    double theta_initial = 28.0;
    ThermalParams thermal;
    ComfortBand comfort;

    /// Throws InvalidArgument on ragged series, negative prices or PV at
    /// a bus without a PV station.
    void validate() const;
    std::size_t bus_count() const { return bus_ids.size(); }
};

/// Synthetic scenario on `network` at the given load scale.
Scenario make_scenario(const Network& network, const ScenarioConfig& config, double load_scale,
                       const std::string& name);

}  // namespace secd
