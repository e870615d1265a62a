#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "secd/error.hpp"

namespace secd {

/// Aggregated single-zone RC building model.
struct ThermalParams {
    double capacitance = 1.0;  // MWh/degC
    double resistance = 50.0;  // degC/MW
    double cop = 3.6;
    double dt = 1.0;  // h

    void validate() const;
};

/// Coefficients of the discretized zone recursion
/// theta[t+1] = alpha*theta[t] + beta*(q_h[t] - q_c[t]) + gamma*theta_out[t].
struct ThermalCoefficients {
    double alpha = 0.0;
    double beta = 0.0;   // degC per MWh
    double gamma = 0.0;
};

struct ComfortBand {
    double theta_min = 24.0;
    double theta_max = 28.0;
};

struct ZoneTrajectory {
    std::vector<double> theta_in;   // degC
    std::vector<double> heat_load;  // q_h, MW
    std::vector<double> cooling;    // q_c, MW
    std::vector<double> ambient;    // degC
};

/// Throws InvalidArgument when dt/(R*C) >= 1.
ThermalCoefficients discretize(const ThermalParams& params);

inline double step(double theta_prev, double heat_load, double cooling, double theta_out,
                   const ThermalCoefficients& coef) {
    return coef.alpha * theta_prev + coef.beta * (heat_load - cooling) + coef.gamma * theta_out;
}

/// Electrical power of a cooling plant. Reactive draw is zero.
double cooling_power(double cooling, double cop);

/// Rolls `step` forward from theta0; result[t] is the temperature at the
/// end of slot t.
std::vector<double> simulate(double theta0, const std::vector<double>& heat_load,
                             const std::vector<double>& cooling, const std::vector<double>& ambient,
                             const ThermalCoefficients& coef);

struct ComfortCheck {
    bool ok = true;
    std::optional<std::size_t> first_violation;
};

/// Closed interval check on every temperature of the trajectory.
ComfortCheck check_comfort(const ZoneTrajectory& trajectory, const ComfortBand& band,
                           double tolerance = 0.0);

/// Ambient / heat-load profile read from CSV with header
/// `slot,theta_out,q_h` (q_h is the feeder total, MW).
struct WeatherProfile {
    std::vector<double> ambient;
    std::vector<double> heat_load;
};

WeatherProfile load_weather_csv(const std::filesystem::path& path);
void save_weather_csv(const WeatherProfile& profile, const std::filesystem::path& path);

}  // namespace secd
