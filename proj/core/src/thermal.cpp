#include "secd/thermal.hpp"

#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "csv.hpp"

namespace secd {

void ThermalParams::validate() const {
    if (!(capacitance > 0.0 && resistance > 0.0 && cop > 0.0 && dt > 0.0))
        throw InvalidArgument("thermal parameters must be strictly positive");
    if (!(dt / (resistance * capacitance) < 1.0))
        throw InvalidArgument(fmt::format("unstable discretization: dt/(R*C) = {} >= 1",
                                          dt / (resistance * capacitance)));
}

ThermalCoefficients discretize(const ThermalParams& params) {
    params.validate();
    ThermalCoefficients c;
    c.gamma = params.dt / (params.resistance * params.capacitance);
    c.alpha = 1.0 - c.gamma;
    c.beta = params.dt / params.capacitance;
    return c;
}

double cooling_power(double cooling, double cop) {
    if (cooling < 0.0) throw InvalidArgument("cooling supply must be non-negative");
    if (!(cop > 0.0)) throw InvalidArgument("COP must be positive");
    return cooling / cop;
}

std::vector<double> simulate(double theta0, const std::vector<double>& heat_load,
                             const std::vector<double>& cooling, const std::vector<double>& ambient,
                             const ThermalCoefficients& coef) {
    if (heat_load.size() != cooling.size() || cooling.size() != ambient.size())
        throw InvalidArgument("thermal series lengths differ");
    std::vector<double> theta(heat_load.size());
    double prev = theta0;
    for (std::size_t t = 0; t < theta.size(); ++t) {
        prev = step(prev, heat_load[t], cooling[t], ambient[t], coef);
        theta[t] = prev;
    }
    return theta;
}

ComfortCheck check_comfort(const ZoneTrajectory& trajectory, const ComfortBand& band,
                           double tolerance) {
    for (std::size_t t = 0; t < trajectory.theta_in.size(); ++t) {
        double th = trajectory.theta_in[t];
        if (th < band.theta_min - tolerance || th > band.theta_max + tolerance)
            return {false, t};
    }
    return {};
}

WeatherProfile load_weather_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    std::size_t c_out = table.column("theta_out");
    std::size_t c_qh = table.column("q_h");
    WeatherProfile p;
    for (const auto& row : table.rows) {
        p.ambient.push_back(parse_double(row.at(c_out)));
        p.heat_load.push_back(parse_double(row.at(c_qh)));
    }
    return p;
}

void save_weather_csv(const WeatherProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    out << "slot,theta_out,q_h\n";
    for (std::size_t t = 0; t < profile.ambient.size(); ++t)
        out << t << ',' << format_double(profile.ambient[t]) << ','
            << format_double(profile.heat_load[t]) << '\n';
}

}  // namespace secd
