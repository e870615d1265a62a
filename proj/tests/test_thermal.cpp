#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "secd/thermal.hpp"

using namespace secd;

TEST_CASE("discretization of the reference building") {
    const ThermalCoefficients c = discretize(ThermalParams{});
    CHECK(c.gamma == doctest::Approx(1.0 / 50.0));
    CHECK(c.alpha == doctest::Approx(1.0 - 1.0 / 50.0));
    CHECK(c.beta == doctest::Approx(1.0));
    CHECK(c.alpha + c.gamma == doctest::Approx(1.0));
    CHECK_THROWS_AS(discretize(ThermalParams{1.0, 0.5, 3.6, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(discretize(ThermalParams{0.0, 50.0, 3.6, 1.0}), InvalidArgument);
}

TEST_CASE("steady state balances leakage and cooling") {
    const ThermalCoefficients c = discretize(ThermalParams{});
    // Holding 26 degC against 32 degC ambient with 0.1 MW internal gain
    // needs q_c = q_h + (out - in) / R.
    const double qc = 0.1 + (32.0 - 26.0) / 50.0;
    CHECK(step(26.0, 0.1, qc, 32.0, c) == doctest::Approx(26.0));
    const std::vector<double> theta = simulate(26.0, std::vector<double>(10, 0.1), std::vector<double>(10, qc),
                                               std::vector<double>(10, 32.0), c);
    for (double t : theta) CHECK(t == doctest::Approx(26.0));
}

TEST_CASE("recursion matches a hand roll") {
    const ThermalCoefficients c = discretize(ThermalParams{2.0, 20.0, 3.0, 1.0});
    double theta = 27.0;
    const std::vector<double> qh{0.2, 0.3, 0.1}, qc{0.5, 0.0, 0.4}, out{30.0, 31.0, 29.0};
    const std::vector<double> sim = simulate(27.0, qh, qc, out, c);
    for (std::size_t t = 0; t < 3; ++t) {
        theta = (1.0 - 1.0 / 40.0) * theta + 0.5 * (qh[t] - qc[t]) + out[t] / 40.0;
        CHECK(sim[t] == doctest::Approx(theta).epsilon(1e-12));
    }
    CHECK_THROWS_AS(simulate(27.0, qh, {0.1}, out, c), InvalidArgument);
}

TEST_CASE("cooling power and comfort checks") {
    CHECK(cooling_power(3.6, 3.6) == doctest::Approx(1.0));
    CHECK(cooling_power(0.0, 3.6) == 0.0);
    CHECK_THROWS_AS(cooling_power(-1.0, 3.6), InvalidArgument);
    CHECK_THROWS_AS(cooling_power(1.0, 0.0), InvalidArgument);

    ZoneTrajectory z;
    z.theta_in = {24.0, 26.0, 28.0};
    CHECK(check_comfort(z, ComfortBand{}).ok);
    z.theta_in = {24.0, 28.0 + 1e-6, 27.0};
    const ComfortCheck bad = check_comfort(z, ComfortBand{});
    CHECK_FALSE(bad.ok);
    CHECK(bad.first_violation == 1u);
    CHECK(check_comfort(z, ComfortBand{}, 1e-5).ok);
}

TEST_CASE("weather csv round trip") {
    std::filesystem::create_directories(SECD_TEST_TMP);
    const std::filesystem::path path = std::filesystem::path(SECD_TEST_TMP) / "weather.csv";
    const WeatherProfile w{{30.0, 31.5, 33.25}, {1.0, 2.5, 0.125}};
    save_weather_csv(w, path);
    const WeatherProfile back = load_weather_csv(path);
    CHECK(back.ambient == w.ambient);
    CHECK(back.heat_load == w.heat_load);
    CHECK_THROWS_AS(load_weather_csv(std::filesystem::path(SECD_TEST_TMP) / "missing.csv"), Error);
}
