#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "secd/powerflow.hpp"

namespace secd::testing {

// Gauss-Seidel on the bus admittance matrix, an independent oracle for
// the sweep. Returns voltages and total loss in MW.
struct GaussSeidel {
    std::vector<std::complex<double>> v;
    double loss_mw = 0.0;
};

inline GaussSeidel gauss_seidel(const Network& net, const InjectionProfile& inj) {
    const std::size_t n = net.bus_count();
    const double zb = net.base_impedance();
    std::vector<std::vector<std::complex<double>>> y(n, std::vector<std::complex<double>>(n, 0.0));
    for (const Branch& b : net.branches()) {
        const std::size_t i = net.index_of(b.from_bus), j = net.index_of(b.to_bus);
        const std::complex<double> yij = 1.0 / std::complex<double>(b.resistance / zb, b.reactance / zb);
        y[i][i] += yij;
        y[j][j] += yij;
        y[i][j] -= yij;
        y[j][i] -= yij;
    }
    std::vector<std::complex<double>> v(n, 1.0);
    for (int it = 0; it < 200000; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == net.slack_index()) continue;
            const std::complex<double> s = -std::complex<double>(inj.active[i], inj.reactive[i]) / net.base_mva();
            std::complex<double> sum = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) sum += y[i][j] * v[j];
            const std::complex<double> next = (std::conj(s) / std::conj(v[i]) - sum) / y[i][i];
            change = std::max(change, std::abs(next - v[i]));
            v[i] = next;
        }
        if (change < 1e-13) break;
    }
    GaussSeidel out{v, 0.0};
    for (const Branch& b : net.branches()) {
        const std::size_t i = net.index_of(b.from_bus), j = net.index_of(b.to_bus);
        const std::complex<double> z(b.resistance / zb, b.reactance / zb);
        const std::complex<double> current = (v[i] - v[j]) / z;
        out.loss_mw += std::norm(current) * z.real() * net.base_mva();
    }
    return out;
}

}  // namespace secd::testing
