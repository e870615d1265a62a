#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "secd/network.hpp"
#include "secd/powerflow.hpp"

namespace secd {

/// Per-bus active demand, reactive demand and used PV for one time slot.
/// Flattened feature order is [P_1..P_I, Q_1..Q_I, PV_1..PV_I].
struct OperationVector {
    std::vector<double> active;    // MW
    std::vector<double> reactive;  // MVAr
    std::vector<double> pv;        // MW

    static OperationVector zeros(std::size_t bus_count);
    std::size_t bus_count() const { return active.size(); }
    Eigen::VectorXd features() const;
    static OperationVector from_features(const Eigen::VectorXd& f);
    InjectionProfile injections() const;
};

enum class SecurityLabel { Safe, Unsafe };

struct LabeledSample {
    OperationVector x;
    SecurityLabel label = SecurityLabel::Safe;
    double loss = 0.0;  // MW
};

/// Uniform boxes around the nominal operating point. Each bus factor is
/// `rho * s + (1 - rho) * u_i` with a feeder-wide draw `s` and a per-bus
/// draw `u_i`, both uniform on the box, so every component stays inside
/// its box with the box midpoint as mean. `rho = 0` gives fully
/// independent components. With `randomize_correlation` each sample
/// draws its own rho uniformly in [0, configured value).
struct SamplingConfig {
    double active_scale_lo = 0.3;
    double active_scale_hi = 2.0;
    double reactive_scale_lo = 0.3;
    double reactive_scale_hi = 2.0;
    double pv_capacity = 1.5;  // MW available at every PV bus
    double load_correlation = 0.85;
    double pv_correlation = 0.85;
    bool randomize_correlation = true;

    void validate() const;
};

struct DatasetMetadata {
    std::uint64_t seed = 0;
    std::string network_hash;
    SecurityLimits limits;
    SamplingConfig sampling;
    double target_unsafe_fraction = 0.0;
    std::uint64_t draws = 0;
    std::uint64_t discarded_nonconvergent = 0;
    std::vector<int> bus_ids;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    DatasetMetadata metadata;

    std::size_t size() const { return samples.size(); }
    std::size_t count(SecurityLabel label) const;
    std::size_t feature_count() const;
};

/// Deterministic 64-bit generator (splitmix64) used for all sampling so
/// that datasets are bit-identical across platforms and thread counts.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Seed for the `index`-th draw of a run seeded with `seed`.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

OperationVector sample_operation_vector(SplitMix64& rng, const Network& network,
                                        const SamplingConfig& config);

struct LabelResult {
    bool converged = false;
    SecurityLabel label = SecurityLabel::Safe;
    double loss = 0.0;
};

/// Runs the power-flow oracle on x and classifies it against the limits.
LabelResult label(const Network& network, const OperationVector& x, const SecurityLimits& limits);

struct GenerateOptions {
    SamplingConfig sampling;
    std::uint64_t draw_budget = 0;  // 0 means 50 * n
    unsigned workers = 1;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

/// Stratified rejection sampling: draws are processed in index order and
/// accepted while their class quota is open, so the result depends only
/// on the seed, never on the worker count.
Dataset generate(const Network& network, const SecurityLimits& limits, std::size_t n,
                 double target_unsafe_fraction, std::uint64_t seed,
                 const GenerateOptions& options = {});

struct DatasetSplit {
    Dataset train;
    Dataset test;
};

/// Seeded shuffle, train gets floor(n * train_fraction) samples.
DatasetSplit split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

/// CSV with columns P_<id>.., Q_<id>.., PV_<id>.., label, loss_mw and a
/// JSON sidecar `<path>.meta.json`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& csv_path);
Dataset load_dataset(const std::filesystem::path& csv_path);
std::string dataset_csv_header(const std::vector<int>& bus_ids);

}  // namespace secd
