#include "secd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/core.h>

#include "csv.hpp"
#include "json.hpp"

namespace secd {

OperationVector OperationVector::zeros(std::size_t bus_count) {
    return {std::vector<double>(bus_count, 0.0), std::vector<double>(bus_count, 0.0),
            std::vector<double>(bus_count, 0.0)};
}

Eigen::VectorXd OperationVector::features() const {
    const std::size_t n = bus_count();
    Eigen::VectorXd f(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = active[i];
        f[n + i] = reactive[i];
        f[2 * n + i] = pv[i];
    }
    return f;
}

OperationVector OperationVector::from_features(const Eigen::VectorXd& f) {
    if (f.size() % 3 != 0) throw InvalidArgument("feature vector length must be a multiple of 3");
    const std::size_t n = static_cast<std::size_t>(f.size()) / 3;
    OperationVector x = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.active[i] = f[i];
        x.reactive[i] = f[n + i];
        x.pv[i] = f[2 * n + i];
    }
    return x;
}

InjectionProfile OperationVector::injections() const {
    InjectionProfile p;
    p.active.resize(bus_count());
    p.reactive = reactive;
    for (std::size_t i = 0; i < bus_count(); ++i) p.active[i] = active[i] - pv[i];
    return p;
}

void SamplingConfig::validate() const {
    if (!(active_scale_lo >= 0.0 && active_scale_lo <= active_scale_hi))
        throw InvalidArgument("sampling: need 0 <= active_scale_lo <= active_scale_hi");
    if (!(reactive_scale_lo >= 0.0 && reactive_scale_lo <= reactive_scale_hi))
        throw InvalidArgument("sampling: need 0 <= reactive_scale_lo <= reactive_scale_hi");
    if (!(pv_capacity >= 0.0)) throw InvalidArgument("sampling: pv_capacity must be >= 0");
    if (!(load_correlation >= 0.0 && load_correlation <= 1.0) ||
        !(pv_correlation >= 0.0 && pv_correlation <= 1.0))
        throw InvalidArgument("sampling: correlations must be in [0, 1]");
}

std::size_t Dataset::count(SecurityLabel l) const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                   [&](const LabeledSample& s) { return s.label == l; }));
}

std::size_t Dataset::feature_count() const {
    return samples.empty() ? 3 * metadata.bus_ids.size() : 3 * samples.front().x.bus_count();
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 a(seed);
    std::uint64_t s = a.next();
    SplitMix64 b(s ^ (index * 0xd1b54a32d192ed03ull));
    return b.next();
}

OperationVector sample_operation_vector(SplitMix64& rng, const Network& network,
                                        const SamplingConfig& config) {
    config.validate();
    const std::size_t n = network.bus_count();
    OperationVector x = OperationVector::zeros(n);
    double rho = config.load_correlation, rho_pv = config.pv_correlation;
    if (config.randomize_correlation) {
        const double u = rng.uniform();
        rho *= u;
        rho_pv *= u;
    }
    const double s = rng.uniform();
    const double s_pv = rng.uniform();
    auto mix = [&](double common, double lo, double hi, double r) {
        double u = rng.uniform();
        return lo + (hi - lo) * (r * common + (1.0 - r) * u);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& b = network.buses()[i];
        x.active[i] = b.base_active_load * mix(s, config.active_scale_lo, config.active_scale_hi, rho);
        x.reactive[i] =
            b.base_reactive_load * mix(s, config.reactive_scale_lo, config.reactive_scale_hi, rho);
        if (b.has_pv) x.pv[i] = mix(s_pv, 0.0, config.pv_capacity, rho_pv);
    }
    return x;
}

LabelResult label(const Network& network, const OperationVector& x, const SecurityLimits& limits) {
    if (x.bus_count() != network.bus_count())
        throw InvalidArgument("operation vector does not match the network");
    PowerFlowSolution sol = solve_power_flow(network, x.injections());
    LabelResult r;
    if (!sol.converged) return r;
    r.converged = true;
    r.label = evaluate_security(network, sol, limits).safe ? SecurityLabel::Safe : SecurityLabel::Unsafe;
    r.loss = sol.total_loss;
    return r;
}

Dataset generate(const Network& network, const SecurityLimits& limits, std::size_t n,
                 double target_unsafe_fraction, std::uint64_t seed, const GenerateOptions& options) {
    if (!(target_unsafe_fraction > 0.0 && target_unsafe_fraction < 1.0))
        throw InvalidArgument("target unsafe fraction must be in (0, 1)");
    limits.validate();
    options.sampling.validate();

    const std::size_t want_unsafe =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * target_unsafe_fraction));
    const std::size_t want_safe = n - want_unsafe;
    const std::uint64_t budget = options.draw_budget ? options.draw_budget : 50ull * std::max<std::size_t>(n, 1);
    const unsigned workers = std::max(1u, options.workers);

    Dataset ds;
    ds.metadata.seed = seed;
    ds.metadata.network_hash = network_hash(network);
    ds.metadata.limits = limits;
    ds.metadata.sampling = options.sampling;
    ds.metadata.target_unsafe_fraction = target_unsafe_fraction;
    for (const Bus& b : network.buses()) ds.metadata.bus_ids.push_back(b.id);
    ds.samples.reserve(n);

    struct Draw {
        OperationVector x;
        LabelResult result;
    };
    constexpr std::size_t kChunk = 512;
    std::vector<Draw> chunk(kChunk);
    std::size_t got_safe = 0, got_unsafe = 0;
    std::uint64_t next_index = 0;

    auto draw_range = [&](std::size_t begin, std::size_t end, std::uint64_t base) {
        for (std::size_t k = begin; k < end; ++k) {
            SplitMix64 rng(sample_seed(seed, base + k));
            chunk[k].x = sample_operation_vector(rng, network, options.sampling);
            chunk[k].result = label(network, chunk[k].x, limits);
        }
    };

    while (got_safe < want_safe || got_unsafe < want_unsafe) {
        if (next_index >= budget)
            throw DatasetError(fmt::format(
                "class mix unachievable within {} draws: have {}/{} safe, {}/{} unsafe", budget,
                got_safe, want_safe, got_unsafe, want_unsafe));
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, budget - next_index));
        if (workers == 1) {
            draw_range(0, count, next_index);
        } else {
            std::vector<std::thread> pool;
            const std::size_t per = (count + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                std::size_t b = w * per, e = std::min(count, b + per);
                if (b < e) pool.emplace_back(draw_range, b, e, next_index);
            }
            for (auto& t : pool) t.join();
        }
        for (std::size_t k = 0; k < count; ++k) {
            ++ds.metadata.draws;
            Draw& d = chunk[k];
            if (!d.result.converged) {
                ++ds.metadata.discarded_nonconvergent;
                continue;
            }
            bool unsafe = d.result.label == SecurityLabel::Unsafe;
            if (unsafe ? got_unsafe >= want_unsafe : got_safe >= want_safe) continue;
            (unsafe ? got_unsafe : got_safe)++;
            ds.samples.push_back({std::move(d.x), d.result.label, d.result.loss});
            if (got_safe >= want_safe && got_unsafe >= want_unsafe) break;
        }
        next_index += count;
    }
    return ds;
}

DatasetSplit split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidArgument("train fraction must be in (0, 1)");
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(sample_seed(seed, 0x5b17u));
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next() % i);
        std::swap(order[i - 1], order[j]);
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(dataset.size()) * train_fraction));
    DatasetSplit out;
    out.train.metadata = dataset.metadata;
    out.test.metadata = dataset.metadata;
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < n_train ? out.train : out.test).samples.push_back(dataset.samples[order[k]]);
    return out;
}

std::string dataset_csv_header(const std::vector<int>& bus_ids) {
    std::string h;
    for (const char* prefix : {"P_", "Q_", "PV_"})
        for (int id : bus_ids) h += fmt::format("{}{},", prefix, id);
    return h + "label,loss_mw";
}

namespace {

std::filesystem::path meta_path(const std::filesystem::path& csv_path) {
    return std::filesystem::path(csv_path.string() + ".meta.json");
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw IoError(fmt::format("cannot write {}", csv_path.string()));
    out << dataset_csv_header(dataset.metadata.bus_ids) << '\n';
    for (const LabeledSample& s : dataset.samples) {
        for (const auto* v : {&s.x.active, &s.x.reactive, &s.x.pv})
            for (double d : *v) out << format_double(d) << ',';
        out << (s.label == SecurityLabel::Safe ? "safe" : "unsafe") << ',' << format_double(s.loss) << '\n';
    }
    if (!out) throw IoError(fmt::format("write failed for {}", csv_path.string()));

    const DatasetMetadata& m = dataset.metadata;
    nlohmann::ordered_json meta;
    meta["seed"] = m.seed;
    meta["network_hash"] = m.network_hash;
    meta["bus_ids"] = m.bus_ids;
    meta["limits"] = {{"v_min", m.limits.v_min}, {"v_max", m.limits.v_max}, {"i_max", m.limits.i_max}};
    meta["sampling"] = {{"active_scale_lo", m.sampling.active_scale_lo},
                        {"active_scale_hi", m.sampling.active_scale_hi},
                        {"reactive_scale_lo", m.sampling.reactive_scale_lo},
                        {"reactive_scale_hi", m.sampling.reactive_scale_hi},
                        {"pv_capacity", m.sampling.pv_capacity},
                        {"load_correlation", m.sampling.load_correlation},
                        {"pv_correlation", m.sampling.pv_correlation},
                        {"randomize_correlation", m.sampling.randomize_correlation}};
    meta["target_unsafe_fraction"] = m.target_unsafe_fraction;
    meta["samples"] = dataset.size();
    meta["unsafe"] = dataset.count(SecurityLabel::Unsafe);
    meta["draws"] = m.draws;
    meta["discarded_nonconvergent"] = m.discarded_nonconvergent;
    std::ofstream mo(meta_path(csv_path));
    if (!mo) throw IoError(fmt::format("cannot write {}", meta_path(csv_path).string()));
    mo << meta.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& csv_path) {
    CsvTable table = read_csv(csv_path);
    const std::size_t label_col = table.column("label");
    const std::size_t loss_col = table.column("loss_mw");
    if (label_col % 3 != 0) throw ParseError("dataset: feature column count is not a multiple of 3");
    const std::size_t n = label_col / 3;

    Dataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& h = table.header[i];
        if (h.rfind("P_", 0) != 0) throw ParseError(fmt::format("dataset: unexpected column {}", h));
        ds.metadata.bus_ids.push_back(std::stoi(h.substr(2)));
    }
    for (const auto& row : table.rows) {
        LabeledSample s;
        s.x = OperationVector::zeros(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.x.active[i] = parse_double(row[i]);
            s.x.reactive[i] = parse_double(row[n + i]);
            s.x.pv[i] = parse_double(row[2 * n + i]);
        }
        const std::string& l = row[label_col];
        if (l == "safe") s.label = SecurityLabel::Safe;
        else if (l == "unsafe") s.label = SecurityLabel::Unsafe;
        else throw ParseError(fmt::format("dataset: bad label '{}'", l));
        s.loss = parse_double(row[loss_col]);
        ds.samples.push_back(std::move(s));
    }

    std::ifstream mi(meta_path(csv_path));
    if (mi) {
        try {
            auto meta = nlohmann::json::parse(mi);
            DatasetMetadata& m = ds.metadata;
            m.seed = meta.value("seed", std::uint64_t{0});
            m.network_hash = meta.value("network_hash", std::string{});
            m.target_unsafe_fraction = meta.value("target_unsafe_fraction", 0.0);
            m.draws = meta.value("draws", std::uint64_t{0});
            m.discarded_nonconvergent = meta.value("discarded_nonconvergent", std::uint64_t{0});
            if (meta.contains("limits")) {
                const auto& l = meta["limits"];
                m.limits = {l.value("v_min", 0.9), l.value("v_max", 1.1), l.value("i_max", 0.249)};
            }
            if (meta.contains("sampling")) {
                const auto& s = meta["sampling"];
                m.sampling.active_scale_lo = s.value("active_scale_lo", m.sampling.active_scale_lo);
                m.sampling.active_scale_hi = s.value("active_scale_hi", m.sampling.active_scale_hi);
                m.sampling.reactive_scale_lo = s.value("reactive_scale_lo", m.sampling.reactive_scale_lo);
                m.sampling.reactive_scale_hi = s.value("reactive_scale_hi", m.sampling.reactive_scale_hi);
                m.sampling.pv_capacity = s.value("pv_capacity", m.sampling.pv_capacity);
                m.sampling.load_correlation = s.value("load_correlation", m.sampling.load_correlation);
                m.sampling.pv_correlation = s.value("pv_correlation", m.sampling.pv_correlation);
                m.sampling.randomize_correlation =
                    s.value("randomize_correlation", m.sampling.randomize_correlation);
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("dataset metadata: {}", e.what()));
        }
    }
    return ds;
}

}  // namespace secd
