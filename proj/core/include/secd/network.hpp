#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "secd/error.hpp"

namespace secd {

struct Bus {
    int id = 0;
    double base_active_load = 0.0;    // MW
    double base_reactive_load = 0.0;  // MVAr
    bool has_pv = false;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double resistance = 0.0;  // ohm
    double reactance = 0.0;   // ohm
    double current_limit = 0.0;  // kA

    bool operator==(const Branch&) const = default;
};

class NetworkError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Radial distribution feeder. Immutable after construction; the
/// constructor validates ids, radiality and connectivity.
///
/// Buses are addressed externally by id and internally by position
/// ("index"). Branch `k` always feeds the bus `branch_child(k)` from
/// `branch_parent(k)` once the tree is oriented from the slack bus.
class Network {
public:
    Network(std::vector<Bus> buses, std::vector<Branch> branches, int slack_bus,
            double base_kv, double base_mva);

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    int slack_bus() const { return slack_bus_; }
    double base_kv() const { return base_kv_; }
    double base_mva() const { return base_mva_; }
    std::vector<int> pv_buses() const;

    std::size_t bus_count() const { return buses_.size(); }
    std::size_t branch_count() const { return branches_.size(); }

    std::size_t index_of(int bus_id) const;
    std::size_t slack_index() const { return slack_index_; }

    /// Bus indices in depth-first order from the slack bus; every parent
    /// precedes its children.
    const std::vector<std::size_t>& dfs_order() const { return order_; }
    /// For each bus index, the index of the branch feeding it (slack: npos).
    const std::vector<std::size_t>& feeding_branch() const { return feeding_branch_; }
    std::size_t branch_parent(std::size_t branch) const { return branch_parent_[branch]; }
    std::size_t branch_child(std::size_t branch) const { return branch_child_[branch]; }

    double base_impedance() const { return base_kv_ * base_kv_ / base_mva_; }  // ohm
    double base_current_ka() const;  // kA of 1 p.u. three-phase current

    double total_active_load() const;
    double total_reactive_load() const;

    bool operator==(const Network& other) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    int slack_bus_;
    double base_kv_;
    double base_mva_;

    std::size_t slack_index_ = 0;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> feeding_branch_;
    std::vector<std::size_t> branch_parent_;
    std::vector<std::size_t> branch_child_;
};

/// IEEE 33-bus test feeder (Baran & Wu case data) with PV stations at
/// buses 6, 9, 12, 18, 30 and a uniform 0.249 kA line limit.
Network ieee33();

/// Reads a network from the documented JSON schema.
Network load_network(const std::filesystem::path& path);
Network parse_network(const std::string& json_text);
std::string network_to_json(const Network& network);
void save_network(const Network& network, const std::filesystem::path& path);

/// "builtin:ieee33" or a path to a JSON network file.
Network resolve_network(const std::string& spec);

/// Stable FNV-1a digest of the serialized network, used in dataset metadata.
std::string network_hash(const Network& network);

}  // namespace secd
