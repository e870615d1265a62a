#include "secd/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/core.h>

#include "json.hpp"

namespace secd {

using nlohmann::json;

Network::Network(std::vector<Bus> buses, std::vector<Branch> branches, int slack_bus,
                 double base_kv, double base_mva)
    : buses_(std::move(buses)),
      branches_(std::move(branches)),
      slack_bus_(slack_bus),
      base_kv_(base_kv),
      base_mva_(base_mva) {
    if (buses_.empty()) throw NetworkError("network has no buses");
    if (!(base_kv_ > 0.0) || !(base_mva_ > 0.0))
        throw NetworkError("base_kv and base_mva must be positive");

    std::unordered_map<int, std::size_t> index;
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (!index.emplace(b.id, i).second)
            throw NetworkError(fmt::format("duplicate bus id {}", b.id));
        if (!(b.base_active_load >= 0.0) || !(b.base_reactive_load >= 0.0))
            throw NetworkError(fmt::format("bus {} has a negative load", b.id));
    }
    auto slack = index.find(slack_bus_);
    if (slack == index.end())
        throw NetworkError(fmt::format("slack bus {} is not a bus", slack_bus_));
    slack_index_ = slack->second;

    for (const Branch& br : branches_) {
        if (!index.count(br.from_bus) || !index.count(br.to_bus))
            throw NetworkError(fmt::format("branch {}-{} references an unknown bus",
                                           br.from_bus, br.to_bus));
        if (br.from_bus == br.to_bus)
            throw NetworkError(fmt::format("branch {}-{} is a self loop", br.from_bus, br.to_bus));
        if (!(br.resistance >= 0.0) || !(br.reactance >= 0.0))
            throw NetworkError(fmt::format("branch {}-{} has negative impedance",
                                           br.from_bus, br.to_bus));
        if (!(br.current_limit > 0.0))
            throw NetworkError(fmt::format("branch {}-{} needs a positive current limit",
                                           br.from_bus, br.to_bus));
    }
    if (branches_.size() + 1 != buses_.size())
        throw NetworkError(fmt::format("not radial: {} buses but {} branches (need n = m + 1)",
                                       buses_.size(), branches_.size()));

    // Orient the tree from the slack bus with an explicit-stack DFS.
    const std::size_t n = buses_.size();
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t k = 0; k < branches_.size(); ++k) {
        incident[index[branches_[k].from_bus]].push_back(k);
        incident[index[branches_[k].to_bus]].push_back(k);
    }
    feeding_branch_.assign(n, npos);
    branch_parent_.assign(branches_.size(), npos);
    branch_child_.assign(branches_.size(), npos);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{slack_index_};
    seen[slack_index_] = true;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        order_.push_back(u);
        // Reverse so lower branch numbers are visited first.
        for (auto it = incident[u].rbegin(); it != incident[u].rend(); ++it) {
            std::size_t k = *it;
            if (branch_parent_[k] != npos) continue;
            std::size_t a = index[branches_[k].from_bus];
            std::size_t v = (a == u) ? index[branches_[k].to_bus] : a;
            if (seen[v]) throw NetworkError("branch set contains a cycle");
            seen[v] = true;
            branch_parent_[k] = u;
            branch_child_[k] = v;
            feeding_branch_[v] = k;
            stack.push_back(v);
        }
    }
    if (order_.size() != n) throw NetworkError("network is not connected");
}

std::vector<int> Network::pv_buses() const {
    std::vector<int> ids;
    for (const Bus& b : buses_)
        if (b.has_pv) ids.push_back(b.id);
    return ids;
}

std::size_t Network::index_of(int bus_id) const {
    for (std::size_t i = 0; i < buses_.size(); ++i)
        if (buses_[i].id == bus_id) return i;
    throw NetworkError(fmt::format("unknown bus id {}", bus_id));
}

double Network::base_current_ka() const { return base_mva_ / (std::sqrt(3.0) * base_kv_); }

double Network::total_active_load() const {
    return std::accumulate(buses_.begin(), buses_.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.base_active_load; });
}

double Network::total_reactive_load() const {
    return std::accumulate(buses_.begin(), buses_.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.base_reactive_load; });
}

bool Network::operator==(const Network& other) const {
    return buses_ == other.buses_ && branches_ == other.branches_ &&
           slack_bus_ == other.slack_bus_ && base_kv_ == other.base_kv_ &&
           base_mva_ == other.base_mva_;
}

Network ieee33() {
    // from, to, r [ohm], x [ohm], P at `to` [kW], Q at `to` [kVAr]
    struct Row {
        int from, to;
        double r, x, p_kw, q_kvar;
    };
    static constexpr Row kRows[] = {
        {1, 2, 0.0922, 0.0470, 100, 60},   {2, 3, 0.4930, 0.2511, 90, 40},
        {3, 4, 0.3660, 0.1864, 120, 80},   {4, 5, 0.3811, 0.1941, 60, 30},
        {5, 6, 0.8190, 0.7070, 60, 20},    {6, 7, 0.1872, 0.6188, 200, 100},
        {7, 8, 0.7114, 0.2351, 200, 100},  {8, 9, 1.0300, 0.7400, 60, 20},
        {9, 10, 1.0440, 0.7400, 60, 20},   {10, 11, 0.1966, 0.0650, 45, 30},
        {11, 12, 0.3744, 0.1238, 60, 35},  {12, 13, 1.4680, 1.1550, 60, 35},
        {13, 14, 0.5416, 0.7129, 120, 80}, {14, 15, 0.5910, 0.5260, 60, 10},
        {15, 16, 0.7463, 0.5450, 60, 20},  {16, 17, 1.2890, 1.7210, 60, 20},
        {17, 18, 0.7320, 0.5740, 90, 40},  {2, 19, 0.1640, 0.1565, 90, 40},
        {19, 20, 1.5042, 1.3554, 90, 40},  {20, 21, 0.4095, 0.4784, 90, 40},
        {21, 22, 0.7089, 0.9373, 90, 40},  {3, 23, 0.4512, 0.3083, 90, 50},
        {23, 24, 0.8980, 0.7091, 420, 200}, {24, 25, 0.8960, 0.7011, 420, 200},
        {6, 26, 0.2030, 0.1034, 60, 25},   {26, 27, 0.2842, 0.1447, 60, 25},
        {27, 28, 1.0590, 0.9337, 60, 20},  {28, 29, 0.8042, 0.7006, 120, 70},
        {29, 30, 0.5075, 0.2585, 200, 600}, {30, 31, 0.9744, 0.9630, 150, 70},
        {31, 32, 0.3105, 0.3619, 210, 100}, {32, 33, 0.3410, 0.5302, 60, 40},
    };
    constexpr double kLineLimitKa = 0.249;
    static constexpr int kPvBuses[] = {6, 9, 12, 18, 30};

    std::vector<Bus> buses(33);
    for (int i = 0; i < 33; ++i) buses[i].id = i + 1;
    std::vector<Branch> branches;
    for (const Row& row : kRows) {
        buses[row.to - 1].base_active_load = row.p_kw / 1000.0;
        buses[row.to - 1].base_reactive_load = row.q_kvar / 1000.0;
        branches.push_back({row.from, row.to, row.r, row.x, kLineLimitKa});
    }
    for (int id : kPvBuses) buses[id - 1].has_pv = true;
    return Network(std::move(buses), std::move(branches), 1, 12.66, 10.0);
}

namespace {

Network from_json(const json& doc) {
    try {
        std::set<int> pv;
        if (doc.contains("pv_buses"))
            for (const auto& id : doc.at("pv_buses")) pv.insert(id.get<int>());

        std::vector<Bus> buses;
        for (const auto& b : doc.at("buses")) {
            Bus bus;
            bus.id = b.at("id").get<int>();
            bus.base_active_load = b.value("p_mw", 0.0);
            bus.base_reactive_load = b.value("q_mvar", 0.0);
            bus.has_pv = pv.count(bus.id) > 0;
            buses.push_back(bus);
        }
        for (int id : pv) {
            if (std::none_of(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == id; }))
                throw NetworkError(fmt::format("pv bus {} is not a bus", id));
        }
        std::vector<Branch> branches;
        for (const auto& b : doc.at("branches")) {
            branches.push_back({b.at("from").get<int>(), b.at("to").get<int>(),
                                b.at("r_ohm").get<double>(), b.at("x_ohm").get<double>(),
                                b.at("i_max_ka").get<double>()});
        }
        return Network(std::move(buses), std::move(branches), doc.at("slack_bus").get<int>(),
                       doc.at("base_kv").get<double>(), doc.at("base_mva").get<double>());
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("network json: {}", e.what()));
    }
}

}  // namespace

Network parse_network(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("network json: {}", e.what()));
    }
    return from_json(doc);
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open network file {}", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::string network_to_json(const Network& network) {
    json doc;
    doc["base_kv"] = network.base_kv();
    doc["base_mva"] = network.base_mva();
    doc["slack_bus"] = network.slack_bus();
    doc["pv_buses"] = network.pv_buses();
    json buses = json::array();
    for (const Bus& b : network.buses())
        buses.push_back({{"id", b.id}, {"p_mw", b.base_active_load}, {"q_mvar", b.base_reactive_load}});
    doc["buses"] = std::move(buses);
    json branches = json::array();
    for (const Branch& b : network.branches())
        branches.push_back({{"from", b.from_bus},
                            {"to", b.to_bus},
                            {"r_ohm", b.resistance},
                            {"x_ohm", b.reactance},
                            {"i_max_ka", b.current_limit}});
    doc["branches"] = std::move(branches);
    return doc.dump(2) + "\n";
}

void save_network(const Network& network, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write network file {}", path.string()));
    out << network_to_json(network);
    if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

Network resolve_network(const std::string& spec) {
    if (spec.empty() || spec == "builtin:ieee33") return ieee33();
    return load_network(spec);
}

std::string network_hash(const Network& network) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : network_to_json(network)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace secd
