#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dronecloud/container.hpp"
#include "dronecloud/node.hpp"
#include "dronecloud/orchestrator.hpp"
#include "dronecloud/radio.hpp"
#include "dronecloud/workload.hpp"

namespace dronecloud {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error("parse error: " + what) {}
};
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what)
        : std::runtime_error("invalid scenario: " + what) {}
};

struct NodeConfig {
    NodeId id;
    SwarmRole role = SwarmRole::Agent;
    Vec3 position{};
    double dongle_heading_deg = 0.0;
    int cores = 4;
    double ram_kb = 1048576.0;
    double baseline_mem_fraction = 0.0989;
    double flight_cpu_fraction = 0.30;
    FlightMode flight_mode = FlightMode::Flying;
    double land_threshold = 0.20;
    BatteryState battery{};

    friend bool operator==(const NodeConfig&, const NodeConfig&) = default;
};

struct OrchestrationConfig {
    double heartbeat_interval_s = 2.0;
    int prune_missed_heartbeats = 3;
    double failover_timeout_s = 10.0;

    double prune_timeout_s() const { return heartbeat_interval_s * prune_missed_heartbeats; }

    friend bool operator==(const OrchestrationConfig&, const OrchestrationConfig&) = default;
};

struct Directive {
    enum class Action { Deploy, Stress, Kill, Land, Takeoff };

    double at = 0.0;
    Action action = Action::Deploy;
    std::int64_t count = 1;  // deploy
    NodeId node;             // deploy placement override; kill/land/takeoff target
    WorkloadSpec workload;   // stress

    friend bool operator==(const Directive&, const Directive&) = default;
};

inline const char* to_string(Directive::Action a) {
    switch (a) {
        case Directive::Action::Deploy: return "deploy";
        case Directive::Action::Stress: return "stress";
        case Directive::Action::Kill: return "kill";
        case Directive::Action::Land: return "land";
        case Directive::Action::Takeoff: return "takeoff";
    }
    return "?";
}

struct Scenario {
    std::uint64_t seed = 42;
    double duration_s = 60.0;
    double metrics_interval_s = 1.0;
    Strategy strategy = Strategy::Spread;
    RadioModel radio{};
    ContainerSpec container_spec{};
    CreationTimeModel creation_model{};
    OrchestrationConfig orchestration{};
    std::vector<NodeConfig> nodes;
    std::vector<Directive> script;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

using json = nlohmann::ordered_json;

inline void expect_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& context) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ParseError("unknown key \"" + key + "\" in " + context);
        }
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& context) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("bad value for \"" + key + "\" in " + context + ": " + e.what());
    }
}

inline SwarmRole parse_role(const std::string& s, const std::string& context) {
    if (s == "manager") return SwarmRole::Manager;
    if (s == "replica") return SwarmRole::Replica;
    if (s == "agent") return SwarmRole::Agent;
    throw ParseError("unknown role \"" + s + "\" in " + context);
}

inline FlightMode parse_flight_mode(const std::string& s, const std::string& context) {
    if (s == "flying") return FlightMode::Flying;
    if (s == "landed") return FlightMode::Landed;
    throw ParseError("unknown flight_mode \"" + s + "\" in " + context);
}

inline Strategy parse_strategy(const std::string& s) {
    if (s == "spread") return Strategy::Spread;
    if (s == "binpack") return Strategy::BinPack;
    throw ParseError("unknown strategy \"" + s + "\"");
}

inline Directive::Action parse_action(const std::string& s, const std::string& context) {
    if (s == "deploy") return Directive::Action::Deploy;
    if (s == "stress") return Directive::Action::Stress;
    if (s == "kill") return Directive::Action::Kill;
    if (s == "land") return Directive::Action::Land;
    if (s == "takeoff") return Directive::Action::Takeoff;
    throw ParseError("unknown action \"" + s + "\" in " + context);
}

// A full battery is assumed when level is omitted. The flying draw defaults
// to whatever empties this capacity in the 8-minute reference endurance,
// except for the 2200 mAh heavy-frame pack with its measured 2.5 minutes.
inline double default_drain_flying(double capacity_mah) {
    if (capacity_mah == 2200.0) {
        return kHeavyDrainFlyingMa;
    }
    return capacity_mah * 3600.0 / 480.0;
}

inline BatteryState parse_battery(const json& obj, const std::string& context) {
    expect_keys(obj, {"capacity_mah", "level_mah", "drain_flying_ma", "drain_landed_ma"}, context);
    BatteryState b;
    b.capacity_mah = get_or(obj, "capacity_mah", 4200.0, context);
    b.level_mah = get_or(obj, "level_mah", b.capacity_mah, context);
    b.drain_flying_ma = get_or(obj, "drain_flying_ma", default_drain_flying(b.capacity_mah), context);
    b.drain_landed_ma = get_or(obj, "drain_landed_ma", kDrainLandedMa, context);
    return b;
}

inline NodeConfig parse_node(const json& obj, const std::string& context) {
    expect_keys(obj,
                {"id", "role", "position", "dongle_heading_deg", "cores", "ram_kb",
                 "baseline_mem_fraction", "flight_cpu_fraction", "flight_mode", "land_threshold",
                 "battery"},
                context);
    NodeConfig n;
    if (!obj.contains("id")) {
        throw ParseError("node without \"id\" in " + context);
    }
    n.id = obj.at("id").get<std::string>();
    n.role = parse_role(get_or<std::string>(obj, "role", "agent", context), context);
    if (obj.contains("position")) {
        const json& p = obj.at("position");
        if (!p.is_array() || p.size() != 3) {
            throw ParseError("position must be [x, y, z] in " + context);
        }
        n.position = Vec3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    }
    n.dongle_heading_deg = get_or(obj, "dongle_heading_deg", 0.0, context);
    n.cores = static_cast<int>(get_or<std::int64_t>(obj, "cores", 4, context));
    n.ram_kb = get_or(obj, "ram_kb", 1048576.0, context);
    n.baseline_mem_fraction = get_or(obj, "baseline_mem_fraction", 0.0989, context);
    n.flight_cpu_fraction = get_or(obj, "flight_cpu_fraction", 0.30, context);
    n.flight_mode =
        parse_flight_mode(get_or<std::string>(obj, "flight_mode", "flying", context), context);
    n.land_threshold = get_or(obj, "land_threshold", 0.20, context);
    n.battery = obj.contains("battery") ? parse_battery(obj.at("battery"), context + ".battery")
                                        : BatteryState{};
    return n;
}

inline SectorParams parse_sector(const json& obj, SectorParams fallback,
                                 const std::string& context) {
    expect_keys(obj, {"rssi_at_d0_dbm", "path_loss_exponent"}, context);
    SectorParams s = fallback;
    s.rssi_at_d0_dbm = get_or(obj, "rssi_at_d0_dbm", s.rssi_at_d0_dbm, context);
    s.path_loss_exponent = get_or(obj, "path_loss_exponent", s.path_loss_exponent, context);
    return s;
}

inline RadioModel parse_radio(const json& obj) {
    expect_keys(obj,
                {"front", "rear", "connect_threshold_dbm", "reference_distance_m",
                 "rear_halfwidth_deg"},
                "radio");
    RadioModel r;
    if (obj.contains("front")) {
        r.front = parse_sector(obj.at("front"), r.front, "radio.front");
    }
    if (obj.contains("rear")) {
        r.rear = parse_sector(obj.at("rear"), r.rear, "radio.rear");
    }
    r.connect_threshold_dbm = get_or(obj, "connect_threshold_dbm", r.connect_threshold_dbm, "radio");
    r.reference_distance_m = get_or(obj, "reference_distance_m", r.reference_distance_m, "radio");
    r.rear_halfwidth_deg = get_or(obj, "rear_halfwidth_deg", r.rear_halfwidth_deg, "radio");
    return r;
}

inline ContainerSpec parse_container_spec(const json& obj) {
    expect_keys(obj, {"image_size_kb", "mem_footprint_kb", "cpu_idle_fraction", "service_demand_s"},
                "container_spec");
    ContainerSpec c;
    c.image_size_kb = get_or(obj, "image_size_kb", c.image_size_kb, "container_spec");
    c.mem_footprint_kb = get_or(obj, "mem_footprint_kb", c.mem_footprint_kb, "container_spec");
    c.cpu_idle_fraction = get_or(obj, "cpu_idle_fraction", c.cpu_idle_fraction, "container_spec");
    c.service_demand_s = get_or(obj, "service_demand_s", c.service_demand_s, "container_spec");
    return c;
}

inline CreationTimeModel parse_creation_model(const json& obj) {
    expect_keys(obj,
                {"floor_s", "ceiling_s", "slope_s", "knee_load", "ramp_exponent", "ramp_peak_s",
                 "noise_sigma"},
                "creation_model");
    CreationTimeModel m;
    m.floor_s = get_or(obj, "floor_s", m.floor_s, "creation_model");
    m.ceiling_s = get_or(obj, "ceiling_s", m.ceiling_s, "creation_model");
    m.slope_s = get_or(obj, "slope_s", m.slope_s, "creation_model");
    m.knee_load = get_or(obj, "knee_load", m.knee_load, "creation_model");
    m.ramp_exponent = get_or(obj, "ramp_exponent", m.ramp_exponent, "creation_model");
    m.ramp_peak_s = get_or(obj, "ramp_peak_s", m.ramp_peak_s, "creation_model");
    m.noise_sigma = get_or(obj, "noise_sigma", m.noise_sigma, "creation_model");
    return m;
}

inline OrchestrationConfig parse_orchestration(const json& obj) {
    expect_keys(obj, {"heartbeat_interval_s", "prune_missed_heartbeats", "failover_timeout_s"},
                "orchestration");
    OrchestrationConfig o;
    o.heartbeat_interval_s = get_or(obj, "heartbeat_interval_s", o.heartbeat_interval_s, "orchestration");
    o.prune_missed_heartbeats = static_cast<int>(get_or<std::int64_t>(
        obj, "prune_missed_heartbeats", o.prune_missed_heartbeats, "orchestration"));
    o.failover_timeout_s = get_or(obj, "failover_timeout_s", o.failover_timeout_s, "orchestration");
    return o;
}

inline Directive parse_directive(const json& obj, const ContainerSpec& container_spec,
                                 const std::string& context) {
    expect_keys(obj,
                {"at", "action", "count", "node", "users", "total_requests", "target_node",
                 "service_demand_s", "rtt_min_ms", "rtt_max_ms", "think_time_s",
                 "cpu_draw_per_request"},
                context);
    if (!obj.contains("action")) {
        throw ParseError("directive without \"action\" in " + context);
    }
    Directive d;
    d.at = get_or(obj, "at", 0.0, context);
    d.action = parse_action(obj.at("action").get<std::string>(), context);
    d.count = get_or<std::int64_t>(obj, "count", 1, context);
    d.node = get_or<std::string>(obj, "node", "", context);
    if (d.action == Directive::Action::Stress) {
        WorkloadSpec w;
        w.service_demand_s = container_spec.service_demand_s;
        w.concurrent_users = static_cast<int>(get_or<std::int64_t>(obj, "users", 10, context));
        w.total_requests = get_or<std::int64_t>(obj, "total_requests", 10000, context);
        w.target_node = get_or<std::string>(obj, "target_node", "", context);
        w.service_demand_s = get_or(obj, "service_demand_s", w.service_demand_s, context);
        w.rtt_min_ms = get_or(obj, "rtt_min_ms", w.rtt_min_ms, context);
        w.rtt_max_ms = get_or(obj, "rtt_max_ms", w.rtt_max_ms, context);
        w.think_time_s = get_or(obj, "think_time_s", w.think_time_s, context);
        w.cpu_draw_per_request = get_or(obj, "cpu_draw_per_request", w.cpu_draw_per_request, context);
        d.workload = w;
    }
    return d;
}

}  // namespace detail

inline void validate_scenario(const Scenario& s) {
    if (s.duration_s <= 0.0) {
        throw ValidationError("duration_s must be positive");
    }
    if (s.metrics_interval_s <= 0.0) {
        throw ValidationError("metrics_interval_s must be positive");
    }
    if (s.orchestration.heartbeat_interval_s <= 0.0 || s.orchestration.failover_timeout_s <= 0.0 ||
        s.orchestration.prune_missed_heartbeats < 1) {
        throw ValidationError("orchestration intervals must be positive");
    }
    if (s.nodes.empty()) {
        throw ValidationError("scenario needs at least one node");
    }

    std::set<NodeId> ids;
    int managers = 0;
    for (const NodeConfig& n : s.nodes) {
        if (n.id.empty()) {
            throw ValidationError("node id must not be empty");
        }
        if (!ids.insert(n.id).second) {
            throw ValidationError("duplicate node id \"" + n.id + "\"");
        }
        if (n.role == SwarmRole::Manager) {
            ++managers;
        }
        if (n.cores < 1 || n.ram_kb <= 0.0) {
            throw ValidationError("node \"" + n.id + "\": cores and ram_kb must be positive");
        }
        if (n.baseline_mem_fraction < 0.0 || n.baseline_mem_fraction >= 1.0) {
            throw ValidationError("node \"" + n.id + "\": baseline_mem_fraction must be in [0, 1)");
        }
        if (n.flight_cpu_fraction < 0.0 || n.flight_cpu_fraction >= 1.0) {
            throw ValidationError("node \"" + n.id + "\": flight_cpu_fraction must be in [0, 1)");
        }
        if (n.land_threshold < 0.0 || n.land_threshold >= 1.0) {
            throw ValidationError("node \"" + n.id + "\": land_threshold must be in [0, 1)");
        }
        const BatteryState& b = n.battery;
        if (b.capacity_mah <= 0.0 || b.level_mah < 0.0 || b.level_mah > b.capacity_mah) {
            throw ValidationError("node \"" + n.id + "\": battery level must be in [0, capacity]");
        }
        if (!(b.drain_flying_ma > b.drain_landed_ma && b.drain_landed_ma > 0.0)) {
            throw ValidationError("node \"" + n.id + "\": need drain_flying > drain_landed > 0");
        }
    }
    if (managers != 1) {
        throw ValidationError("scenario must declare exactly one manager (got " +
                              std::to_string(managers) + ")");
    }
    // The RSSI model needs a positive distance between every pair.
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < s.nodes.size(); ++j) {
            if (distance(s.nodes[i].position, s.nodes[j].position) <= 0.0) {
                throw ValidationError("nodes \"" + s.nodes[i].id + "\" and \"" + s.nodes[j].id +
                                      "\" share a position");
            }
        }
    }

    double previous_at = 0.0;
    for (std::size_t i = 0; i < s.script.size(); ++i) {
        const Directive& d = s.script[i];
        const std::string where = "script[" + std::to_string(i) + "]";
        if (d.at < 0.0 || d.at > s.duration_s) {
            throw ValidationError(where + ": time out of [0, duration_s]");
        }
        if (i > 0 && d.at < previous_at) {
            throw ValidationError(where + ": directives must be time-ordered");
        }
        previous_at = d.at;
        auto require_node = [&](const NodeId& id) {
            if (id.empty() || !ids.count(id)) {
                throw ValidationError(where + ": unknown node \"" + id + "\"");
            }
        };
        switch (d.action) {
            case Directive::Action::Deploy:
                if (d.count < 1) {
                    throw ValidationError(where + ": deploy count must be >= 1");
                }
                if (!d.node.empty()) {
                    require_node(d.node);
                }
                break;
            case Directive::Action::Stress:
                if (d.workload.concurrent_users < 1 || d.workload.total_requests < 1) {
                    throw ValidationError(where + ": stress needs users >= 1 and requests >= 1");
                }
                if (d.workload.rtt_min_ms <= 0.0 || d.workload.rtt_max_ms < d.workload.rtt_min_ms) {
                    throw ValidationError(where + ": bad rtt range");
                }
                require_node(d.workload.target_node);
                break;
            case Directive::Action::Kill:
            case Directive::Action::Land:
            case Directive::Action::Takeoff:
                require_node(d.node);
                break;
        }
    }
}

inline Scenario parse_scenario(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("scenario document must be a JSON object");
    }
    detail::expect_keys(doc,
                        {"seed", "duration_s", "metrics_interval_s", "strategy", "radio",
                         "container_spec", "creation_model", "orchestration", "nodes", "script"},
                        "scenario");
    Scenario s;
    s.seed = detail::get_or<std::uint64_t>(doc, "seed", s.seed, "scenario");
    s.duration_s = detail::get_or(doc, "duration_s", s.duration_s, "scenario");
    s.metrics_interval_s = detail::get_or(doc, "metrics_interval_s", s.metrics_interval_s, "scenario");
    s.strategy = detail::parse_strategy(
        detail::get_or<std::string>(doc, "strategy", "spread", "scenario"));
    if (doc.contains("radio")) {
        s.radio = detail::parse_radio(doc.at("radio"));
    }
    if (doc.contains("container_spec")) {
        s.container_spec = detail::parse_container_spec(doc.at("container_spec"));
    }
    if (doc.contains("creation_model")) {
        s.creation_model = detail::parse_creation_model(doc.at("creation_model"));
    }
    if (doc.contains("orchestration")) {
        s.orchestration = detail::parse_orchestration(doc.at("orchestration"));
    }
    if (!doc.contains("nodes") || !doc.at("nodes").is_array()) {
        throw ParseError("scenario needs a \"nodes\" array");
    }
    for (std::size_t i = 0; i < doc.at("nodes").size(); ++i) {
        s.nodes.push_back(detail::parse_node(doc.at("nodes")[i], "nodes[" + std::to_string(i) + "]"));
    }
    if (doc.contains("script")) {
        if (!doc.at("script").is_array()) {
            throw ParseError("\"script\" must be an array");
        }
        for (std::size_t i = 0; i < doc.at("script").size(); ++i) {
            s.script.push_back(detail::parse_directive(doc.at("script")[i], s.container_spec,
                                                       "script[" + std::to_string(i) + "]"));
        }
    }
    // A stress directive in a single-node scenario may leave the target implicit.
    for (Directive& d : s.script) {
        if (d.action == Directive::Action::Stress && d.workload.target_node.empty() &&
            s.nodes.size() == 1) {
            d.workload.target_node = s.nodes.front().id;
        }
    }
    validate_scenario(s);
    return s;
}

// Canonical form: every field explicit, so parse(serialize(s)) == s.
inline std::string serialize_scenario(const Scenario& s) {
    using detail::json;
    json doc;
    doc["seed"] = s.seed;
    doc["duration_s"] = s.duration_s;
    doc["metrics_interval_s"] = s.metrics_interval_s;
    doc["strategy"] = to_string(s.strategy);
    doc["radio"] = {
        {"front",
         {{"rssi_at_d0_dbm", s.radio.front.rssi_at_d0_dbm},
          {"path_loss_exponent", s.radio.front.path_loss_exponent}}},
        {"rear",
         {{"rssi_at_d0_dbm", s.radio.rear.rssi_at_d0_dbm},
          {"path_loss_exponent", s.radio.rear.path_loss_exponent}}},
        {"connect_threshold_dbm", s.radio.connect_threshold_dbm},
        {"reference_distance_m", s.radio.reference_distance_m},
        {"rear_halfwidth_deg", s.radio.rear_halfwidth_deg},
    };
    doc["container_spec"] = {
        {"image_size_kb", s.container_spec.image_size_kb},
        {"mem_footprint_kb", s.container_spec.mem_footprint_kb},
        {"cpu_idle_fraction", s.container_spec.cpu_idle_fraction},
        {"service_demand_s", s.container_spec.service_demand_s},
    };
    doc["creation_model"] = {
        {"floor_s", s.creation_model.floor_s},
        {"ceiling_s", s.creation_model.ceiling_s},
        {"slope_s", s.creation_model.slope_s},
        {"knee_load", s.creation_model.knee_load},
        {"ramp_exponent", s.creation_model.ramp_exponent},
        {"ramp_peak_s", s.creation_model.ramp_peak_s},
        {"noise_sigma", s.creation_model.noise_sigma},
    };
    doc["orchestration"] = {
        {"heartbeat_interval_s", s.orchestration.heartbeat_interval_s},
        {"prune_missed_heartbeats", s.orchestration.prune_missed_heartbeats},
        {"failover_timeout_s", s.orchestration.failover_timeout_s},
    };
    doc["nodes"] = json::array();
    for (const NodeConfig& n : s.nodes) {
        doc["nodes"].push_back({
            {"id", n.id},
            {"role", to_string(n.role)},
            {"position", {n.position.x, n.position.y, n.position.z}},
            {"dongle_heading_deg", n.dongle_heading_deg},
            {"cores", n.cores},
            {"ram_kb", n.ram_kb},
            {"baseline_mem_fraction", n.baseline_mem_fraction},
            {"flight_cpu_fraction", n.flight_cpu_fraction},
            {"flight_mode", to_string(n.flight_mode)},
            {"land_threshold", n.land_threshold},
            {"battery",
             {{"capacity_mah", n.battery.capacity_mah},
              {"level_mah", n.battery.level_mah},
              {"drain_flying_ma", n.battery.drain_flying_ma},
              {"drain_landed_ma", n.battery.drain_landed_ma}}},
        });
    }
    doc["script"] = json::array();
    for (const Directive& d : s.script) {
        json obj{{"at", d.at}, {"action", to_string(d.action)}};
        switch (d.action) {
            case Directive::Action::Deploy:
                obj["count"] = d.count;
                if (!d.node.empty()) {
                    obj["node"] = d.node;
                }
                break;
            case Directive::Action::Stress:
                obj["users"] = d.workload.concurrent_users;
                obj["total_requests"] = d.workload.total_requests;
                obj["target_node"] = d.workload.target_node;
                obj["service_demand_s"] = d.workload.service_demand_s;
                obj["rtt_min_ms"] = d.workload.rtt_min_ms;
                obj["rtt_max_ms"] = d.workload.rtt_max_ms;
                obj["think_time_s"] = d.workload.think_time_s;
                obj["cpu_draw_per_request"] = d.workload.cpu_draw_per_request;
                break;
            case Directive::Action::Kill:
            case Directive::Action::Land:
            case Directive::Action::Takeoff:
                obj["node"] = d.node;
                break;
        }
        doc["script"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

}  // namespace dronecloud
