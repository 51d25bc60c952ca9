#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "dronecloud/types.hpp"

namespace dronecloud {

enum class FlightMode { Flying, Landed, Depleted };

inline const char* to_string(FlightMode m) {
    switch (m) {
        case FlightMode::Flying: return "flying";
        case FlightMode::Landed: return "landed";
        case FlightMode::Depleted: return "depleted";
    }
    return "?";
}

// Flight endurance is the paper-anchored quantity; the draw currents are
// fitted so a full battery lasts the measured time. Light frame with the
// 4200 mAh pack: 8 minutes. Heavy frame with the 2200 mAh pack: 2.5 minutes.
inline constexpr double kLightDrainFlyingMa = 4200.0 * 3600.0 / 480.0;  // 31500
inline constexpr double kHeavyDrainFlyingMa = 2200.0 * 3600.0 / 150.0;  // 52800
inline constexpr double kDrainLandedMa = 800.0;

struct BatteryState {
    double capacity_mah = 4200.0;
    double level_mah = 4200.0;
    double drain_flying_ma = kLightDrainFlyingMa;
    double drain_landed_ma = kDrainLandedMa;

    double drain_ma(FlightMode mode) const {
        return mode == FlightMode::Flying ? drain_flying_ma : drain_landed_ma;
    }
    double fraction() const {
        return capacity_mah > 0.0 ? level_mah / capacity_mah : 0.0;
    }

    friend bool operator==(const BatteryState&, const BatteryState&) = default;
};

struct LandingPolicy {
    // Land when the battery fraction drops below this. 0 disables landing.
    double land_threshold = 0.20;

    friend bool operator==(const LandingPolicy&, const LandingPolicy&) = default;
};

// One Raspberry-Pi-class drone node: compute budget, memory accounting,
// battery and flight state. Container bookkeeping charges footprints here;
// the container registry itself lives in the engine.
struct PiNodeModel {
    NodeId id;
    int cores = 4;
    double ram_kb = 1048576.0;              // 1024 MB
    double baseline_mem_fraction = 0.0989;  // OS + docker daemon before any container
    double flight_cpu_fraction = 0.30;      // flight control reservation while airborne
    Vec3 position{};
    double dongle_heading_deg = 0.0;  // 0 = dongle faces north
    BatteryState battery{};
    FlightMode mode = FlightMode::Flying;
    LandingPolicy landing{};
    bool alive = true;

    double container_mem_kb = 0.0;  // charged footprints (Creating + Running)
    int running_containers = 0;
    bool creating = false;  // creations on one node serialize

    bool depleted() const { return mode == FlightMode::Depleted; }
    bool live() const { return alive && !depleted(); }

    double baseline_mem_kb() const { return ram_kb * baseline_mem_fraction; }
    double usable_mem_kb() const { return ram_kb - baseline_mem_kb(); }

    double available_memory_kb() const {
        return std::max(0.0, usable_mem_kb() - container_mem_kb);
    }
    double memory_fraction() const {
        return (baseline_mem_kb() + container_mem_kb) / ram_kb;
    }
    // Share of the fill the containers occupy; the load axis of the
    // creation-time model.
    double container_mem_load() const {
        const double usable = usable_mem_kb();
        return usable > 0.0 ? std::clamp(container_mem_kb / usable, 0.0, 1.0) : 1.0;
    }

    double available_cpu() const {
        if (depleted()) {
            throw NodeDepleted(id);
        }
        return mode == FlightMode::Flying ? 1.0 - flight_cpu_fraction : 1.0;
    }

    double effective_cores() const { return cores * available_cpu(); }
};

// Drains the battery over dt seconds and reports the Depleted transition
// if the level hits zero. dt must be positive.
inline std::optional<FlightMode> battery_tick(PiNodeModel& node, double dt) {
    if (node.depleted()) {
        return std::nullopt;
    }
    const double drained = node.battery.drain_ma(node.mode) * dt / 3600.0;
    node.battery.level_mah = std::max(0.0, node.battery.level_mah - drained);
    if (node.battery.level_mah == 0.0) {
        node.mode = FlightMode::Depleted;
        return FlightMode::Depleted;
    }
    return std::nullopt;
}

// Land-to-serve policy: once the battery fraction falls below the threshold
// the node lands and stays landed (takeoff only by scenario directive).
inline FlightMode decide_flight_mode(const PiNodeModel& node, const LandingPolicy& policy) {
    if (node.depleted()) {
        throw NodeDepleted(node.id);
    }
    if (node.mode == FlightMode::Flying && policy.land_threshold > 0.0 &&
        node.battery.fraction() < policy.land_threshold) {
        return FlightMode::Landed;
    }
    return node.mode;
}

inline double endurance_estimate(const BatteryState& battery, FlightMode mode) {
    return battery.level_mah / battery.drain_ma(mode) * 3600.0;
}

}  // namespace dronecloud
