#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "dronecloud/node.hpp"
#include "dronecloud/rng.hpp"
#include "dronecloud/types.hpp"

namespace dronecloud {

// Resident cost per nano-webserver instance. The measured endpoints are a
// 9.89% pre-fill baseline and a hard limit of 2408 instances on 1024 MB,
// so the default footprint is exactly usable/2408 (~392.4 KB). Keeping the
// exact quotient makes the 2408 fill count reproduce bit-for-bit.
inline constexpr double kDefaultFootprintKb = 1048576.0 * (1.0 - 0.0989) / 2408.0;

struct ContainerSpec {
    double image_size_kb = 90.0;
    double mem_footprint_kb = kDefaultFootprintKb;
    double cpu_idle_fraction = 0.00008;  // of one node, per idle instance
    double service_demand_s = 0.012;     // CPU-seconds per request

    friend bool operator==(const ContainerSpec&, const ContainerSpec&) = default;
};

inline double memory_footprint(const ContainerSpec& spec) {
    return spec.mem_footprint_kb;
}

enum class ContainerState { Creating, Running, Destroyed };

struct ContainerInstance {
    std::uint64_t id = 0;
    NodeId node;
    ContainerSpec spec;
    ContainerState state = ContainerState::Creating;
    double created_at = 0.0;         // creation start
    double creation_duration = 0.0;  // start -> Running
};

// Startup-latency model. Flat floor for an unloaded node, a gentle linear
// climb, then a quadratic ramp past the knee where the measured creation
// times blow up (the knee sits where ~2000 of 2408 footprints are charged).
// Calibrated so a full 1..2408 fill gives min 0.62 s, mean 2.79 s and a
// cumulative time of ~1 h 52 min, with every sample inside [floor, ceiling].
struct CreationTimeModel {
    double floor_s = 0.62;
    double ceiling_s = 38.37;
    double slope_s = 2.0;
    double knee_load = 0.83;
    double ramp_exponent = 2.0;
    double ramp_peak_s = 23.5209109672039;
    double noise_sigma = 0.20;  // lognormal, mean one

    double base(double load) const {
        load = std::clamp(load, 0.0, 1.0);
        if (load <= knee_load) {
            return floor_s + slope_s * load;
        }
        const double knee_value = floor_s + slope_s * knee_load;
        const double u = (load - knee_load) / (1.0 - knee_load);
        return knee_value + (ramp_peak_s - knee_value) * std::pow(u, ramp_exponent);
    }

    double sample(double load, RngStream& rng) const {
        const double b = base(load);
        const double noise = rng.lognormal_mean_one(noise_sigma);
        const double t = floor_s + (b - floor_s) * noise;
        return std::clamp(t, floor_s, ceiling_s);
    }

    friend bool operator==(const CreationTimeModel&, const CreationTimeModel&) = default;
};

inline double creation_time(const CreationTimeModel& model, double node_load, RngStream& rng) {
    return model.sample(node_load, rng);
}

struct OutOfMemory : std::runtime_error {
    explicit OutOfMemory(const NodeId& id)
        : std::runtime_error("insufficient memory on node " + id) {}
};
struct AlreadyDestroyed : std::logic_error {
    explicit AlreadyDestroyed(std::uint64_t instance)
        : std::logic_error("container already destroyed: #" + std::to_string(instance)) {}
};

// Reserves the footprint immediately (Creating); the caller schedules the
// completion that flips it to Running. Refused creations reserve nothing.
inline ContainerInstance create_container(PiNodeModel& node, const ContainerSpec& spec,
                                          double now, std::uint64_t instance_id) {
    if (node.depleted()) {
        throw NodeDepleted(node.id);
    }
    if (node.available_memory_kb() < memory_footprint(spec)) {
        throw OutOfMemory(node.id);
    }
    node.container_mem_kb += memory_footprint(spec);
    ContainerInstance instance;
    instance.id = instance_id;
    instance.node = node.id;
    instance.spec = spec;
    instance.state = ContainerState::Creating;
    instance.created_at = now;
    return instance;
}

inline void complete_creation(PiNodeModel& node, ContainerInstance& instance, double now) {
    instance.state = ContainerState::Running;
    instance.creation_duration = now - instance.created_at;
    node.running_containers += 1;
}

inline void destroy_container(PiNodeModel& node, ContainerInstance& instance) {
    if (instance.state == ContainerState::Destroyed) {
        throw AlreadyDestroyed(instance.id);
    }
    if (instance.state == ContainerState::Running) {
        node.running_containers -= 1;
    }
    node.container_mem_kb = std::max(0.0, node.container_mem_kb - memory_footprint(instance.spec));
    instance.state = ContainerState::Destroyed;
}

// Memory left after the baseline and every live footprint in `containers`.
// The engine tracks the same quantity incrementally on the node; this form
// recomputes it from the instance list.
template <typename Range>
double available_memory(const PiNodeModel& node, const Range& containers) {
    double charged = 0.0;
    for (const ContainerInstance& c : containers) {
        if (c.node == node.id && c.state != ContainerState::Destroyed) {
            charged += memory_footprint(c.spec);
        }
    }
    return std::max(0.0, node.ram_kb - node.baseline_mem_kb() - charged);
}

}  // namespace dronecloud
