#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dronecloud/container.hpp"
#include "dronecloud/types.hpp"

namespace dronecloud {

enum class Strategy { Spread, BinPack };

inline const char* to_string(Strategy s) {
    return s == Strategy::Spread ? "spread" : "binpack";
}

enum class SwarmRole { Manager, Replica, Agent };

inline const char* to_string(SwarmRole r) {
    switch (r) {
        case SwarmRole::Manager: return "manager";
        case SwarmRole::Replica: return "replica";
        case SwarmRole::Agent: return "agent";
    }
    return "?";
}

// What an agent reports to the discovery backend on each heartbeat.
struct NodeDescriptor {
    NodeId id;
    double available_memory_kb = 0.0;
    double available_cpu_fraction = 1.0;
    int running_containers = 0;
    double last_heartbeat_s = 0.0;
    bool reachable = true;  // path through the mesh to the primary
    double battery_level_mah = 0.0;
};

// "Most powerful" order for failover: free memory, then free CPU, then
// battery; the lowest id wins exact ties. Memory leads because it is the
// binding resource for container capacity.
struct PowerScore {
    double available_memory_kb = 0.0;
    double available_cpu_fraction = 0.0;
    double battery_level_mah = 0.0;
    NodeId id;

    bool operator>(const PowerScore& o) const {
        return std::tie(available_memory_kb, available_cpu_fraction, battery_level_mah) >
                       std::tie(o.available_memory_kb, o.available_cpu_fraction,
                                o.battery_level_mah) ||
               (std::tie(available_memory_kb, available_cpu_fraction, battery_level_mah) ==
                        std::tie(o.available_memory_kb, o.available_cpu_fraction,
                                 o.battery_level_mah) &&
                id < o.id);
    }
};

inline PowerScore power_score(const NodeDescriptor& d) {
    return PowerScore{d.available_memory_kb, d.available_cpu_fraction, d.battery_level_mah, d.id};
}

struct SwarmState {
    std::map<NodeId, NodeDescriptor> members;
    std::optional<NodeId> primary;
    std::vector<NodeId> replicas;  // standby managers, in registration order
    Strategy strategy = Strategy::Spread;
    std::uint64_t discovery_list_version = 0;

    bool headless() const { return !primary.has_value(); }
    bool is_member(const NodeId& id) const { return members.count(id) != 0; }
};

// Registration is idempotent: re-registering refreshes the descriptor.
// Either way the discovery list version moves.
inline void register_agent(SwarmState& state, const NodeDescriptor& desc) {
    state.members[desc.id] = desc;
    state.discovery_list_version += 1;
}

// Drops members whose heartbeat is older than the timeout. Returns the
// removed ids so the caller can orphan their containers and react to a
// lost primary.
inline std::vector<NodeId> prune_members(SwarmState& state, double now, double timeout) {
    std::vector<NodeId> removed;
    for (auto it = state.members.begin(); it != state.members.end();) {
        if (now - it->second.last_heartbeat_s > timeout) {
            removed.push_back(it->first);
            it = state.members.erase(it);
        } else {
            ++it;
        }
    }
    if (!removed.empty()) {
        state.discovery_list_version += 1;
        for (const NodeId& id : removed) {
            if (state.primary == id) {
                state.primary.reset();
            }
            std::erase(state.replicas, id);
        }
    }
    return removed;
}

inline bool fits(const NodeDescriptor& d, const ContainerSpec& spec) {
    return d.reachable && d.available_memory_kb >= memory_footprint(spec);
}

// Spread: balance the cluster. Fewest running containers first, most free
// memory second, lowest id last.
inline std::vector<NodeId> rank_spread(std::vector<NodeDescriptor> members,
                                       const ContainerSpec& spec) {
    std::erase_if(members, [&](const NodeDescriptor& d) { return !fits(d, spec); });
    std::sort(members.begin(), members.end(), [](const NodeDescriptor& a, const NodeDescriptor& b) {
        if (a.running_containers != b.running_containers) {
            return a.running_containers < b.running_containers;
        }
        if (a.available_memory_kb != b.available_memory_kb) {
            return a.available_memory_kb > b.available_memory_kb;
        }
        return a.id < b.id;
    });
    std::vector<NodeId> order;
    order.reserve(members.size());
    for (const NodeDescriptor& d : members) {
        order.push_back(d.id);
    }
    return order;
}

// Bin-pack: best fit. Smallest remainder after placement first, and a node
// already running containers always beats an empty one, so existing bins
// fill up before new ones open.
inline std::vector<NodeId> rank_binpack(std::vector<NodeDescriptor> members,
                                        const ContainerSpec& spec) {
    std::erase_if(members, [&](const NodeDescriptor& d) { return !fits(d, spec); });
    const double footprint = memory_footprint(spec);
    std::sort(members.begin(), members.end(),
              [footprint](const NodeDescriptor& a, const NodeDescriptor& b) {
                  const bool a_empty = a.running_containers == 0;
                  const bool b_empty = b.running_containers == 0;
                  if (a_empty != b_empty) {
                      return !a_empty;
                  }
                  const double rem_a = a.available_memory_kb - footprint;
                  const double rem_b = b.available_memory_kb - footprint;
                  if (rem_a != rem_b) {
                      return rem_a < rem_b;
                  }
                  return a.id < b.id;
              });
    std::vector<NodeId> order;
    order.reserve(members.size());
    for (const NodeDescriptor& d : members) {
        order.push_back(d.id);
    }
    return order;
}

struct PlacementDecision {
    enum class Status { Placed, NoCapacity, ManagerUnreachable, Headless };
    Status status = Status::NoCapacity;
    NodeId node;

    bool placed() const { return status == Status::Placed; }
};

inline const char* to_string(PlacementDecision::Status s) {
    switch (s) {
        case PlacementDecision::Status::Placed: return "placed";
        case PlacementDecision::Status::NoCapacity: return "no_capacity";
        case PlacementDecision::Status::ManagerUnreachable: return "manager_unreachable";
        case PlacementDecision::Status::Headless: return "headless";
    }
    return "?";
}

// First candidate of the active strategy's ranking. With no primary the
// swarm is headless: existing containers keep serving but nothing new is
// placed.
inline PlacementDecision schedule_container(const SwarmState& state, const ContainerSpec& spec) {
    PlacementDecision decision;
    if (state.headless()) {
        decision.status = PlacementDecision::Status::Headless;
        return decision;
    }
    std::vector<NodeDescriptor> live;
    live.reserve(state.members.size());
    bool any_reachable = false;
    for (const auto& [_, d] : state.members) {
        live.push_back(d);
        any_reachable = any_reachable || d.reachable;
    }
    if (!any_reachable) {
        decision.status = PlacementDecision::Status::ManagerUnreachable;
        return decision;
    }
    const std::vector<NodeId> ranking = state.strategy == Strategy::Spread
                                            ? rank_spread(std::move(live), spec)
                                            : rank_binpack(std::move(live), spec);
    if (ranking.empty()) {
        decision.status = PlacementDecision::Status::NoCapacity;
        return decision;
    }
    decision.status = PlacementDecision::Status::Placed;
    decision.node = ranking.front();
    return decision;
}

// Failover: the most powerful live replica takes over. Returns nothing when
// no replica is alive; the swarm then runs headless.
inline std::optional<NodeId> elect_primary(SwarmState& state, const std::set<NodeId>& live) {
    std::optional<PowerScore> best;
    for (const NodeId& replica : state.replicas) {
        if (!live.count(replica) || !state.is_member(replica)) {
            continue;
        }
        const PowerScore score = power_score(state.members.at(replica));
        if (!best || score > *best) {
            best = score;
        }
    }
    if (!best) {
        state.primary.reset();
        return std::nullopt;
    }
    state.primary = best->id;
    std::erase(state.replicas, best->id);
    return best->id;
}

}  // namespace dronecloud
