#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "dronecloud/node.hpp"
#include "dronecloud/types.hpp"

namespace dronecloud {

struct ZeroDistance : std::runtime_error {
    ZeroDistance() : std::runtime_error("rssi undefined at zero distance") {}
};
struct UnknownNode : std::runtime_error {
    explicit UnknownNode(const NodeId& id)
        : std::runtime_error("node not in link table: " + id) {}
};

struct SectorParams {
    double rssi_at_d0_dbm = -65.0;
    double path_loss_exponent = 2.0;

    friend bool operator==(const SectorParams&, const SectorParams&) = default;
};

// Two-sector log-distance path loss, fitted through the field measurements:
// the front lobe (everything within 135 degrees of the dongle heading,
// covering N/E/W for a north-facing dongle) runs -65 dBm at 10 m down to
// -78 dBm at 50 m; the rear lobe (the 90-degree cone away from the dongle)
// runs -75 to -89 dBm over the same span.
struct RadioModel {
    SectorParams front{-65.0, 13.0 / (10.0 * 0.698970004336019)};  // n ~ 1.86
    SectorParams rear{-75.0, 14.0 / (10.0 * 0.698970004336019)};   // n ~ 2.00
    double connect_threshold_dbm = -85.0;
    double reference_distance_m = 10.0;
    double rear_halfwidth_deg = 45.0;

    friend bool operator==(const RadioModel&, const RadioModel&) = default;
};

inline const SectorParams& sector_for(const RadioModel& radio, double tx_heading_deg,
                                      double bearing_to_rx_deg) {
    const double away = tx_heading_deg + 180.0;
    const bool rear = angular_distance_deg(bearing_to_rx_deg, away) <= radio.rear_halfwidth_deg;
    return rear ? radio.rear : radio.front;
}

inline double rssi(const RadioModel& radio, const Vec3& tx_pos, double tx_heading_deg,
                   const Vec3& rx_pos) {
    const double d = distance(tx_pos, rx_pos);
    if (d <= 0.0) {
        throw ZeroDistance();
    }
    const SectorParams& sector = sector_for(radio, tx_heading_deg, bearing_deg(tx_pos, rx_pos));
    return sector.rssi_at_d0_dbm -
           10.0 * sector.path_loss_exponent * std::log10(d / radio.reference_distance_m);
}

inline double rssi(const RadioModel& radio, const PiNodeModel& tx, const Vec3& rx_pos) {
    return rssi(radio, tx.position, tx.dongle_heading_deg, rx_pos);
}

// Symmetric adjacency with per-direction RSSI annotations. An edge exists
// only when both directions clear the connect threshold.
class LinkTable {
public:
    void add_node(const NodeId& id) { adj_[id]; }

    void add_edge(const NodeId& a, const NodeId& b, double rssi_ab, double rssi_ba) {
        adj_[a][b] = rssi_ab;
        adj_[b][a] = rssi_ba;
    }

    bool has_node(const NodeId& id) const { return adj_.count(id) != 0; }

    bool linked(const NodeId& a, const NodeId& b) const {
        auto it = adj_.find(a);
        return it != adj_.end() && it->second.count(b) != 0;
    }

    const std::map<NodeId, double>& neighbors(const NodeId& id) const {
        auto it = adj_.find(id);
        if (it == adj_.end()) {
            throw UnknownNode(id);
        }
        return it->second;
    }

    const std::map<NodeId, std::map<NodeId, double>>& adjacency() const { return adj_; }

    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const {
        std::size_t degree_sum = 0;
        for (const auto& [_, nbrs] : adj_) {
            degree_sum += nbrs.size();
        }
        return degree_sum / 2;
    }

    friend bool operator==(const LinkTable&, const LinkTable&) = default;

private:
    std::map<NodeId, std::map<NodeId, double>> adj_;
};

// Derives the mesh from node positions. Depleted and dead nodes neither
// appear nor relay.
template <typename NodeRange>
LinkTable derive_links(const NodeRange& nodes, const RadioModel& radio) {
    std::vector<const PiNodeModel*> live;
    for (const PiNodeModel& n : nodes) {
        if (n.live()) {
            live.push_back(&n);
        }
    }
    LinkTable table;
    for (const PiNodeModel* n : live) {
        table.add_node(n->id);
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
        for (std::size_t j = i + 1; j < live.size(); ++j) {
            const PiNodeModel& a = *live[i];
            const PiNodeModel& b = *live[j];
            const double ab = rssi(radio, a, b.position);
            const double ba = rssi(radio, b, a.position);
            if (ab >= radio.connect_threshold_dbm && ba >= radio.connect_threshold_dbm) {
                table.add_edge(a.id, b.id, ab, ba);
            }
        }
    }
    return table;
}

struct NeighborSets {
    std::set<NodeId> one_hop;
    std::set<NodeId> two_hop;  // strict: excludes v and all of one_hop
};

inline NeighborSets neighbor_sets(const LinkTable& links, const NodeId& v) {
    NeighborSets sets;
    for (const auto& [nbr, _] : links.neighbors(v)) {
        sets.one_hop.insert(nbr);
    }
    for (const NodeId& n1 : sets.one_hop) {
        for (const auto& [nbr2, _] : links.neighbors(n1)) {
            if (nbr2 != v && !sets.one_hop.count(nbr2)) {
                sets.two_hop.insert(nbr2);
            }
        }
    }
    return sets;
}

struct MprSet {
    NodeId selector;
    std::set<NodeId> relays;
};

// Greedy MPR selection: members that are the sole cover of some 2-hop
// neighbor are taken first, then whichever candidate covers the most
// still-uncovered 2-hop neighbors (ties to the lowest id).
inline MprSet select_mpr(const NodeId& selector, const std::set<NodeId>& one_hop,
                         const std::set<NodeId>& two_hop,
                         const std::map<NodeId, std::set<NodeId>>& cover) {
    MprSet result;
    result.selector = selector;
    if (two_hop.empty()) {
        return result;
    }

    std::set<NodeId> uncovered = two_hop;
    auto mark_covered = [&](const NodeId& relay) {
        auto it = cover.find(relay);
        if (it != cover.end()) {
            for (const NodeId& t : it->second) {
                uncovered.erase(t);
            }
        }
    };

    // Sole covers first.
    for (const NodeId& target : two_hop) {
        const NodeId* only = nullptr;
        int count = 0;
        for (const NodeId& n1 : one_hop) {
            auto it = cover.find(n1);
            if (it != cover.end() && it->second.count(target)) {
                only = &n1;
                if (++count > 1) {
                    break;
                }
            }
        }
        if (count == 1 && !result.relays.count(*only)) {
            result.relays.insert(*only);
        }
    }
    for (const NodeId& relay : result.relays) {
        mark_covered(relay);
    }

    while (!uncovered.empty()) {
        const NodeId* best = nullptr;
        std::size_t best_gain = 0;
        for (const NodeId& n1 : one_hop) {
            if (result.relays.count(n1)) {
                continue;
            }
            std::size_t gain = 0;
            auto it = cover.find(n1);
            if (it != cover.end()) {
                for (const NodeId& t : it->second) {
                    gain += uncovered.count(t);
                }
            }
            if (gain > best_gain) {  // strict: earlier (lower) id wins ties
                best_gain = gain;
                best = &n1;
            }
        }
        if (best == nullptr) {
            break;  // uncoverable targets; violates the precondition
        }
        result.relays.insert(*best);
        mark_covered(*best);
    }
    return result;
}

inline MprSet select_mpr(const LinkTable& links, const NodeId& v) {
    const NeighborSets sets = neighbor_sets(links, v);
    std::map<NodeId, std::set<NodeId>> cover;
    for (const NodeId& n1 : sets.one_hop) {
        std::set<NodeId>& reach = cover[n1];
        for (const auto& [nbr, _] : links.neighbors(n1)) {
            if (sets.two_hop.count(nbr)) {
                reach.insert(nbr);
            }
        }
    }
    return select_mpr(v, sets.one_hop, sets.two_hop, cover);
}

inline std::map<NodeId, MprSet> mpr_sets(const LinkTable& links) {
    std::map<NodeId, MprSet> result;
    for (const auto& [id, _] : links.adjacency()) {
        result.emplace(id, select_mpr(links, id));
    }
    return result;
}

struct FloodResult {
    std::size_t transmissions = 0;
    std::set<NodeId> reached;
};

// MPR flooding: a node retransmits a message exactly once, and only if it
// is an MPR of the node it first received the message from. Transmissions
// propagate in hop-synchronous order; ties resolve by node id.
inline FloodResult flood_mpr(const NodeId& origin, const LinkTable& links,
                             const std::map<NodeId, MprSet>& relays) {
    if (!links.has_node(origin)) {
        throw UnknownNode(origin);
    }
    FloodResult result;
    result.reached.insert(origin);
    std::map<NodeId, NodeId> first_sender;
    std::vector<NodeId> transmitting{origin};
    while (!transmitting.empty()) {
        std::vector<NodeId> next;
        for (const NodeId& sender : transmitting) {
            result.transmissions += 1;
            for (const auto& [nbr, _] : links.neighbors(sender)) {
                if (!result.reached.count(nbr)) {
                    result.reached.insert(nbr);
                    first_sender.emplace(nbr, sender);
                    next.push_back(nbr);
                }
            }
        }
        transmitting.clear();
        std::sort(next.begin(), next.end());
        for (const NodeId& node : next) {
            auto rel = relays.find(first_sender.at(node));
            if (rel != relays.end() && rel->second.relays.count(node)) {
                transmitting.push_back(node);
            }
        }
    }
    return result;
}

// Blind flooding: every node that receives the message retransmits it once.
inline FloodResult flood_blind(const NodeId& origin, const LinkTable& links) {
    std::map<NodeId, MprSet> all;
    for (const auto& [id, nbrs] : links.adjacency()) {
        MprSet everyone;
        everyone.selector = id;
        for (const auto& [nbr, _] : nbrs) {
            everyone.relays.insert(nbr);
        }
        all.emplace(id, std::move(everyone));
    }
    return flood_mpr(origin, links, all);
}

}  // namespace dronecloud
