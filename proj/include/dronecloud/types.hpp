#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dronecloud {

// Node identifiers are strings throughout; ordering (and therefore every
// "lowest node id" tiebreak) is plain lexicographic comparison.
using NodeId = std::string;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Horizontal bearing of `to` as seen from `from`, degrees clockwise from
// north (+y), in [0, 360). Two points stacked vertically bear north.
inline double bearing_deg(const Vec3& from, const Vec3& to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    if (dx == 0.0 && dy == 0.0) {
        return 0.0;
    }
    double deg = std::atan2(dx, dy) * 180.0 / M_PI;
    if (deg < 0.0) {
        deg += 360.0;
    }
    return deg;
}

// Smallest absolute angular difference between two headings, in [0, 180].
inline double angular_distance_deg(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

struct NodeDepleted : std::runtime_error {
    explicit NodeDepleted(const NodeId& id)
        : std::runtime_error("node is depleted: " + id) {}
};

}  // namespace dronecloud
