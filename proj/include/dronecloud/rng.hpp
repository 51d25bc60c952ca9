#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace dronecloud {

// Deterministic random stream built on SplitMix64 (Steele, Lea & Flood).
// SplitMix64 is a counter-based generator: the state advances by a fixed
// odd constant and the output is a bijective scramble of the counter, so
// the sequence for a given (seed, stream_id) is identical on every
// platform and independent of how many draws other streams have made.
//
// Each stochastic source in a simulation gets its own named stream; the
// stream id is hashed (FNV-1a) into the initial counter so that streams
// derived from one scenario seed do not overlap in practice.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : seed_(seed), stream_id_(stream_id) {
        state_ = scramble(seed ^ fnv1a(stream_id));
    }

    std::uint64_t seed() const { return seed_; }
    const std::string& stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return scramble(state_);
    }

    // Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via the Marsaglia polar method (no trig, so no
    // dependence on libm cos/sin rounding). Draws are consumed in pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // Multiplicative noise factor with mean exactly 1: exp(sigma*z - sigma^2/2).
    double lognormal_mean_one(double sigma) {
        if (sigma <= 0.0) {
            return 1.0;
        }
        return std::exp(sigma * normal() - 0.5 * sigma * sigma);
    }

private:
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    }

    std::uint64_t seed_;
    std::string stream_id_;
    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dronecloud
