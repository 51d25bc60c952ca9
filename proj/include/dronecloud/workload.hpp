#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dronecloud/node.hpp"
#include "dronecloud/types.hpp"

namespace dronecloud {

struct WorkloadSpec {
    int concurrent_users = 10;
    std::int64_t total_requests = 10000;
    NodeId target_node;
    double service_demand_s = 0.012;  // per-request work at full speed
    double rtt_min_ms = 8.0;
    double rtt_max_ms = 10.0;
    double think_time_s = 0.0;
    // CPU a single in-flight request keeps busy, in cores. The measured
    // utilisation rises ~20 points between 10 and 250 users while the CPU
    // never saturates, so the sysstat-style utilisation is modeled as a
    // per-active-request draw rather than as the sharing dynamics.
    double cpu_draw_per_request = 0.0033;

    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct RequestRecord {
    std::uint64_t request_id = 0;
    int user_id = 0;
    int users = 0;  // concurrency level of the run this request belongs to
    double arrival_s = 0.0;
    double service_start_s = 0.0;
    double completion_s = 0.0;
    double rtt_ms = 0.0;

    double response_time_ms() const { return (completion_s - arrival_s) * 1000.0; }
};

struct TargetNotRunning : std::runtime_error {
    explicit TargetNotRunning(const NodeId& node)
        : std::runtime_error("no running container on target node " + node) {}
};
struct EmptySamples : std::invalid_argument {
    EmptySamples() : std::invalid_argument("cannot build a CDF from zero samples") {}
};

// Named time series; timestamps must be strictly increasing.
struct MetricsSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;

    void append(double t, double value) {
        if (!points.empty() && t <= points.back().first) {
            if (t == points.back().first) {
                points.back().second = value;  // same instant: keep latest
                return;
            }
            throw std::logic_error("series timestamps must increase: " + name);
        }
        points.emplace_back(t, value);
    }
};

// Egalitarian processor sharing over a node's effective cores: each of k
// concurrent requests progresses at min(1, c/k) CPU-seconds per second.
// Implemented with a service-credit clock: credit(t) = integral of the per-
// job rate, and a job admitted with work w completes when the credit has
// grown by w. Capacity changes (flight-mode shifts) just change the slope.
class PsQueue {
public:
    explicit PsQueue(double effective_cores = 4.0) : cores_(effective_cores) {}

    double effective_cores() const { return cores_; }
    std::size_t size() const { return jobs_.size(); }
    bool empty() const { return jobs_.empty(); }

    double rate() const {
        if (jobs_.empty()) {
            return 0.0;
        }
        return std::min(1.0, cores_ / static_cast<double>(jobs_.size()));
    }

    void advance_to(double now) {
        if (now > last_update_) {
            credit_ += rate() * (now - last_update_);
            last_update_ = now;
        }
    }

    void set_capacity(double effective_cores, double now) {
        advance_to(now);
        cores_ = effective_cores;
        ++generation_;
    }

    std::uint64_t add(double work_s, double now, std::uint64_t job_id) {
        advance_to(now);
        jobs_.emplace(credit_ + work_s, job_id);
        ++generation_;
        return generation_;
    }

    // Earliest completion among current jobs, given the current rate.
    std::optional<double> next_completion_time(double now) const {
        if (jobs_.empty()) {
            return std::nullopt;
        }
        const double remaining = jobs_.begin()->first - credit_;
        return now + std::max(0.0, remaining) / rate();
    }

    // Pops every job whose service target is met at `now`.
    std::vector<std::uint64_t> pop_completed(double now) {
        advance_to(now);
        std::vector<std::uint64_t> done;
        const double eps = 1e-12 * std::max(1.0, std::fabs(credit_));
        while (!jobs_.empty() && jobs_.begin()->first <= credit_ + eps) {
            done.push_back(jobs_.begin()->second);
            jobs_.erase(jobs_.begin());
        }
        if (!done.empty()) {
            ++generation_;
        }
        return done;
    }

    void clear() {
        jobs_.clear();
        ++generation_;
    }

    std::uint64_t generation() const { return generation_; }

private:
    double cores_;
    double credit_ = 0.0;
    double last_update_ = 0.0;
    std::uint64_t generation_ = 0;
    std::multimap<double, std::uint64_t> jobs_;  // service-credit target -> job
};

// Modeled sysstat view: per-active-request draw plus idle container draw
// plus the flight-control reservation, as a fraction of the whole node.
inline double cpu_utilization(const PiNodeModel& node, std::size_t active_requests,
                              int containers, double cpu_draw_per_request,
                              double cpu_idle_fraction) {
    if (!node.live()) {
        return 0.0;
    }
    const double c = node.effective_cores();
    const double request_cores =
        std::min(static_cast<double>(active_requests) * cpu_draw_per_request, c);
    double util = request_cores / static_cast<double>(node.cores);
    util += static_cast<double>(containers) * cpu_idle_fraction;
    if (node.mode == FlightMode::Flying) {
        util += node.flight_cpu_fraction;
    }
    return std::clamp(util, 0.0, 1.0);
}

// Unix-style 1-minute load: exponentially weighted mean of the run-queue
// length, updated continuously between observations.
class LoadAverage {
public:
    explicit LoadAverage(double window_s = 60.0) : window_s_(window_s) {}

    // Folds in the run-queue length that held from the last update to `now`.
    void update(double now, double runq_until_now) {
        if (now > last_update_) {
            const double decay = std::exp(-(now - last_update_) / window_s_);
            value_ = value_ * decay + runq_until_now * (1.0 - decay);
            last_update_ = now;
        }
    }

    double value() const { return value_; }
    double window_s() const { return window_s_; }

private:
    double window_s_;
    double value_ = 0.0;
    double last_update_ = 0.0;
};

// Step CDF over samples: sorted, deduplicated, final fraction exactly 1.
inline std::vector<std::pair<double, double>> compute_cdf(std::vector<double> samples) {
    if (samples.empty()) {
        throw EmptySamples();
    }
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> cdf;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 == samples.size() || samples[i + 1] != samples[i]) {
            cdf.emplace_back(samples[i], static_cast<double>(i + 1) / n);
        }
    }
    cdf.back().second = 1.0;
    return cdf;
}

inline double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) {
        throw EmptySamples();
    }
    std::sort(samples.begin(), samples.end());
    const double pos = q * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] * (1.0 - frac) + samples[hi] * frac;
}

}  // namespace dronecloud
