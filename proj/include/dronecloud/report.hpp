#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dronecloud/types.hpp"
#include "dronecloud/workload.hpp"

namespace dronecloud {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error("io error: " + what) {}
};

// All numbers in report files are serialized with 9 significant digits so
// that identical runs digest identically.
inline std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline double round_sig9(double v) {
    return std::strtod(format_sig9(v).c_str(), nullptr);
}

struct SeriesRow {
    double time_s = 0.0;
    NodeId node;
    std::string metric;
    double value = 0.0;
};

struct CreationRecord {
    std::int64_t n = 0;  // 1-based creation sequence number
    double start_s = 0.0;
    double duration_s = 0.0;
    double mem_fraction = 0.0;  // node memory fraction once Running
    double cpu_fraction = 0.0;
    NodeId node;
};

struct StressSummary {
    int users = 0;
    NodeId node;
    std::int64_t requests_issued = 0;
    std::int64_t requests_completed = 0;
    double started_s = 0.0;
    double finished_s = 0.0;
    double min_response_ms = 0.0;
    double median_response_ms = 0.0;
    double mean_response_ms = 0.0;
    double max_response_ms = 0.0;
    double mean_cpu_utilization = 0.0;
    double final_load_average = 0.0;
};

struct NodeSummary {
    NodeId id;
    std::string mode;
    bool alive = true;
    double battery_level_mah = 0.0;
    double memory_fraction = 0.0;
    int running_containers = 0;
    std::optional<double> landed_at_s;
    std::optional<double> depleted_at_s;
};

struct FillSummary {
    std::int64_t count = 0;
    NodeId first_node;
    double start_mem_fraction = 0.0;
    double final_free_kb = 0.0;
    double min_creation_s = 0.0;
    double mean_creation_s = 0.0;
    double max_creation_s = 0.0;
    double total_creation_s = 0.0;
};

struct SwarmSummary {
    std::string final_primary;
    std::uint64_t discovery_list_version = 0;
    std::int64_t placements = 0;
    std::int64_t rejections = 0;
    std::int64_t elections = 0;
    std::string strategy;
};

struct SimReport {
    std::uint64_t seed = 0;
    std::uint64_t events_processed = 0;
    double end_clock_s = 0.0;

    std::vector<SeriesRow> series;
    std::vector<nlohmann::ordered_json> events;
    std::vector<RequestRecord> requests;
    std::vector<CreationRecord> creations;

    std::optional<FillSummary> fill;
    std::vector<StressSummary> stress;
    std::vector<NodeSummary> node_summaries;
    SwarmSummary swarm;

    nlohmann::ordered_json summary() const {
        nlohmann::ordered_json doc;
        doc["seed"] = seed;
        doc["events_processed"] = events_processed;
        doc["end_clock_s"] = round_sig9(end_clock_s);
        doc["swarm"] = {
            {"final_primary", swarm.final_primary},
            {"discovery_list_version", swarm.discovery_list_version},
            {"placements", swarm.placements},
            {"rejections", swarm.rejections},
            {"elections", swarm.elections},
            {"strategy", swarm.strategy},
        };
        if (fill) {
            doc["fill"] = {
                {"count", fill->count},
                {"first_node", fill->first_node},
                {"start_mem_fraction", round_sig9(fill->start_mem_fraction)},
                {"final_free_kb", round_sig9(fill->final_free_kb)},
                {"min_creation_s", round_sig9(fill->min_creation_s)},
                {"mean_creation_s", round_sig9(fill->mean_creation_s)},
                {"max_creation_s", round_sig9(fill->max_creation_s)},
                {"total_creation_s", round_sig9(fill->total_creation_s)},
            };
        } else {
            doc["fill"] = nullptr;
        }
        doc["stress"] = nlohmann::ordered_json::array();
        for (const StressSummary& s : stress) {
            doc["stress"].push_back({
                {"users", s.users},
                {"node", s.node},
                {"requests_issued", s.requests_issued},
                {"requests_completed", s.requests_completed},
                {"started_s", round_sig9(s.started_s)},
                {"finished_s", round_sig9(s.finished_s)},
                {"min_response_ms", round_sig9(s.min_response_ms)},
                {"median_response_ms", round_sig9(s.median_response_ms)},
                {"mean_response_ms", round_sig9(s.mean_response_ms)},
                {"max_response_ms", round_sig9(s.max_response_ms)},
                {"mean_cpu_utilization", round_sig9(s.mean_cpu_utilization)},
                {"final_load_average", round_sig9(s.final_load_average)},
            });
        }
        doc["nodes"] = nlohmann::ordered_json::array();
        for (const NodeSummary& n : node_summaries) {
            nlohmann::ordered_json entry{
                {"id", n.id},
                {"mode", n.mode},
                {"alive", n.alive},
                {"battery_level_mah", round_sig9(n.battery_level_mah)},
                {"memory_fraction", round_sig9(n.memory_fraction)},
                {"running_containers", n.running_containers},
            };
            entry["landed_at_s"] =
                n.landed_at_s ? nlohmann::ordered_json(round_sig9(*n.landed_at_s)) : nullptr;
            entry["depleted_at_s"] =
                n.depleted_at_s ? nlohmann::ordered_json(round_sig9(*n.depleted_at_s)) : nullptr;
            doc["nodes"].push_back(std::move(entry));
        }
        return doc;
    }
};

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

}  // namespace detail

// Writes series.csv, requests.csv, creations.csv, events.ndjson and
// summary.json into `dir` (created if missing).
inline void emit_metrics(const SimReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }

    {
        auto out = detail::open_for_write(dir / "series.csv");
        out << "time_s,node_id,metric,value\n";
        for (const SeriesRow& row : report.series) {
            out << format_sig9(row.time_s) << ',' << row.node << ',' << row.metric << ','
                << format_sig9(row.value) << '\n';
        }
    }
    {
        auto out = detail::open_for_write(dir / "requests.csv");
        out << "users,request_id,arrival_s,response_ms\n";
        for (const RequestRecord& r : report.requests) {
            out << r.users << ',' << r.request_id << ',' << format_sig9(r.arrival_s) << ','
                << format_sig9(r.response_time_ms()) << '\n';
        }
    }
    {
        auto out = detail::open_for_write(dir / "creations.csv");
        out << "n,start_s,duration_s,mem_fraction,cpu_fraction\n";
        for (const CreationRecord& c : report.creations) {
            out << c.n << ',' << format_sig9(c.start_s) << ',' << format_sig9(c.duration_s) << ','
                << format_sig9(c.mem_fraction) << ',' << format_sig9(c.cpu_fraction) << '\n';
        }
    }
    {
        auto out = detail::open_for_write(dir / "events.ndjson");
        for (const nlohmann::ordered_json& ev : report.events) {
            out << ev.dump() << '\n';
        }
    }
    {
        auto out = detail::open_for_write(dir / "summary.json");
        out << report.summary().dump(2) << '\n';
    }
}

}  // namespace dronecloud
