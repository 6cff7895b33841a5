#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "arcane/sim/engine.hpp"
#include "arcane/util/csv.hpp"

namespace arcane::sim {

inline std::string run_id(const std::string& name, std::uint64_t seed) { return name + "_s" + std::to_string(seed); }

inline std::string ports_csv(const std::vector<RunResult>& runs, TimeNs bucket_ns) {
    std::string out = "run_id,time_bucket_us,switch,port,bits_tx,queue_bytes_max\n";
    for (const auto& r : runs)
        for (const auto& s : r.ports)
            for (std::size_t b = 0; b < s.buckets.size(); ++b) {
                const double t_us = static_cast<double>(static_cast<TimeNs>(b) * bucket_ns) / 1000.0;
                out += (CsvRow{} << r.run_id << t_us << s.switch_name << s.port << s.buckets[b].bits_tx
                                 << s.buckets[b].queue_bytes_max)
                           .str();
                out += '\n';
            }
    return out;
}

inline std::string flows_csv(const std::vector<RunResult>& runs) {
    std::string out = "run_id,flow_id,src,dst,bytes,start_ns,fct_ns\n";
    for (const auto& r : runs)
        for (const auto& f : r.flows) {
            CsvRow row;
            row << r.run_id << f.spec.id << f.spec.src << f.spec.dst << f.spec.bytes << f.spec.start;
            if (f.fct)
                row << *f.fct;
            else
                row << "";
            out += row.str();
            out += '\n';
        }
    return out;
}

inline std::string drops_csv(const std::vector<RunResult>& runs) {
    std::string out = "run_id,cause,count\n";
    for (const auto& r : runs) {
        out += (CsvRow{} << r.run_id << "tail_drop" << r.drops.tail).str() + '\n';
        out += (CsvRow{} << r.run_id << "blackhole" << r.drops.blackhole).str() + '\n';
    }
    return out;
}

inline nlohmann::ordered_json config_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    const auto& t = c.topology;
    j["topology"] = {{"tiers", t.tiers},
                     {"nodes", t.nodes},
                     {"hosts_per_t0", t.hosts_per_t0},
                     {"uplinks_per_t0", t.uplinks_per_t0},
                     {"t0_per_pod", t.t0_per_pod},
                     {"t1_uplinks", t.t1_uplinks},
                     {"link_gbps", t.link_bps / 1e9},
                     {"host_link_gbps", (t.host_link_bps > 0 ? t.host_link_bps : t.link_bps) / 1e9},
                     {"link_latency_ns", t.link_latency_ns},
                     {"switch_latency_ns", t.switch_latency_ns}};
    const auto& w = c.workload;
    j["workload"] = {{"kind", std::string(workload::to_string(w.kind))},
                     {"message_bytes", w.message_bytes},
                     {"incast_degree", w.incast_degree},
                     {"load", w.load_fraction},
                     {"start_us", static_cast<double>(w.start) / 1000.0},
                     {"horizon_us", static_cast<double>(w.horizon) / 1000.0}};
    const auto& tr = c.transport;
    j["transport"] = {{"mtu_bytes", tr.mtu_bytes},
                      {"ack_bytes", tr.ack_bytes},
                      {"rto_us", static_cast<double>(tr.rto_ns) / 1000.0},
                      {"ack_coalesce", tr.ack_coalesce},
                      {"cwnd_init_bdp_fraction", tr.cwnd_init_bdp_fraction},
                      {"ack_loss", tr.ack_loss}};
    j["lb"] = std::string(lb::to_string(c.lb.kind));
    const auto& a = c.lb.arcane;
    j["arcane"] = {{"buffer_size", a.buffer_size},
                   {"freezing_timeout_us", static_cast<double>(a.freezing_timeout) / 1000.0},
                   {"bdp_packets", a.bdp_packets},
                   {"evs_size", a.evs_size},
                   {"tick_exit", a.tick_exit}};
    j["queue"] = {{"capacity_bytes", c.queue_capacity_bytes},
                  {"kmin_fraction", c.kmin_fraction},
                  {"kmax_fraction", c.kmax_fraction}};
    auto fails = nlohmann::ordered_json::array();
    for (const auto& f : c.failures)
        fails.push_back({{"link", f.link},
                         {"start_us", static_cast<double>(f.start) / 1000.0},
                         {"end_us", static_cast<double>(f.end) / 1000.0},
                         {"mode", f.mode == net::LinkMode::down ? "down" : "degraded"},
                         {"capacity_gbps", f.capacity_bps / 1e9}});
    j["failures"] = fails;
    j["output"] = {{"bucket_us", static_cast<double>(c.bucket_ns) / 1000.0}};
    j["sim"] = {{"horizon_us", static_cast<double>(c.horizon_ns) / 1000.0}, {"max_events", c.max_events}};
    return j;
}

inline nlohmann::ordered_json run_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["seed"] = r.seed;
    j["all_complete"] = r.all_complete;
    if (const auto ct = r.completion_time())
        j["completion_ns"] = *ct;
    else
        j["completion_ns"] = nullptr;
    j["end_time_ns"] = r.end_time;
    j["events"] = r.events;
    j["packets"] = {{"injected", r.injected},
                    {"data", r.data_injected},
                    {"acks", r.acks_injected},
                    {"delivered", r.delivered},
                    {"in_flight_end", r.in_flight_end},
                    {"conserved", r.conserved}};
    j["drops"] = {{"tail_drop", r.drops.tail}, {"blackhole", r.drops.blackhole}};
    j["failed_port_packets"] = r.failed_port_packets;
    std::uint64_t retx = 0;
    for (const auto& f : r.flows) retx += f.retransmissions;
    j["retransmissions"] = retx;
    j["derived"] = {{"base_rtt_ns", r.base_rtt_ns},
                    {"bdp_bytes", r.bdp_bytes},
                    {"bdp_packets", r.bdp_packets},
                    {"queue_capacity_bytes", r.queue_capacity_bytes},
                    {"kmin_bytes", r.kmin_bytes}};
    return j;
}

inline std::string summary_json(const SimConfig& cfg, const std::vector<RunResult>& runs) {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    auto seeds = nlohmann::ordered_json::array();
    for (const auto& r : runs) seeds.push_back(r.seed);
    j["seeds"] = seeds;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : runs) arr.push_back(run_json(r));
    j["runs"] = arr;
    return j.dump(2) + "\n";
}

inline void write_outputs(const std::filesystem::path& dir, const SimConfig& cfg, const std::vector<RunResult>& runs) {
    atomic_write(dir / "ports.csv", ports_csv(runs, cfg.bucket_ns));
    atomic_write(dir / "flows.csv", flows_csv(runs));
    atomic_write(dir / "drops.csv", drops_csv(runs));
    atomic_write(dir / "summary.json", summary_json(cfg, runs));
}

}  // namespace arcane::sim
