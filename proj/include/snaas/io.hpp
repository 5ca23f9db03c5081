#pragma once

// Serialization: scenario JSON (full replayable world state), plan JSON,
// enforcement traces, simulation results, and the CSV tables the CLI emits.
// Every CSV starts with a provenance comment (tool version, seed, config
// hash) so result files are traceable to their inputs.

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "snaas/des.hpp"
#include "snaas/enforcement.hpp"
#include "snaas/workload.hpp"

namespace snaas {

inline constexpr const char* kToolName = "snaas";
inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

// ---- provenance ----

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Provenance {
    std::string version = kToolVersion;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

inline std::string provenance_comment(const Provenance& p) {
    std::ostringstream os;
    os << "# " << kToolName << " " << p.version << " seed=" << p.seed << " config=" << std::hex
       << std::setw(16) << std::setfill('0') << p.config_hash;
    return os.str();
}

// ---- json conversions (ADL hooks for nlohmann) ----

inline void to_json(json& j, const Vec2& v) { j = json{{"x", v.x}, {"y", v.y}}; }
inline void from_json(const json& j, Vec2& v) {
    j.at("x").get_to(v.x);
    j.at("y").get_to(v.y);
}

inline void to_json(json& j, const Drone& d) {
    j = json{{"id", d.id},         {"role", to_string(d.role)}, {"pos", d.pos},
             {"altitude", d.altitude}, {"mu", d.mu},            {"capacity", d.capacity}};
}
inline void from_json(const json& j, Drone& d) {
    j.at("id").get_to(d.id);
    d.role = role_from_string(j.at("role").get<std::string>());
    j.at("pos").get_to(d.pos);
    j.at("altitude").get_to(d.altitude);
    j.at("mu").get_to(d.mu);
    j.at("capacity").get_to(d.capacity);
}

inline void to_json(json& j, const Device& d) {
    j = json{{"id", d.id}, {"pos", d.pos}, {"lambda", d.lambda}};
}
inline void from_json(const json& j, Device& d) {
    j.at("id").get_to(d.id);
    j.at("pos").get_to(d.pos);
    j.at("lambda").get_to(d.lambda);
}

inline void to_json(json& j, const Topology& t) {
    j = json{{"drones", t.drones}, {"devices", t.devices}};
}
inline void from_json(const json& j, Topology& t) {
    j.at("drones").get_to(t.drones);
    j.at("devices").get_to(t.devices);
}

inline void to_json(json& j, const LinkBudget& lb) {
    json rss = json::object();
    for (const auto& [alt, dbm] : lb.mean_rss_dbm) rss[std::to_string(alt)] = dbm;
    j = json{{"tx_power_dbm", lb.tx_power_dbm},
             {"carrier_ghz", lb.carrier_ghz},
             {"bandwidth_hz", lb.bandwidth_hz},
             {"noise_figure_db", lb.noise_figure_db},
             {"phy_efficiency", lb.phy_efficiency},
             {"data_packet_bits", lb.data_packet_bits},
             {"control_packet_bits", lb.control_packet_bits},
             {"mean_rss_dbm", rss}};
}
inline void from_json(const json& j, LinkBudget& lb) {
    j.at("tx_power_dbm").get_to(lb.tx_power_dbm);
    j.at("carrier_ghz").get_to(lb.carrier_ghz);
    j.at("bandwidth_hz").get_to(lb.bandwidth_hz);
    j.at("noise_figure_db").get_to(lb.noise_figure_db);
    j.at("phy_efficiency").get_to(lb.phy_efficiency);
    j.at("data_packet_bits").get_to(lb.data_packet_bits);
    j.at("control_packet_bits").get_to(lb.control_packet_bits);
    lb.mean_rss_dbm.clear();
    for (const auto& [key, val] : j.at("mean_rss_dbm").items())
        lb.mean_rss_dbm[std::stod(key)] = val.get<double>();
}

inline void to_json(json& j, const TrafficConfig& t) {
    j = json{{"control_fraction", t.control_fraction},
             {"control_bits", t.control_bits},
             {"data_bits", t.data_bits},
             {"service_dist", to_string(t.dist)}};
}
inline void from_json(const json& j, TrafficConfig& t) {
    j.at("control_fraction").get_to(t.control_fraction);
    j.at("control_bits").get_to(t.control_bits);
    j.at("data_bits").get_to(t.data_bits);
    t.dist = dist_from_string(j.at("service_dist").get<std::string>());
}

inline void to_json(json& j, const SlaSpec& s) {
    j = json{{"latency_bound", s.latency_bound},
             {"metric", to_string(s.metric)},
             {"rho_max", s.rho_max}};
}
inline void from_json(const json& j, SlaSpec& s) {
    j.at("latency_bound").get_to(s.latency_bound);
    s.metric = metric_from_string(j.at("metric").get<std::string>());
    j.at("rho_max").get_to(s.rho_max);
}

inline void to_json(json& j, const CompositionPlan& p) {
    json fwd = json::array();
    for (const auto& [from, to] : p.forward) fwd.push_back(json::array({from, to}));
    j = json{{"strategy", to_string(p.strategy)},
             {"alpha", p.alpha},
             {"k", p.k},
             {"forward", fwd},
             {"paths", p.paths},
             {"cluster_heads", p.cluster_heads},
             {"discipline", p.discipline}};
}
inline void from_json(const json& j, CompositionPlan& p) {
    p.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    j.at("alpha").get_to(p.alpha);
    j.at("k").get_to(p.k);
    p.forward.clear();
    for (const auto& e : j.at("forward"))
        p.forward[e.at(0).get<DroneId>()] = e.at(1).get<DroneId>();
    j.at("paths").get_to(p.paths);
    j.at("cluster_heads").get_to(p.cluster_heads);
    j.at("discipline").get_to(p.discipline);
}

// ---- scenario: the replayable unit of input ----

struct Scenario {
    std::string name = "scenario";
    WorkloadConfig workload;
    TrafficConfig traffic;
    SlaSpec sla;
    Topology topo;
};

inline void to_json(json& j, const WorkloadConfig& w) {
    j = json{{"area", w.area},
             {"altitude", w.altitude},
             {"per_device_lambda", w.per_device_lambda},
             {"link", w.link}};
}
inline void from_json(const json& j, WorkloadConfig& w) {
    j.at("area").get_to(w.area);
    j.at("altitude").get_to(w.altitude);
    j.at("per_device_lambda").get_to(w.per_device_lambda);
    j.at("link").get_to(w.link);
}

inline void to_json(json& j, const Scenario& s) {
    j = json{{"version", kToolVersion}, {"name", s.name},   {"workload", s.workload},
             {"traffic", s.traffic},    {"sla", s.sla},     {"topology", s.topo}};
}
inline void from_json(const json& j, Scenario& s) {
    j.at("name").get_to(s.name);
    j.at("workload").get_to(s.workload);
    j.at("traffic").get_to(s.traffic);
    j.at("sla").get_to(s.sla);
    j.at("topology").get_to(s.topo);
}

inline std::uint64_t scenario_hash(const Scenario& s) { return fnv1a(json(s).dump()); }

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

inline Scenario load_scenario(const std::string& path) {
    return load_json(path).get<Scenario>();
}

// ---- evaluation / trace / simulation output ----

inline void to_json(json& j, const NodeDelay& nd) {
    j = json{{"rho", nd.rho}, {"rho_c", nd.rho_c}, {"stable", nd.stable}};
    if (nd.stable) {
        j["residual"] = *nd.residual;
        j["wait_c"] = *nd.wait_c;
        j["wait_d"] = *nd.wait_d;
        j["sojourn_c"] = *nd.sojourn_c;
        j["sojourn_d"] = *nd.sojourn_d;
    }
}

inline void to_json(json& j, const CandidateEvaluation& ev) {
    j = json{{"constructed", ev.constructed},
             {"feasible", ev.feasible},
             {"reason", ev.reason},
             {"index", ev.index}};
    if (ev.constructed) {
        j["plan"] = ev.plan;
        j["l_avg"] = ev.latency.l_avg ? json(*ev.latency.l_avg) : json(nullptr);
        j["l_max"] = ev.latency.l_max ? json(*ev.latency.l_max) : json(nullptr);
        json delays = json::object();
        for (const auto& [id, nd] : ev.delays) delays[std::to_string(id)] = nd;
        j["delays"] = delays;
    }
}

inline void to_json(json& j, const EditRecord& r) {
    j = json{{"edit", to_string(r.kind)},
             {"cycle", r.cycle},
             {"applied", r.applied},
             {"detail", r.detail},
             {"pre_max_rho", r.pre_max_rho},
             {"post_max_rho", r.post_max_rho},
             {"pre_sla", r.pre_sla ? json(*r.pre_sla) : json(nullptr)},
             {"post_sla", r.post_sla ? json(*r.post_sla) : json(nullptr)}};
}

inline void to_json(json& j, const ScaleOutSuggestion& s) {
    j = json{{"added_gateways", s.added_gateways},
             {"clone_mu", s.clone_mu},
             {"position", s.position},
             {"projected_utilization", s.projected_utilization}};
}

inline void to_json(json& j, const EnforcementOutcome& o) {
    j = json{{"compliant", o.compliant},
             {"cycles", o.cycles},
             {"demand_reduction", o.demand_reduction},
             {"final_plan", o.final_plan},
             {"final", json{{"feasible", o.final_eval.feasible},
                            {"l_avg", o.final_eval.latency.l_avg
                                          ? json(*o.final_eval.latency.l_avg)
                                          : json(nullptr)},
                            {"l_max", o.final_eval.latency.l_max
                                          ? json(*o.final_eval.latency.l_max)
                                          : json(nullptr)}}},
             {"edits", o.edits},
             {"scaleout", o.scaleout_suggestion ? json(*o.scaleout_suggestion) : json(nullptr)},
             {"downgrade_latency_bound",
              o.downgrade_suggestion ? json(*o.downgrade_suggestion) : json(nullptr)}};
}

inline void to_json(json& j, const SimResult& r) {
    json nodes = json::object();
    for (const auto& [id, ns] : r.nodes) {
        nodes[std::to_string(id)] = json{{"rho_empirical", ns.rho_empirical},
                                         {"wait_c", ns.ctrl.mean_wait},
                                         {"wait_d", ns.data.mean_wait},
                                         {"samples_c", ns.ctrl.samples},
                                         {"samples_d", ns.data.samples},
                                         {"arrivals_d", ns.arrivals_d},
                                         {"departures_d", ns.departures_d}};
    }
    json sources = json::object();
    for (const auto& [id, ss] : r.per_source)
        sources[std::to_string(id)] =
            json{{"completed", ss.completed}, {"mean_sojourn", ss.mean_sojourn}};
    j = json{{"nodes", nodes},
             {"per_source", sources},
             {"l_avg", r.l_avg ? json(*r.l_avg) : json(nullptr)},
             {"l_max", r.l_max ? json(*r.l_max) : json(nullptr)},
             {"generated_c", r.generated_c},
             {"generated_d", r.generated_d},
             {"completed_c", r.completed_c},
             {"completed_d", r.completed_d}};
}

// ---- CSV writers ----

// Selection / baseline evaluation table, one row per candidate.
inline void write_evaluation_csv(std::ostream& os, const std::vector<CandidateEvaluation>& table,
                                 const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "index,strategy,alpha,k,constructed,feasible,l_avg,l_max,reason\n";
    os << std::setprecision(17);
    for (const auto& ev : table) {
        os << ev.index << "," << to_string(ev.plan.strategy) << "," << ev.plan.alpha << ","
           << ev.plan.k << "," << (ev.constructed ? 1 : 0) << "," << (ev.feasible ? 1 : 0)
           << ",";
        if (ev.latency.l_avg) os << *ev.latency.l_avg;
        os << ",";
        if (ev.latency.l_max) os << *ev.latency.l_max;
        os << ",\"" << ev.reason << "\"\n";
    }
}

// Per-node analytic delay table for one plan.
inline void write_delay_csv(std::ostream& os, const Topology& topo,
                            const std::map<DroneId, NodeQueueInput>& arrivals,
                            const std::map<DroneId, NodeDelay>& delays, const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "drone,role,lambda_c,lambda_d,rho,rho_c,stable,wait_c,wait_d,sojourn_c,sojourn_d\n";
    os << std::setprecision(17);
    for (const auto& [id, nd] : delays) {
        const auto& in = arrivals.at(id);
        os << id << "," << to_string(topo.drone(id).role) << "," << in.lambda_c << ","
           << in.lambda_d << "," << nd.rho << "," << nd.rho_c << "," << (nd.stable ? 1 : 0)
           << ",";
        if (nd.stable)
            os << *nd.wait_c << "," << *nd.wait_d << "," << *nd.sojourn_c << "," << *nd.sojourn_d;
        else
            os << ",,,";
        os << "\n";
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace snaas
