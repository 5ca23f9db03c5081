#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snaas/composition.hpp"
#include "snaas/core.hpp"

namespace snaas {

enum class FormulaMode { Paper, Standard };

inline const char* to_string(FormulaMode m) {
    return m == FormulaMode::Paper ? "paper" : "standard";
}

inline FormulaMode mode_from_string(const std::string& s) {
    if (s == "paper") return FormulaMode::Paper;
    if (s == "standard") return FormulaMode::Standard;
    throw std::invalid_argument("unknown formula mode: " + s);
}

enum class ServiceDist { Deterministic, Exponential };

inline const char* to_string(ServiceDist d) {
    return d == ServiceDist::Deterministic ? "deterministic" : "exponential";
}

inline ServiceDist dist_from_string(const std::string& s) {
    if (s == "deterministic") return ServiceDist::Deterministic;
    if (s == "exponential") return ServiceDist::Exponential;
    throw std::invalid_argument("unknown service distribution: " + s);
}

// Traffic/service shape shared by the analytic model and the simulator.
// Control frames are `control_bits/data_bits` the size of data frames and are
// generated at `control_fraction` of each drone's locally offered data rate,
// then forwarded along the same composition.
struct TrafficConfig {
    double control_fraction = 0.05;
    double control_bits = 256.0;
    double data_bits = 8192.0;
    ServiceDist dist = ServiceDist::Deterministic;

    double control_size_ratio() const { return control_bits / data_bits; }
};

struct ClassMoments {
    double xbar = 0.0;  // E[S]
    double x2 = 0.0;    // E[S^2]
};

inline ClassMoments class_moments(double xbar, ServiceDist dist) {
    return {xbar, dist == ServiceDist::Exponential ? 2.0 * xbar * xbar : xbar * xbar};
}

// Two-class (control = high priority, data = low) M/G/1 queue input.
struct NodeQueueInput {
    double lambda_c = 0.0;
    double lambda_d = 0.0;
    double own_data = 0.0;  // portion of lambda_d generated by this drone's devices
    ClassMoments ctrl;
    ClassMoments data;
};

struct NodeDelay {
    double rho = 0.0;
    double rho_c = 0.0;
    bool stable = false;
    // Unset when the node is unstable: infinities stay explicit, never a
    // sentinel float.
    std::optional<double> residual;
    std::optional<double> wait_c, wait_d;
    std::optional<double> sojourn_c, sojourn_d;
};

// Non-preemptive two-priority single-server delay.
//   rho   = lc*xc + ld*xd,  rho_c = lc*xc
//   paper mode:    R = (lc*x2c + ld*x2d) / (2 * (1 - rho))
//   standard mode: R = (lc*x2c + ld*x2d) / 2
//   W_c = R / (1 - rho_c),  W_d = R / ((1 - rho_c) * (1 - rho)),  D = W + xbar
inline NodeDelay node_delay(const NodeQueueInput& in, FormulaMode mode) {
    NodeDelay out;
    out.rho_c = in.lambda_c * in.ctrl.xbar;
    out.rho = out.rho_c + in.lambda_d * in.data.xbar;
    out.stable = out.rho < 1.0;
    if (!out.stable) return out;

    double num = in.lambda_c * in.ctrl.x2 + in.lambda_d * in.data.x2;
    double r = (mode == FormulaMode::Paper) ? num / (2.0 * (1.0 - out.rho)) : num / 2.0;
    out.residual = r;
    out.wait_c = r / (1.0 - out.rho_c);
    out.wait_d = r / ((1.0 - out.rho_c) * (1.0 - out.rho));
    out.sojourn_c = *out.wait_c + in.ctrl.xbar;
    out.sojourn_d = *out.wait_d + in.data.xbar;
    return out;
}

// Routing-induced arrival rates. Every drone queues what its own devices
// offer plus everything forwarded into it; gateways are the final stage, so
// summed over gateways the data rate equals total device demand.
inline std::map<DroneId, NodeQueueInput> derive_node_arrivals(const Topology& topo,
                                                              const CompositionPlan& plan,
                                                              const Allocation& alloc,
                                                              const TrafficConfig& traffic) {
    auto own = alloc.offered_rate(topo);

    // participating nodes: all forward-map sources and targets
    std::set<DroneId> nodes;
    for (const auto& [from, to] : plan.forward) {
        nodes.insert(from);
        nodes.insert(to);
    }

    std::map<DroneId, double> lam_d, lam_c;
    for (DroneId id : nodes) {
        lam_d[id] = own.count(id) ? own[id] : 0.0;
        lam_c[id] = traffic.control_fraction * lam_d[id];
    }
    // push every source's full demand along its route
    for (const auto& [src, unused] : plan.forward) {
        (void)unused;
        double d = own.count(src) ? own[src] : 0.0;
        if (d <= 0.0) continue;
        double c = traffic.control_fraction * d;
        auto route = plan.route_from(src);
        for (std::size_t i = 1; i < route.size(); ++i) {
            lam_d[route[i]] += d;
            lam_c[route[i]] += c;
        }
    }

    std::map<DroneId, NodeQueueInput> out;
    for (DroneId id : nodes) {
        const auto& dr = topo.drone(id);
        NodeQueueInput in;
        in.lambda_d = lam_d[id];
        in.lambda_c = lam_c[id];
        in.own_data = own.count(id) ? own[id] : 0.0;
        double xd = dr.mu > 0 ? 1.0 / dr.mu : 0.0;
        in.data = class_moments(xd, traffic.dist);
        in.ctrl = class_moments(xd * traffic.control_size_ratio(), traffic.dist);
        out[id] = in;
    }
    return out;
}

enum class PacketClass { Control, Data };

// Sum of per-node sojourn times along `path` for the given class.
// Throws UnstablePathError if any node on the path is saturated.
inline double path_latency(const std::vector<DroneId>& path,
                           const std::map<DroneId, NodeDelay>& delays,
                           PacketClass cls = PacketClass::Data) {
    double total = 0.0;
    for (DroneId id : path) {
        auto it = delays.find(id);
        if (it == delays.end())
            throw UnknownDroneError("path_latency: no delay entry for drone " + std::to_string(id));
        if (!it->second.stable)
            throw UnstablePathError("node " + std::to_string(id) + " is unstable (rho >= 1)");
        total += cls == PacketClass::Data ? *it->second.sojourn_d : *it->second.sojourn_c;
    }
    return total;
}

// Demand-weighted end-to-end data latency over the per-source routes of a
// plan. Sources are drones with their own device traffic; omega is each
// source's share of total demand.
struct CompositionLatency {
    std::map<DroneId, std::optional<double>> per_source;  // unset => route unstable
    std::map<DroneId, double> omega;
    std::optional<double> l_avg;
    std::optional<double> l_max;
    bool feasible = false;  // all participating nodes stable
};

inline CompositionLatency composition_latency(const Topology& topo, const CompositionPlan& plan,
                                              const Allocation& alloc,
                                              const std::map<DroneId, NodeDelay>& delays) {
    auto own = alloc.offered_rate(topo);
    CompositionLatency out;
    out.feasible = true;
    for (const auto& [id, nd] : delays)
        if (!nd.stable) out.feasible = false;

    double total = 0.0;
    for (const auto& [src, r] : own)
        if (plan.forward.count(src)) total += r;
    if (total <= 0.0) return out;  // no demand: vacuous latencies, feasibility still reported

    double acc = 0.0, worst = 0.0;
    bool all_stable = true;
    for (const auto& [src, rate] : own) {
        if (!plan.forward.count(src) || rate <= 0.0) continue;
        double w = rate / total;
        out.omega[src] = w;
        auto route = plan.route_from(src);
        bool stable = true;
        for (DroneId id : route) {
            auto it = delays.find(id);
            if (it == delays.end() || !it->second.stable) {
                stable = false;
                break;
            }
        }
        if (!stable) {
            out.per_source[src] = std::nullopt;
            all_stable = false;
            continue;
        }
        double l = path_latency(route, delays, PacketClass::Data);
        out.per_source[src] = l;
        acc += w * l;
        worst = std::max(worst, l);
    }
    if (all_stable && !out.per_source.empty()) {
        out.l_avg = acc;
        out.l_max = worst;
    }
    return out;
}

struct StabilityReport {
    bool ok = true;
    std::vector<DroneId> offenders;  // nodes with rho > rho_max
};

inline StabilityReport stability_check(const std::map<DroneId, NodeDelay>& delays,
                                       double rho_max) {
    StabilityReport rep;
    for (const auto& [id, nd] : delays)
        if (nd.rho > rho_max) {
            rep.ok = false;
            rep.offenders.push_back(id);
        }
    return rep;
}

}  // namespace snaas
