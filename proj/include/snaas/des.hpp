#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "snaas/composition.hpp"
#include "snaas/queueing.hpp"

namespace snaas {

// Event-driven packet simulation of a composition: per-drone Poisson data and
// control sources, store-and-forward along the plan's routes, each drone a
// single server with a non-preemptive two-priority FIFO queue (control first)
// and zero transit time between hops.
struct SimConfig {
    double duration = 120.0;  // seconds of simulated time
    double warmup = 10.0;     // statistics exclude anything realized earlier
    std::uint64_t seed = 1;
    TrafficConfig traffic;
    bool self_check = false;  // enable internal invariant assertions (slow)
};

struct ClassSimStats {
    std::uint64_t samples = 0;
    double mean_wait = 0.0;  // queueing delay (arrival at node -> service start)
};

struct NodeSimStats {
    ClassSimStats ctrl, data;
    double busy_time = 0.0;
    double rho_empirical = 0.0;
    std::uint64_t arrivals_c = 0, arrivals_d = 0;
    std::uint64_t departures_c = 0, departures_d = 0;
};

struct SourceSimStats {
    std::uint64_t completed = 0;
    double mean_sojourn = 0.0;  // source arrival -> gateway departure, data class
};

struct SimResult {
    std::map<DroneId, NodeSimStats> nodes;
    std::map<DroneId, SourceSimStats> per_source;
    std::optional<double> l_avg;  // completion-weighted mean data sojourn
    std::optional<double> l_max;  // worst per-source mean
    std::uint64_t generated_c = 0, generated_d = 0;
    std::uint64_t completed_c = 0, completed_d = 0;
};

inline SimResult simulate(const Topology& topo, const CompositionPlan& plan,
                          const Allocation& alloc, const SimConfig& cfg) {
    if (cfg.warmup >= cfg.duration)
        throw std::invalid_argument("simulate: warmup must be shorter than duration");

    // ---- static structure ----
    std::vector<DroneId> ids;
    {
        std::set<DroneId> s;
        for (const auto& [f, t] : plan.forward) {
            s.insert(f);
            s.insert(t);
        }
        ids.assign(s.begin(), s.end());
    }
    std::map<DroneId, int> idx;
    for (std::size_t i = 0; i < ids.size(); ++i) idx[ids[i]] = static_cast<int>(i);
    const int n = static_cast<int>(ids.size());

    std::vector<double> xbar_d(n), xbar_c(n);
    for (int i = 0; i < n; ++i) {
        const auto& dr = topo.drone(ids[i]);
        if (dr.mu <= 0) throw std::invalid_argument("simulate: drone without service rate");
        xbar_d[i] = 1.0 / dr.mu;
        xbar_c[i] = xbar_d[i] * cfg.traffic.control_size_ratio();
    }

    // per-source routes as index vectors
    auto own = alloc.offered_rate(topo);
    struct Source {
        int route_start;  // offset into flat route array
        int route_len;
        double rate_d, rate_c;
        DroneId id;
    };
    std::vector<Source> sources;
    std::vector<int> routes;
    for (const auto& [src, unused] : plan.forward) {
        (void)unused;
        double rd = own.count(src) ? own[src] : 0.0;
        if (rd <= 0.0) continue;
        Source s;
        s.id = src;
        s.rate_d = rd;
        s.rate_c = cfg.traffic.control_fraction * rd;
        s.route_start = static_cast<int>(routes.size());
        auto r = plan.route_from(src);
        for (DroneId d : r) routes.push_back(idx.at(d));
        s.route_len = static_cast<int>(r.size());
        sources.push_back(s);
    }

    // ---- dynamic state ----
    struct Pkt {
        double created, arrived;
        int source, hop;
        int cls;
    };
    std::vector<Pkt> pool;
    std::vector<int> free_list;
    auto alloc_pkt = [&]() {
        if (!free_list.empty()) {
            int i = free_list.back();
            free_list.pop_back();
            return i;
        }
        pool.push_back({});
        return static_cast<int>(pool.size() - 1);
    };

    struct Node {
        std::deque<int> q_ctrl, q_data;
        bool busy = false;
        int in_service = -1;
        double svc_start = 0.0;
    };
    std::vector<Node> nodes(n);

    enum EvKind { EvArrivalD = 0, EvArrivalC = 1, EvDeparture = 2 };
    struct Ev {
        double t;
        std::uint64_t seq;
        int kind;
        int a;  // source index (arrivals) or node index (departures)
        int b;  // packet index (departures)
    };
    struct Cmp {
        bool operator()(const Ev& x, const Ev& y) const {
            return x.t > y.t || (x.t == y.t && x.seq > y.seq);
        }
    };
    std::priority_queue<Ev, std::vector<Ev>, Cmp> heap;
    std::uint64_t seq = 0;

    std::mt19937_64 rng(cfg.seed);
    auto exp_draw = [&](double rate) {
        return std::exponential_distribution<double>(rate)(rng);
    };
    auto service_time = [&](int node, int cls) {
        double xb = cls == 0 ? xbar_c[node] : xbar_d[node];
        return cfg.traffic.dist == ServiceDist::Exponential ? exp_draw(1.0 / xb) : xb;
    };

    SimResult res;
    std::vector<NodeSimStats> stats(n);
    std::map<DroneId, SourceSimStats> per_source;
    double sojourn_sum = 0.0;
    std::uint64_t sojourn_n = 0;
    std::map<DroneId, double> source_sum;

    const double T = cfg.duration, W = cfg.warmup;
    auto overlap = [&](double a, double b) {  // measure of [a,b] inside [W,T]
        double lo = std::max(a, W), hi = std::min(b, T);
        return hi > lo ? hi - lo : 0.0;
    };

    auto start_service = [&](int ni, double t) {
        Node& nd = nodes[ni];
        int pi = -1;
        if (!nd.q_ctrl.empty()) {
            pi = nd.q_ctrl.front();
            nd.q_ctrl.pop_front();
        } else if (!nd.q_data.empty()) {
            pi = nd.q_data.front();
            nd.q_data.pop_front();
        } else {
            return;
        }
        const Pkt& p = pool[pi];
        if (cfg.self_check && p.cls == 1 && !nd.q_ctrl.empty())
            throw std::logic_error("priority violation: data served while control queued");
        double wait = t - p.arrived;
        if (t >= W) {
            auto& cs = p.cls == 0 ? stats[ni].ctrl : stats[ni].data;
            cs.samples++;
            cs.mean_wait += (wait - cs.mean_wait) / static_cast<double>(cs.samples);
        }
        nd.busy = true;
        nd.in_service = pi;
        nd.svc_start = t;
        heap.push({t + service_time(ni, p.cls), seq++, EvDeparture, ni, pi});
    };

    // forward declaration style: packet handed to node `ni` at time `t`
    auto deliver = [&](int ni, int pi, double t) {
        Pkt& p = pool[pi];
        p.arrived = t;
        if (p.cls == 0)
            stats[ni].arrivals_c++;
        else
            stats[ni].arrivals_d++;
        Node& nd = nodes[ni];
        if (p.cls == 0)
            nd.q_ctrl.push_back(pi);
        else
            nd.q_data.push_back(pi);
        if (!nd.busy) start_service(ni, t);
    };

    // seed the arrival streams
    for (std::size_t si = 0; si < sources.size(); ++si) {
        heap.push({exp_draw(sources[si].rate_d), seq++, EvArrivalD, static_cast<int>(si), 0});
        if (sources[si].rate_c > 0)
            heap.push({exp_draw(sources[si].rate_c), seq++, EvArrivalC, static_cast<int>(si), 0});
    }

    while (!heap.empty() && heap.top().t <= T) {
        Ev ev = heap.top();
        heap.pop();
        if (ev.kind == EvArrivalD || ev.kind == EvArrivalC) {
            const Source& s = sources[ev.a];
            int cls = ev.kind == EvArrivalC ? 0 : 1;
            int pi = alloc_pkt();
            pool[pi] = {ev.t, ev.t, ev.a, 0, cls};
            if (cls == 0)
                res.generated_c++;
            else
                res.generated_d++;
            deliver(routes[s.route_start], pi, ev.t);
            double rate = cls == 0 ? s.rate_c : s.rate_d;
            heap.push({ev.t + exp_draw(rate), seq++, ev.kind, ev.a, 0});
        } else {
            int ni = ev.a, pi = ev.b;
            Node& nd = nodes[ni];
            if (cfg.self_check && nd.in_service != pi)
                throw std::logic_error("departure for a packet not in service");
            Pkt& p = pool[pi];
            stats[ni].busy_time += overlap(nd.svc_start, ev.t);
            if (p.cls == 0)
                stats[ni].departures_c++;
            else
                stats[ni].departures_d++;
            nd.busy = false;
            nd.in_service = -1;
            const Source& s = sources[p.source];
            if (p.hop + 1 < s.route_len) {
                p.hop++;
                deliver(routes[s.route_start + p.hop], pi, ev.t);
            } else {
                // left the swarm through the gateway
                if (ev.t >= W) {
                    if (p.cls == 0)
                        res.completed_c++;
                    else {
                        res.completed_d++;
                        double soj = ev.t - p.created;
                        sojourn_sum += soj;
                        sojourn_n++;
                        auto& ss = per_source[s.id];
                        ss.completed++;
                        source_sum[s.id] += soj;
                    }
                }
                free_list.push_back(pi);
            }
            start_service(ni, ev.t);
        }
    }

    // close out nodes still serving at the horizon
    for (int i = 0; i < n; ++i)
        if (nodes[i].busy) stats[i].busy_time += overlap(nodes[i].svc_start, T);

    if (cfg.self_check)
        for (int i = 0; i < n; ++i)
            if (!nodes[i].busy && (!nodes[i].q_ctrl.empty() || !nodes[i].q_data.empty()))
                throw std::logic_error("idle node with queued packets");

    for (int i = 0; i < n; ++i) {
        stats[i].rho_empirical = stats[i].busy_time / (T - W);
        res.nodes[ids[i]] = stats[i];
    }
    for (auto& [id, ss] : per_source) {
        ss.mean_sojourn = ss.completed ? source_sum[id] / static_cast<double>(ss.completed) : 0.0;
        res.per_source[id] = ss;
    }
    if (sojourn_n > 0) {
        res.l_avg = sojourn_sum / static_cast<double>(sojourn_n);
        double worst = 0.0;
        for (const auto& [id, ss] : res.per_source) worst = std::max(worst, ss.mean_sojourn);
        res.l_max = worst;
    }
    return res;
}

}  // namespace snaas
