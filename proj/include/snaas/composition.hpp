#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "snaas/core.hpp"

namespace snaas {

enum class Strategy { Direct, Clustered, Parallel };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::Direct: return "direct";
        case Strategy::Clustered: return "clustered";
        case Strategy::Parallel: return "parallel";
    }
    return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "direct") return Strategy::Direct;
    if (s == "clustered") return Strategy::Clustered;
    if (s == "parallel") return Strategy::Parallel;
    throw std::invalid_argument("unknown strategy: " + s);
}

struct CostWeights {
    double alpha = 0.5;      // distance weight; (1 - alpha) weighs load
    bool normalized = true;  // min-max normalize both terms over the candidate set
};

// ceil() that tolerates the float noise of exact integer ratios (5.0000000003
// must stay 5, not become 6).
inline int ceil_int(double x) {
    if (x <= 0.0) return 0;
    return static_cast<int>(std::ceil(x - 1e-9));
}

// Score = alpha * dist_hat + (1 - alpha) * load_hat over one candidate set.
// With normalization, a term whose candidates all tie (zero spread)
// contributes 0 for everyone.
inline std::vector<double> weighted_cost_scores(const std::vector<double>& dists,
                                                const std::vector<double>& loads,
                                                const CostWeights& w) {
    if (dists.size() != loads.size())
        throw std::invalid_argument("weighted_cost_scores: size mismatch");
    auto norm = [](const std::vector<double>& v) {
        double lo = *std::min_element(v.begin(), v.end());
        double hi = *std::max_element(v.begin(), v.end());
        std::vector<double> out(v.size(), 0.0);
        if (hi - lo > 1e-12)
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
        return out;
    };
    std::vector<double> scores(dists.size(), 0.0);
    if (dists.empty()) return scores;
    if (w.normalized) {
        auto dn = norm(dists), ln = norm(loads);
        for (std::size_t i = 0; i < scores.size(); ++i)
            scores[i] = w.alpha * dn[i] + (1.0 - w.alpha) * ln[i];
    } else {
        for (std::size_t i = 0; i < scores.size(); ++i)
            scores[i] = w.alpha * dists[i] + (1.0 - w.alpha) * loads[i];
    }
    return scores;
}

// k = max(|G|, ceil(|U| * lambda / mu))
inline int cluster_count(int num_devices, double lambda, double mu, int num_gateways) {
    if (mu <= 0.0) throw std::invalid_argument("cluster_count: mu must be positive");
    if (lambda < 0.0 || num_devices < 0) throw std::invalid_argument("cluster_count: negative demand");
    return std::max(num_gateways, ceil_int(static_cast<double>(num_devices) * lambda / mu));
}

inline int path_count(int num_devices, double lambda, double mu, int num_gateways) {
    return cluster_count(num_devices, lambda, mu, num_gateways);
}

// ---- k-means (seeded k-means++ init, Lloyd iterations) ----

struct KMeansResult {
    std::vector<int> assignment;   // point index -> cluster index
    std::vector<Vec2> centroids;
    int iterations = 0;
};

inline KMeansResult kmeans(const std::vector<Vec2>& pts, int k, std::uint64_t seed,
                           int max_iter = 100, double tol = 1e-6) {
    const int n = static_cast<int>(pts.size());
    if (k <= 0 || k > n) throw std::invalid_argument("kmeans: k out of range");
    std::mt19937_64 rng(seed);

    auto d2 = [](const Vec2& a, const Vec2& b) {
        double dx = a.x - b.x, dy = a.y - b.y;
        return dx * dx + dy * dy;
    };

    // k-means++ seeding: first centroid uniform, the rest D^2-weighted.
    std::vector<Vec2> cent;
    cent.push_back(pts[std::uniform_int_distribution<int>(0, n - 1)(rng)]);
    std::vector<double> mind(n);
    while (static_cast<int>(cent.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : cent) best = std::min(best, d2(pts[i], c));
            mind[i] = best;
            total += best;
        }
        int pick = 0;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            double cum = 0.0;
            for (int i = 0; i < n; ++i) {
                cum += mind[i];
                if (r <= cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            // all points coincide with existing centroids; spread deterministically
            pick = static_cast<int>(cent.size()) % n;
        }
        cent.push_back(pts[pick]);
    }

    KMeansResult res;
    res.assignment.assign(n, 0);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // assign: nearest centroid, strict '<' keeps lowest index on ties
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int bi = 0;
            for (int c = 0; c < k; ++c) {
                double d = d2(pts[i], cent[c]);
                if (d < best) {
                    best = d;
                    bi = c;
                }
            }
            res.assignment[i] = bi;
        }
        // empty-cluster repair: steal the point farthest from its centroid
        // among clusters that can spare one (deterministic tie by index).
        std::vector<int> count(k, 0);
        for (int a : res.assignment) count[a]++;
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) continue;
            int steal = -1;
            double worst = -1.0;
            for (int i = 0; i < n; ++i) {
                if (count[res.assignment[i]] <= 1) continue;
                double d = d2(pts[i], cent[res.assignment[i]]);
                if (d > worst) {
                    worst = d;
                    steal = i;
                }
            }
            if (steal >= 0) {
                count[res.assignment[steal]]--;
                res.assignment[steal] = c;
                count[c] = 1;
            }
        }
        // update
        std::vector<Vec2> next(k, Vec2{0, 0});
        std::vector<int> cnt(k, 0);
        for (int i = 0; i < n; ++i) {
            next[res.assignment[i]].x += pts[i].x;
            next[res.assignment[i]].y += pts[i].y;
            cnt[res.assignment[i]]++;
        }
        double move = 0.0;
        for (int c = 0; c < k; ++c) {
            if (cnt[c] > 0) {
                next[c].x /= cnt[c];
                next[c].y /= cnt[c];
            } else {
                next[c] = cent[c];
            }
            move = std::max(move, std::sqrt(d2(next[c], cent[c])));
        }
        cent = next;
        if (move < tol) {
            ++iter;
            break;
        }
    }
    res.centroids = cent;
    res.iterations = iter;
    return res;
}

// ---- composition plan ----

struct CompositionPlan {
    Strategy strategy = Strategy::Direct;
    double alpha = 0.5;
    int k = 0;                                      // cluster / chain count (0 for direct)
    std::map<DroneId, DroneId> forward;             // next hop for every non-gateway drone
    std::vector<std::vector<DroneId>> paths;        // ordered sequences ending at a gateway
    std::vector<DroneId> cluster_heads;             // clustered only, by cluster index
    std::string discipline = "fifo-priority";       // forwarding/queue discipline tag

    // Route from `src` to its gateway (inclusive), following `forward`.
    std::vector<DroneId> route_from(DroneId src) const {
        std::vector<DroneId> r{src};
        std::set<DroneId> seen{src};
        DroneId cur = src;
        while (true) {
            auto it = forward.find(cur);
            if (it == forward.end()) break;  // reached a node with no successor (gateway)
            cur = it->second;
            if (!seen.insert(cur).second)
                throw std::logic_error("route_from: cycle at drone " + std::to_string(cur));
            r.push_back(cur);
        }
        return r;
    }
};

// Structural sanity: acyclic forwarding ending at gateways, strategy-specific
// hop bounds, parallel chains vertex-disjoint. Throws std::logic_error.
inline void validate_plan(const Topology& topo, const CompositionPlan& plan) {
    for (const auto& [from, to] : plan.forward) {
        if (!topo.has_drone(from) || !topo.has_drone(to))
            throw std::logic_error("plan references unknown drone");
        if (topo.drone(from).is_gateway())
            throw std::logic_error("gateway has outgoing forward edge");
    }
    for (const auto& [from, to] : plan.forward) {
        auto route = plan.route_from(from);  // throws on cycles
        if (!topo.drone(route.back()).is_gateway())
            throw std::logic_error("route does not end at a gateway");
        std::size_t hops = route.size() - 1;
        if (plan.strategy == Strategy::Direct && hops != 1)
            throw std::logic_error("direct plan with hop count != 1");
        if (plan.strategy == Strategy::Clustered && hops > 2)
            throw std::logic_error("clustered plan with hop count > 2");
        (void)to;
    }
    for (const auto& p : plan.paths) {
        if (p.size() < 2) throw std::logic_error("path with fewer than 2 nodes");
        if (!topo.drone(p.back()).is_gateway())
            throw std::logic_error("path does not end at a gateway");
    }
    if (plan.strategy == Strategy::Parallel) {
        std::set<DroneId> seen;
        for (const auto& p : plan.paths)
            for (std::size_t i = 0; i + 1 < p.size(); ++i)
                if (!seen.insert(p[i]).second)
                    throw std::logic_error("parallel chains are not vertex-disjoint");
        for (DroneId id : topo.non_gateway_ids())
            if (!seen.count(id))
                throw std::logic_error("drone missing from parallel chains");
    }
}

namespace detail {

inline std::map<DroneId, double> own_rates(const Topology& topo, const Allocation& alloc) {
    return alloc.offered_rate(topo);
}

inline double mean_device_lambda(const Topology& topo) {
    if (topo.devices.empty()) return 0.0;
    double s = 0.0;
    for (const auto& d : topo.devices) s += d.lambda;
    return s / static_cast<double>(topo.devices.size());
}

inline double mean_host_mu(const Topology& topo) {
    double s = 0.0;
    int n = 0;
    for (const auto& d : topo.drones)
        if (!d.is_gateway()) {
            s += d.mu;
            n++;
        }
    if (n == 0) throw TooFewDronesError("no non-gateway drones");
    return s / n;
}

// argmin with strict '<': ties resolve to the earliest candidate, so callers
// order candidates by ascending id / index.
inline std::size_t argmin(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

}  // namespace detail

// Every non-gateway drone connects straight to the weighted-cost-best
// gateway; gateway loads update as assignments accumulate.
inline CompositionPlan compose_direct(const Topology& topo, const Allocation& alloc,
                                      const CostWeights& weights = {}) {
    auto gws = topo.gateway_ids();
    auto srcs = topo.non_gateway_ids();
    if (gws.empty() || srcs.empty())
        throw TooFewDronesError("direct composition needs >= 1 entry drone and >= 1 gateway");

    auto own = detail::own_rates(topo, alloc);
    std::map<DroneId, double> gw_rate;  // assigned data packets/s per gateway

    CompositionPlan plan;
    plan.strategy = Strategy::Direct;
    plan.alpha = weights.alpha;
    for (DroneId d : srcs) {
        const auto& dd = topo.drone(d);
        std::vector<double> dists, loads;
        for (DroneId g : gws) {
            const auto& gd = topo.drone(g);
            dists.push_back(distance(dd.pos, gd.pos));
            loads.push_back(gd.mu > 0 ? gw_rate[g] / gd.mu : 0.0);
        }
        auto scores = weighted_cost_scores(dists, loads, weights);
        DroneId g = gws[detail::argmin(scores)];
        plan.forward[d] = g;
        plan.paths.push_back({d, g});
        gw_rate[g] += own.count(d) ? own[d] : 0.0;
    }
    validate_plan(topo, plan);
    return plan;
}

// k-means clusters over non-gateway drones; per cluster a weighted-cost-best
// gateway, then a head (weighted by distance-to-gateway and own load) that
// aggregates the cluster's traffic.
inline CompositionPlan compose_clustered(const Topology& topo, const Allocation& alloc,
                                         const CostWeights& weights = {},
                                         std::uint64_t seed = 0,
                                         std::optional<int> k_override = std::nullopt) {
    auto gws = topo.gateway_ids();
    auto srcs = topo.non_gateway_ids();
    if (gws.empty() || srcs.empty())
        throw TooFewDronesError("clustered composition needs >= 1 drone and >= 1 gateway");

    int k = k_override ? *k_override
                       : cluster_count(static_cast<int>(topo.devices.size()),
                                       detail::mean_device_lambda(topo),
                                       detail::mean_host_mu(topo),
                                       static_cast<int>(gws.size()));
    if (k < 1) throw std::invalid_argument("compose_clustered: k must be >= 1");
    if (k > static_cast<int>(srcs.size()))
        throw TooFewDronesError("clustered composition: k=" + std::to_string(k) +
                                " exceeds " + std::to_string(srcs.size()) +
                                " non-gateway drones");

    std::vector<Vec2> pts;
    for (DroneId d : srcs) pts.push_back(topo.drone(d).pos);
    auto km = kmeans(pts, k, seed);

    std::vector<std::vector<DroneId>> members(k);
    for (std::size_t i = 0; i < srcs.size(); ++i) members[km.assignment[i]].push_back(srcs[i]);

    auto own = detail::own_rates(topo, alloc);
    auto cluster_rate = [&](int c) {
        double s = 0.0;
        for (DroneId d : members[c]) s += own.count(d) ? own[d] : 0.0;
        return s;
    };

    CompositionPlan plan;
    plan.strategy = Strategy::Clustered;
    plan.alpha = weights.alpha;
    plan.k = k;
    std::map<DroneId, double> gw_rate;
    for (int c = 0; c < k; ++c) {
        // gateway by weighted cost from the cluster centroid
        std::vector<double> gdists, gloads;
        for (DroneId g : gws) {
            const auto& gd = topo.drone(g);
            gdists.push_back(distance(km.centroids[c], gd.pos));
            gloads.push_back(gd.mu > 0 ? gw_rate[g] / gd.mu : 0.0);
        }
        DroneId g = gws[detail::argmin(weighted_cost_scores(gdists, gloads, weights))];
        // head: closest-to-gateway / least-loaded cluster member
        std::vector<double> hdists, hloads;
        for (DroneId m : members[c]) {
            const auto& md = topo.drone(m);
            hdists.push_back(distance(md.pos, topo.drone(g).pos));
            hloads.push_back(md.mu > 0 ? (own.count(m) ? own[m] : 0.0) / md.mu : 0.0);
        }
        DroneId head = members[c][detail::argmin(weighted_cost_scores(hdists, hloads, weights))];

        plan.cluster_heads.push_back(head);
        plan.forward[head] = g;
        for (DroneId m : members[c])
            if (m != head) {
                plan.forward[m] = head;
                plan.paths.push_back({m, head, g});
            }
        plan.paths.push_back({head, g});
        gw_rate[g] += cluster_rate(c);
    }
    validate_plan(topo, plan);
    return plan;
}

// Vertex-disjoint relay chains: one anchor per gateway, extra chains when the
// demand formula asks for more, remaining drones appended greedily to the
// cheapest chain tail (load figures update as the chains grow).
inline CompositionPlan compose_parallel(const Topology& topo, const Allocation& alloc,
                                        const CostWeights& weights = {}) {
    auto gws = topo.gateway_ids();
    auto srcs = topo.non_gateway_ids();
    if (gws.empty() || srcs.empty())
        throw TooFewDronesError("parallel composition needs >= 1 drone and >= 1 gateway");

    int k = path_count(static_cast<int>(topo.devices.size()), detail::mean_device_lambda(topo),
                       detail::mean_host_mu(topo), static_cast<int>(gws.size()));
    if (k > static_cast<int>(srcs.size()))
        throw TooFewDronesError("parallel composition: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(srcs.size()) + " non-gateway drones");

    auto own = detail::own_rates(topo, alloc);
    auto own_of = [&](DroneId d) { return own.count(d) ? own[d] : 0.0; };

    struct Chain {
        std::deque<DroneId> members;  // front = most upstream, back = gateway-adjacent
        DroneId gateway;
        double rate = 0.0;   // data packets/s carried
        double min_mu = 0.0;
    };
    std::vector<Chain> chains;
    std::set<DroneId> unassigned(srcs.begin(), srcs.end());
    std::map<DroneId, double> gw_rate;

    auto util = [&](double rate, double mu) { return mu > 0 ? rate / mu : 0.0; };

    // stage 1: anchor one chain per gateway
    for (DroneId g : gws) {
        if (unassigned.empty())
            throw TooFewDronesError("parallel composition: fewer drones than gateways");
        const auto& gd = topo.drone(g);
        std::vector<DroneId> cand(unassigned.begin(), unassigned.end());
        std::vector<double> dists, loads;
        for (DroneId d : cand) {
            const auto& dd = topo.drone(d);
            dists.push_back(distance(dd.pos, gd.pos));
            loads.push_back(util(own_of(d), dd.mu));
        }
        DroneId d = cand[detail::argmin(weighted_cost_scores(dists, loads, weights))];
        unassigned.erase(d);
        Chain c;
        c.members.push_back(d);
        c.gateway = g;
        c.rate = own_of(d);
        c.min_mu = topo.drone(d).mu;
        chains.push_back(std::move(c));
        gw_rate[g] += own_of(d);
    }

    // stage 2: extra chains beyond |G|, cheapest (drone, gateway) pair first
    while (static_cast<int>(chains.size()) < k) {
        if (unassigned.empty())
            throw TooFewDronesError("parallel composition: not enough drones for k chains");
        std::vector<std::pair<DroneId, DroneId>> pairs;
        std::vector<double> dists, loads;
        for (DroneId d : unassigned)
            for (DroneId g : gws) {
                pairs.emplace_back(d, g);
                dists.push_back(distance(topo.drone(d).pos, topo.drone(g).pos));
                loads.push_back(util(gw_rate[g], topo.drone(g).mu));
            }
        auto pick = pairs[detail::argmin(weighted_cost_scores(dists, loads, weights))];
        unassigned.erase(pick.first);
        Chain c;
        c.members.push_back(pick.first);
        c.gateway = pick.second;
        c.rate = own_of(pick.first);
        c.min_mu = topo.drone(pick.first).mu;
        chains.push_back(std::move(c));
        gw_rate[pick.second] += own_of(pick.first);
    }

    // stage 3: append each remaining drone upstream of the cheapest chain tail
    while (!unassigned.empty()) {
        std::vector<std::pair<DroneId, std::size_t>> pairs;
        std::vector<double> dists, loads;
        for (DroneId d : unassigned)
            for (std::size_t p = 0; p < chains.size(); ++p) {
                pairs.emplace_back(d, p);
                dists.push_back(distance(topo.drone(d).pos, topo.drone(chains[p].members.front()).pos));
                loads.push_back(util(chains[p].rate, chains[p].min_mu));
            }
        auto pick = pairs[detail::argmin(weighted_cost_scores(dists, loads, weights))];
        DroneId d = pick.first;
        Chain& c = chains[pick.second];
        unassigned.erase(d);
        c.members.push_front(d);
        c.rate += own_of(d);
        c.min_mu = std::min(c.min_mu, topo.drone(d).mu);
        gw_rate[c.gateway] += own_of(d);
    }

    CompositionPlan plan;
    plan.strategy = Strategy::Parallel;
    plan.alpha = weights.alpha;
    plan.k = k;
    for (const auto& c : chains) {
        std::vector<DroneId> path(c.members.begin(), c.members.end());
        for (std::size_t i = 0; i + 1 < path.size(); ++i) plan.forward[path[i]] = path[i + 1];
        plan.forward[path.back()] = c.gateway;
        path.push_back(c.gateway);
        plan.paths.push_back(std::move(path));
    }
    validate_plan(topo, plan);
    return plan;
}

}  // namespace snaas
