#pragma once

// Capped brute-force baselines: exhaustively score every gateway assignment
// (direct) or every (k, heads, gateways) combination (clustered) when the
// space fits under the cap, otherwise score a seeded uniform sample of
// exactly `cap` distinct candidates. Scoring reuses the analytic queueing
// evaluation, so "best" means the same thing as in the heuristic selector.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "snaas/selection.hpp"

namespace snaas {

namespace bdetail {

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        return std::numeric_limits<std::uint64_t>::max();
    return a + b;
}

// `count` distinct indices uniform over [0, space), ascending for a
// deterministic evaluation order.
inline std::vector<std::uint64_t> sample_indices(std::uint64_t space, std::uint64_t count,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> u(0, space - 1);
    std::set<std::uint64_t> picked;
    while (picked.size() < count) picked.insert(u(rng));
    return {picked.begin(), picked.end()};
}

}  // namespace bdetail

struct BaselineStratum {
    int k = 0;
    std::uint64_t space = 0;  // head choices x gateway choices for this k
};

struct BaselineResult {
    std::optional<CandidateEvaluation> best;  // feasible minimum-L_SLA candidate
    std::uint64_t candidates_examined = 0;    // always min(space, cap)
    std::uint64_t space = 0;                  // full candidate space (saturating)
    bool exhaustive = false;                  // every candidate was scored
    std::vector<BaselineStratum> strata;      // clustered only: per-k sub-spaces
};

namespace bdetail {

// Keep the feasible candidate with the smallest SLA value; candidates with
// no measurable latency rank last; ties keep the earliest.
inline void consider(std::optional<CandidateEvaluation>& best, CandidateEvaluation&& ev,
                     SlaMetric metric) {
    if (!ev.feasible) return;
    auto rank = [&](const CandidateEvaluation& e) {
        auto v = e.sla_value(metric);
        return v ? *v : std::numeric_limits<double>::infinity();
    };
    if (!best || rank(ev) < rank(*best)) best = std::move(ev);
}

}  // namespace bdetail

// Enumerate entry-drone -> gateway maps (|G|^|E| of them, mixed radix with
// digit i choosing the gateway of the i-th non-gateway drone).
inline BaselineResult brute_force_direct(const Topology& topo, const Allocation& alloc,
                                         const TrafficConfig& traffic, FormulaMode mode,
                                         const SlaSpec& sla, std::uint64_t cap = 200,
                                         std::uint64_t seed = 0) {
    auto gws = topo.gateway_ids();
    auto srcs = topo.non_gateway_ids();
    if (gws.empty() || srcs.empty())
        throw TooFewDronesError("brute force direct needs >= 1 entry drone and >= 1 gateway");
    if (cap == 0) throw std::invalid_argument("brute force: cap must be positive");

    BaselineResult res;
    res.space = 1;
    for (std::size_t i = 0; i < srcs.size(); ++i)
        res.space = bdetail::sat_mul(res.space, gws.size());
    res.exhaustive = res.space <= cap;

    auto build = [&](std::uint64_t idx) {
        CompositionPlan plan;
        plan.strategy = Strategy::Direct;
        for (DroneId s : srcs) {
            DroneId g = gws[idx % gws.size()];
            idx /= gws.size();
            plan.forward[s] = g;
            plan.paths.push_back({s, g});
        }
        return plan;
    };
    auto score = [&](std::uint64_t idx) {
        auto ev = evaluate_plan(topo, build(idx), alloc, traffic, mode);
        ev.index = res.candidates_examined++;
        bdetail::consider(res.best, std::move(ev), sla.metric);
    };

    if (res.exhaustive)
        for (std::uint64_t idx = 0; idx < res.space; ++idx) score(idx);
    else
        for (std::uint64_t idx : bdetail::sample_indices(res.space, cap, seed)) score(idx);
    return res;
}

// Enumerate clustered configurations: for each k in [|G|, min(|E|, k_formula+2)]
// the k-means membership is fixed (same seed as the heuristic), and the
// candidates are every per-cluster head choice x per-cluster gateway choice.
inline BaselineResult brute_force_clustered(const Topology& topo, const Allocation& alloc,
                                            const TrafficConfig& traffic, FormulaMode mode,
                                            const SlaSpec& sla, std::uint64_t cap = 200,
                                            std::uint64_t seed = 0) {
    auto gws = topo.gateway_ids();
    auto srcs = topo.non_gateway_ids();
    if (gws.empty() || srcs.empty())
        throw TooFewDronesError("brute force clustered needs >= 1 drone and >= 1 gateway");
    if (cap == 0) throw std::invalid_argument("brute force: cap must be positive");

    int k_formula = cluster_count(static_cast<int>(topo.devices.size()),
                                  detail::mean_device_lambda(topo), detail::mean_host_mu(topo),
                                  static_cast<int>(gws.size()));
    int k_lo = static_cast<int>(gws.size());
    int k_hi = std::min(static_cast<int>(srcs.size()), k_formula + 2);
    if (k_lo > k_hi)
        throw TooFewDronesError("brute force clustered: fewer non-gateway drones than gateways");

    std::vector<Vec2> pts;
    for (DroneId d : srcs) pts.push_back(topo.drone(d).pos);

    BaselineResult res;
    std::vector<std::vector<std::vector<DroneId>>> memberships;  // per stratum, per cluster
    for (int k = k_lo; k <= k_hi; ++k) {
        auto km = kmeans(pts, k, seed);
        std::vector<std::vector<DroneId>> members(k);
        for (std::size_t i = 0; i < srcs.size(); ++i)
            members[km.assignment[i]].push_back(srcs[i]);
        std::uint64_t sp = 1;
        for (const auto& c : members) sp = bdetail::sat_mul(sp, c.size());
        for (int c = 0; c < k; ++c) sp = bdetail::sat_mul(sp, gws.size());
        res.strata.push_back({k, sp});
        res.space = bdetail::sat_add(res.space, sp);
        memberships.push_back(std::move(members));
    }
    res.exhaustive = res.space <= cap;

    // digits: cluster-0 head, ..., cluster-(k-1) head, then the k gateways
    auto build = [&](std::size_t stratum, std::uint64_t idx) {
        const auto& members = memberships[stratum];
        int k = res.strata[stratum].k;
        CompositionPlan plan;
        plan.strategy = Strategy::Clustered;
        plan.k = k;
        std::vector<DroneId> heads(k);
        for (int c = 0; c < k; ++c) {
            heads[c] = members[c][idx % members[c].size()];
            idx /= members[c].size();
        }
        for (int c = 0; c < k; ++c) {
            DroneId g = gws[idx % gws.size()];
            idx /= gws.size();
            plan.cluster_heads.push_back(heads[c]);
            for (DroneId m : members[c])
                if (m != heads[c]) {
                    plan.forward[m] = heads[c];
                    plan.paths.push_back({m, heads[c], g});
                }
            plan.forward[heads[c]] = g;
            plan.paths.push_back({heads[c], g});
        }
        return plan;
    };
    auto score = [&](std::size_t stratum, std::uint64_t idx) {
        auto ev = evaluate_plan(topo, build(stratum, idx), alloc, traffic, mode);
        ev.index = res.candidates_examined++;
        bdetail::consider(res.best, std::move(ev), sla.metric);
    };

    if (res.exhaustive) {
        for (std::size_t s = 0; s < res.strata.size(); ++s)
            for (std::uint64_t idx = 0; idx < res.strata[s].space; ++idx) score(s, idx);
    } else {
        for (std::uint64_t gidx : bdetail::sample_indices(res.space, cap, seed)) {
            std::size_t s = 0;
            while (s + 1 < res.strata.size() && gidx >= res.strata[s].space)
                gidx -= res.strata[s++].space;
            score(s, gidx);
        }
    }
    return res;
}

}  // namespace snaas
