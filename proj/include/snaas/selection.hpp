#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snaas/composition.hpp"
#include "snaas/queueing.hpp"

namespace snaas {

enum class SlaMetric { Avg, Max };

inline const char* to_string(SlaMetric m) { return m == SlaMetric::Avg ? "avg" : "max"; }

inline SlaMetric metric_from_string(const std::string& s) {
    if (s == "avg") return SlaMetric::Avg;
    if (s == "max") return SlaMetric::Max;
    throw std::invalid_argument("unknown SLA metric: " + s);
}

struct SlaSpec {
    double latency_bound = 0.01;  // seconds
    SlaMetric metric = SlaMetric::Avg;
    double rho_max = 0.95;
};

struct CandidateEvaluation {
    bool constructed = false;  // plan building itself can fail (e.g. too few drones)
    CompositionPlan plan;
    std::map<DroneId, NodeDelay> delays;
    CompositionLatency latency;
    bool feasible = false;     // all nodes stable (rho < 1) and capacity respected
    std::string reason;        // why infeasible / not constructed
    int index = 0;             // enumeration order, used for tie-breaking

    std::optional<double> sla_value(SlaMetric m) const {
        return m == SlaMetric::Avg ? latency.l_avg : latency.l_max;
    }
};

// Full analytic evaluation of one plan: arrivals -> per-node delays ->
// end-to-end latency -> feasibility (saturation or capacity breaches).
inline CandidateEvaluation evaluate_plan(const Topology& topo, const CompositionPlan& plan,
                                         const Allocation& alloc, const TrafficConfig& traffic,
                                         FormulaMode mode) {
    CandidateEvaluation ev;
    ev.constructed = true;
    ev.plan = plan;
    auto arrivals = derive_node_arrivals(topo, plan, alloc, traffic);
    for (const auto& [id, in] : arrivals) ev.delays[id] = node_delay(in, mode);
    ev.latency = composition_latency(topo, plan, alloc, ev.delays);

    ev.feasible = true;
    for (const auto& [id, nd] : ev.delays)
        if (!nd.stable) {
            ev.feasible = false;
            ev.reason = "unstable: rho >= 1 at drone " + std::to_string(id);
            break;
        }
    if (ev.feasible) {
        for (const auto& [drone, cnt] : alloc.counts()) {
            if (cnt > topo.drone(drone).capacity) {
                ev.feasible = false;
                ev.reason = "capacity exceeded at drone " + std::to_string(drone);
                break;
            }
        }
    }
    return ev;
}

inline const std::vector<double>& default_alpha_grid() {
    static const std::vector<double> g{0.0, 0.25, 0.5, 0.75, 1.0};
    return g;
}

// Build and evaluate Direct, Clustered, Parallel (in that order) at the given
// alpha, or at every grid alpha when `alpha_grid` is set. Construction
// failures become non-constructed entries carrying the error text.
inline std::vector<CandidateEvaluation> enumerate_candidates(
    const Topology& topo, const Allocation& alloc, const CostWeights& weights,
    const TrafficConfig& traffic, FormulaMode mode, bool alpha_grid = false,
    std::uint64_t seed = 0) {
    std::vector<double> alphas = alpha_grid ? default_alpha_grid()
                                            : std::vector<double>{weights.alpha};
    std::vector<CandidateEvaluation> out;
    int index = 0;
    for (double a : alphas) {
        CostWeights w = weights;
        w.alpha = a;
        for (Strategy s : {Strategy::Direct, Strategy::Clustered, Strategy::Parallel}) {
            CandidateEvaluation ev;
            try {
                CompositionPlan plan;
                switch (s) {
                    case Strategy::Direct: plan = compose_direct(topo, alloc, w); break;
                    case Strategy::Clustered: plan = compose_clustered(topo, alloc, w, seed); break;
                    case Strategy::Parallel: plan = compose_parallel(topo, alloc, w); break;
                }
                ev = evaluate_plan(topo, plan, alloc, traffic, mode);
            } catch (const TooFewDronesError& e) {
                ev.constructed = false;
                ev.feasible = false;
                ev.plan.strategy = s;
                ev.plan.alpha = a;
                ev.reason = e.what();
            }
            ev.index = index++;
            out.push_back(std::move(ev));
        }
    }
    return out;
}

struct SelectionResult {
    std::vector<CandidateEvaluation> table;
    std::optional<std::size_t> winner;  // index into table

    bool no_feasible() const { return !winner.has_value(); }
    const CandidateEvaluation& best() const { return table[*winner]; }
};

inline int strategy_rank(Strategy s) {
    switch (s) {
        case Strategy::Direct: return 0;
        case Strategy::Clustered: return 1;
        case Strategy::Parallel: return 2;
    }
    return 3;
}

// Pick from an evaluated table: feasible, meets the latency bound, minimal
// SLA value; ties prefer fewer hops (Direct < Clustered < Parallel) then the
// earlier candidate.
inline std::optional<std::size_t> pick_winner(const std::vector<CandidateEvaluation>& table,
                                              const SlaSpec& sla) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& ev = table[i];
        if (!ev.constructed || !ev.feasible) continue;
        auto v = ev.sla_value(sla.metric);
        if (!v || *v > sla.latency_bound) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cur = table[*best];
        double bv = *cur.sla_value(sla.metric);
        if (*v < bv ||
            (*v == bv && (strategy_rank(ev.plan.strategy) < strategy_rank(cur.plan.strategy) ||
                          (strategy_rank(ev.plan.strategy) == strategy_rank(cur.plan.strategy) &&
                           ev.index < cur.index))))
            best = i;
    }
    return best;
}

inline SelectionResult select_composition(const Topology& topo, const Allocation& alloc,
                                          const CostWeights& weights, const TrafficConfig& traffic,
                                          FormulaMode mode, const SlaSpec& sla,
                                          bool alpha_grid = false, std::uint64_t seed = 0) {
    SelectionResult res;
    res.table = enumerate_candidates(topo, alloc, weights, traffic, mode, alpha_grid, seed);
    res.winner = pick_winner(res.table, sla);
    return res;
}

}  // namespace snaas
