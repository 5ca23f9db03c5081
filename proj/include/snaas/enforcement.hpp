#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "snaas/composition.hpp"
#include "snaas/queueing.hpp"
#include "snaas/selection.hpp"

namespace snaas {

// Compliance enforcement: when no candidate composition meets the SLA, four
// corrective edits are applied in a fixed order, re-analyzed after each, and
// the sequence cycles until a compliant plan emerges or the cycle cap is hit,
// at which point a gateway scale-out or an SLA downgrade is recommended.

enum class EditKind {
    GatewayRebalanceDirect,
    GatewayRebalanceAggregate,
    ClusterSplit,
    PathMultiply,
    ScaleOut,
    SlaDowngrade,
};

inline const char* to_string(EditKind k) {
    switch (k) {
        case EditKind::GatewayRebalanceDirect: return "gateway-rebalance-direct";
        case EditKind::GatewayRebalanceAggregate: return "gateway-rebalance-aggregate";
        case EditKind::ClusterSplit: return "cluster-split";
        case EditKind::PathMultiply: return "path-multiply";
        case EditKind::ScaleOut: return "scale-out";
        case EditKind::SlaDowngrade: return "sla-downgrade";
    }
    return "?";
}

struct EditRecord {
    EditKind kind;
    int cycle = 0;
    bool applied = false;  // the current plan changed (edits) / emitted (recommendations)
    std::string detail;
    double pre_max_rho = 0.0, post_max_rho = 0.0;
    std::optional<double> pre_sla, post_sla;
};

struct ScaleOutSuggestion {
    int added_gateways = 0;
    double clone_mu = 0.0;  // service rate assumed for each added gateway
    Vec2 position{0.0, 0.0};  // centroid of the overloaded nodes
    double projected_utilization = 0.0;  // aggregate gateway utilization afterwards
};

struct EnforcementOutcome {
    CompositionPlan final_plan;
    CandidateEvaluation final_eval;
    bool compliant = false;
    std::vector<EditRecord> edits;
    std::optional<double> downgrade_suggestion;  // loosest bound that would have passed
    bool demand_reduction = false;               // no stable candidate exists at rho_max
    std::optional<ScaleOutSuggestion> scaleout_suggestion;
    int cycles = 0;

    std::vector<EditKind> edit_kinds() const {
        std::vector<EditKind> ks;
        for (const auto& e : edits) ks.push_back(e.kind);
        return ks;
    }
};

inline double max_rho(const std::map<DroneId, NodeDelay>& delays) {
    double m = 0.0;
    for (const auto& [id, nd] : delays) m = std::max(m, nd.rho);
    return m;
}

// Stable at the utilization ceiling (not merely rho < 1) with capacity intact.
inline bool stable_at(const CandidateEvaluation& ev, double rho_max) {
    return ev.constructed && ev.feasible && stability_check(ev.delays, rho_max).ok;
}

// Compliant = stable at rho_max and within the latency bound. A plan carrying
// no measurable traffic meets any bound vacuously.
inline bool is_compliant(const CandidateEvaluation& ev, const SlaSpec& sla) {
    if (!stable_at(ev, sla.rho_max)) return false;
    auto v = ev.sla_value(sla.metric);
    return !v || *v <= sla.latency_bound;
}

namespace edetail {

// Plan quality for replace-if-better decisions: compliance, then feasibility,
// then the SLA value, then the worst utilization. Lower is better.
struct PlanScore {
    int not_compliant = 1;
    int infeasible = 1;
    double sla = std::numeric_limits<double>::infinity();
    double rho = std::numeric_limits<double>::infinity();
};

inline PlanScore plan_score(const CandidateEvaluation& ev, const SlaSpec& sla) {
    PlanScore s;
    if (!ev.constructed) return s;
    s.not_compliant = is_compliant(ev, sla) ? 0 : 1;
    s.infeasible = ev.feasible ? 0 : 1;
    if (auto v = ev.sla_value(sla.metric)) s.sla = *v;
    s.rho = max_rho(ev.delays);
    return s;
}

inline bool better(const PlanScore& a, const PlanScore& b) {
    return std::tie(a.not_compliant, a.infeasible, a.sla, a.rho) <
           std::tie(b.not_compliant, b.infeasible, b.sla, b.rho);
}

inline bool same_plan(const CompositionPlan& a, const CompositionPlan& b) {
    return a.strategy == b.strategy && a.forward == b.forward && a.paths == b.paths &&
           a.cluster_heads == b.cluster_heads && a.k == b.k;
}

// Track the loosest latency bound that would have passed, over every plan the
// enforcement machinery evaluated while staying stable at rho_max.
inline void track_stable(std::optional<double>& best, const CandidateEvaluation& ev,
                         const SlaSpec& sla) {
    if (!stable_at(ev, sla.rho_max)) return;
    auto v = ev.sla_value(sla.metric);
    if (!v) return;
    if (!best || *v < *best) best = *v;
}

}  // namespace edetail

// Edit 1: re-run the direct gateway assignment over the alpha_g grid and keep
// the best outcome (compliance first, then feasibility, then latency); the
// incumbent is kept unless a grid point is strictly better.
inline CompositionPlan rebalance_gateways_direct(const Topology& topo, const Allocation& alloc,
                                                 const CompositionPlan& plan,
                                                 const CostWeights& weights,
                                                 const TrafficConfig& traffic, FormulaMode mode,
                                                 const SlaSpec& sla,
                                                 std::optional<double>* stable_sla_seen = nullptr) {
    if (plan.strategy != Strategy::Direct)
        throw std::invalid_argument("rebalance_gateways_direct: plan is not direct");
    CompositionPlan best_plan = plan;
    auto best = edetail::plan_score(evaluate_plan(topo, plan, alloc, traffic, mode), sla);
    for (double ag : default_alpha_grid()) {
        CostWeights w = weights;
        w.alpha = ag;
        CompositionPlan cand = compose_direct(topo, alloc, w);
        auto ev = evaluate_plan(topo, cand, alloc, traffic, mode);
        if (stable_sla_seen) edetail::track_stable(*stable_sla_seen, ev, sla);
        auto sc = edetail::plan_score(ev, sla);
        if (edetail::better(sc, best)) {
            best = sc;
            best_plan = std::move(cand);
        }
    }
    return best_plan;
}

namespace edetail {

// Re-choose only the head->gateway edges of a clustered plan; cluster
// membership and head identity stay fixed. Mirrors the composer's sequential
// load accounting, iterating clusters in cluster_heads order.
inline CompositionPlan reassign_cluster_gateways(const Topology& topo, const Allocation& alloc,
                                                 const CompositionPlan& plan,
                                                 const CostWeights& w) {
    auto gws = topo.gateway_ids();
    auto own = detail::own_rates(topo, alloc);
    CompositionPlan out;
    out.strategy = Strategy::Clustered;
    out.alpha = w.alpha;
    out.k = plan.k;
    out.cluster_heads = plan.cluster_heads;
    out.discipline = plan.discipline;
    std::map<DroneId, double> gw_rate;
    for (DroneId h : plan.cluster_heads) {
        std::vector<DroneId> cl{h};
        for (const auto& [src, dst] : plan.forward)
            if (dst == h && src != h) cl.push_back(src);
        std::sort(cl.begin(), cl.end());
        Vec2 centroid{0.0, 0.0};
        double rate = 0.0;
        for (DroneId m : cl) {
            centroid.x += topo.drone(m).pos.x / static_cast<double>(cl.size());
            centroid.y += topo.drone(m).pos.y / static_cast<double>(cl.size());
            rate += own.count(m) ? own[m] : 0.0;
        }
        std::vector<double> gdists, gloads;
        for (DroneId g : gws) {
            const auto& gd = topo.drone(g);
            gdists.push_back(distance(centroid, gd.pos));
            gloads.push_back(gd.mu > 0 ? gw_rate[g] / gd.mu : 0.0);
        }
        DroneId g = gws[detail::argmin(weighted_cost_scores(gdists, gloads, w))];
        out.forward[h] = g;
        for (DroneId m : cl)
            if (m != h) {
                out.forward[m] = h;
                out.paths.push_back({m, h, g});
            }
        out.paths.push_back({h, g});
        gw_rate[g] += rate;
    }
    validate_plan(topo, out);
    return out;
}

// Re-choose only the tail->gateway edges of a parallel plan; chain membership
// and order stay fixed. Chains are processed in path order.
inline CompositionPlan reassign_chain_gateways(const Topology& topo, const Allocation& alloc,
                                               const CompositionPlan& plan,
                                               const CostWeights& w) {
    auto gws = topo.gateway_ids();
    auto own = detail::own_rates(topo, alloc);
    CompositionPlan out = plan;
    out.alpha = w.alpha;
    std::map<DroneId, double> gw_rate;
    for (auto& path : out.paths) {
        DroneId tail = path[path.size() - 2];
        double rate = 0.0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            rate += own.count(path[i]) ? own[path[i]] : 0.0;
        std::vector<double> gdists, gloads;
        for (DroneId g : gws) {
            const auto& gd = topo.drone(g);
            gdists.push_back(distance(topo.drone(tail).pos, gd.pos));
            gloads.push_back(gd.mu > 0 ? gw_rate[g] / gd.mu : 0.0);
        }
        DroneId g = gws[detail::argmin(weighted_cost_scores(gdists, gloads, w))];
        out.forward[tail] = g;
        path.back() = g;
        gw_rate[g] += rate;
    }
    validate_plan(topo, out);
    return out;
}

}  // namespace edetail

// Edit 2: rebalance the aggregate->gateway attachment (cluster heads or chain
// tails) over the alpha_g grid, preserving internal composition.
inline CompositionPlan rebalance_gateways_aggregate(
    const Topology& topo, const Allocation& alloc, const CompositionPlan& plan,
    const CostWeights& weights, const TrafficConfig& traffic, FormulaMode mode,
    const SlaSpec& sla, std::optional<double>* stable_sla_seen = nullptr) {
    if (plan.strategy != Strategy::Clustered && plan.strategy != Strategy::Parallel)
        throw std::invalid_argument("rebalance_gateways_aggregate: plan is direct");
    CompositionPlan best_plan = plan;
    auto best = edetail::plan_score(evaluate_plan(topo, plan, alloc, traffic, mode), sla);
    for (double ag : default_alpha_grid()) {
        CostWeights w = weights;
        w.alpha = ag;
        CompositionPlan cand = plan.strategy == Strategy::Clustered
                                   ? edetail::reassign_cluster_gateways(topo, alloc, plan, w)
                                   : edetail::reassign_chain_gateways(topo, alloc, plan, w);
        auto ev = evaluate_plan(topo, cand, alloc, traffic, mode);
        if (stable_sla_seen) edetail::track_stable(*stable_sla_seen, ev, sla);
        auto sc = edetail::plan_score(ev, sla);
        if (edetail::better(sc, best)) {
            best = sc;
            best_plan = std::move(cand);
        }
    }
    return best_plan;
}

// Edit 3: when some cluster head runs above rho_max, raise k by one and
// re-cluster with the same seed policy. Returns the plan unchanged when no
// head is overloaded; throws when no spare drone allows a further split.
inline CompositionPlan split_cluster(const Topology& topo, const Allocation& alloc,
                                     const CompositionPlan& plan, const CostWeights& weights,
                                     const TrafficConfig& traffic, FormulaMode mode,
                                     double rho_max = 1.0, std::uint64_t seed = 0) {
    if (plan.strategy != Strategy::Clustered)
        throw std::invalid_argument("split_cluster: plan is not clustered");
    auto arrivals = derive_node_arrivals(topo, plan, alloc, traffic);
    bool overloaded = false;
    for (DroneId h : plan.cluster_heads) {
        auto it = arrivals.find(h);
        if (it != arrivals.end() && node_delay(it->second, mode).rho > rho_max) {
            overloaded = true;
            break;
        }
    }
    if (!overloaded) return plan;
    int k1 = plan.k + 1;
    if (k1 > static_cast<int>(topo.non_gateway_ids().size()))
        throw NoSplitPossibleError("cluster split: k already equals the non-gateway drone count");
    return compose_clustered(topo, alloc, weights, seed, k1);
}

// Edit 4: cut the maximum-utilization chain at its midpoint. The upstream half
// keeps the original gateway through a new direct tail edge; the downstream
// half is re-anchored at the weighted-cost-best gateway. k grows by one.
inline CompositionPlan multiply_paths(const Topology& topo, const Allocation& alloc,
                                      const CompositionPlan& plan, const CostWeights& weights,
                                      const TrafficConfig& traffic, FormulaMode mode) {
    if (plan.strategy != Strategy::Parallel)
        throw std::invalid_argument("multiply_paths: plan is not parallel");
    auto arrivals = derive_node_arrivals(topo, plan, alloc, traffic);
    std::map<DroneId, double> rho;
    for (const auto& [id, in] : arrivals) rho[id] = node_delay(in, mode).rho;

    int best_idx = -1;
    double best_util = -1.0;
    for (std::size_t i = 0; i < plan.paths.size(); ++i) {
        const auto& path = plan.paths[i];
        std::size_t r = path.size() - 1;  // member count (last element is the gateway)
        if (r < 2) continue;
        double u = 0.0;
        for (std::size_t j = 0; j < r; ++j) u = std::max(u, rho.count(path[j]) ? rho[path[j]] : 0.0);
        if (u > best_util) {  // strict: ties keep the lowest path index
            best_util = u;
            best_idx = static_cast<int>(i);
        }
    }
    if (best_idx < 0) throw NoSplitPossibleError("path multiply: every chain has a single member");

    const auto path = plan.paths[best_idx];
    const std::size_t r = path.size() - 1;
    const std::size_t h = r / 2;  // upstream half m1..mh
    const DroneId g_orig = path.back();

    CompositionPlan out = plan;
    out.forward[path[h - 1]] = g_orig;

    // choose the new anchor for the downstream half, with gateway loads
    // recomputed as if that half were not yet assigned
    std::set<DroneId> half_b(path.begin() + h, path.begin() + r);
    auto own = detail::own_rates(topo, alloc);
    std::map<DroneId, double> inflow;
    for (const auto& [src, dst] : out.forward) {
        (void)dst;
        if (half_b.count(src)) continue;
        double rs = own.count(src) ? own[src] : 0.0;
        if (rs <= 0.0) continue;
        inflow[out.route_from(src).back()] += rs;
    }
    auto gws = topo.gateway_ids();
    std::vector<double> gdists, gloads;
    DroneId tail = path[r - 1];
    for (DroneId g : gws) {
        const auto& gd = topo.drone(g);
        gdists.push_back(distance(topo.drone(tail).pos, gd.pos));
        gloads.push_back(gd.mu > 0 ? inflow[g] / gd.mu : 0.0);
    }
    DroneId g_new = gws[detail::argmin(weighted_cost_scores(gdists, gloads, weights))];
    out.forward[tail] = g_new;

    std::vector<DroneId> path_a(path.begin(), path.begin() + h);
    path_a.push_back(g_orig);
    std::vector<DroneId> path_b(path.begin() + h, path.begin() + r);
    path_b.push_back(g_new);
    out.paths[best_idx] = std::move(path_a);
    out.paths.push_back(std::move(path_b));
    out.k = plan.k + 1;
    validate_plan(topo, out);
    return out;
}

struct Recommendation {
    std::optional<ScaleOutSuggestion> scaleout;
    std::optional<double> downgrade;  // loosest bound that would have passed
    bool demand_reduction = false;    // no stable candidate found at all
};

// On exhaustion: size the gateway scale-out from capacity arithmetic (demand
// in data-service-equivalent terms against pooled gateway service capacity at
// the utilization ceiling) and surface the best achievable latency seen.
inline Recommendation recommend_scaleout_or_downgrade(
    const Topology& topo, const TrafficConfig& traffic, const SlaSpec& sla,
    const CandidateEvaluation& final_eval, std::optional<double> best_stable_sla) {
    Recommendation rec;
    if (best_stable_sla)
        rec.downgrade = best_stable_sla;
    else
        rec.demand_reduction = true;

    double lambda_total = 0.0;
    for (const auto& dev : topo.devices) lambda_total += dev.lambda;
    double lambda_eff =
        lambda_total * (1.0 + traffic.control_fraction * traffic.control_size_ratio());
    double sum_mu = 0.0;
    int n_gw = 0;
    for (const auto& d : topo.drones)
        if (d.is_gateway()) {
            sum_mu += d.mu;
            ++n_gw;
        }
    if (n_gw == 0 || lambda_eff <= 0.0) return rec;
    double mu_new = sum_mu / n_gw;
    int added = ceil_int((lambda_eff / sla.rho_max - sum_mu) / mu_new);
    if (added <= 0) return rec;

    ScaleOutSuggestion s;
    s.added_gateways = added;
    s.clone_mu = mu_new;
    s.projected_utilization = lambda_eff / (sum_mu + added * mu_new);
    Vec2 c{0.0, 0.0};
    int n = 0;
    for (const auto& [id, nd] : final_eval.delays)
        if (nd.rho > sla.rho_max) {
            c.x += topo.drone(id).pos.x;
            c.y += topo.drone(id).pos.y;
            ++n;
        }
    if (n == 0) {
        for (const auto& d : topo.drones)
            if (d.is_gateway()) {
                c.x += d.pos.x;
                c.y += d.pos.y;
                ++n;
            }
    }
    s.position = {c.x / n, c.y / n};
    rec.scaleout = s;
    return rec;
}

// The enforcement loop. Starts from the most promising candidate of the
// initial evaluation and cycles the four edits (strategy-mismatched edits are
// recorded no-ops) until compliance, a fixpoint, or the cycle cap.
inline EnforcementOutcome enforce(const Topology& topo, const Allocation& alloc,
                                  const SlaSpec& sla, const SelectionResult& initial,
                                  const TrafficConfig& traffic, FormulaMode mode,
                                  const CostWeights& weights = {}, std::uint64_t seed = 0,
                                  int cycle_cap = 20) {
    EnforcementOutcome out;
    std::optional<double> best_stable;

    std::optional<CandidateEvaluation> cur;
    auto consider = [&](const CandidateEvaluation& ev) {
        if (!ev.constructed) return;
        edetail::track_stable(best_stable, ev, sla);
        if (!cur || edetail::better(edetail::plan_score(ev, sla), edetail::plan_score(*cur, sla)))
            cur = ev;
    };
    for (const auto& ev : initial.table) consider(ev);
    if (!cur)
        for (const auto& ev : enumerate_candidates(topo, alloc, weights, traffic, mode, false, seed))
            consider(ev);
    if (!cur) throw TooFewDronesError("enforce: no composition could be constructed");

    auto finalize = [&](bool compliant, int cycles) {
        out.compliant = compliant;
        out.cycles = cycles;
        out.final_plan = cur->plan;
        out.final_eval = *cur;
        if (!compliant) {
            auto rec = recommend_scaleout_or_downgrade(topo, traffic, sla, *cur, best_stable);
            out.downgrade_suggestion = rec.downgrade;
            out.demand_reduction = rec.demand_reduction;
            out.scaleout_suggestion = rec.scaleout;
            double rho_now = max_rho(cur->delays);
            auto sla_now = cur->sla_value(sla.metric);
            if (rec.scaleout) {
                EditRecord r{EditKind::ScaleOut, cycles, true,
                             "add " + std::to_string(rec.scaleout->added_gateways) + " gateway(s)",
                             rho_now, rho_now, sla_now, sla_now};
                out.edits.push_back(r);
            }
            EditRecord r{EditKind::SlaDowngrade, cycles, true,
                         rec.downgrade ? "loosen latency bound to the reported minimum"
                                       : "demand reduction required: no stable candidate",
                         rho_now, rho_now, sla_now, sla_now};
            out.edits.push_back(r);
        }
        return out;
    };

    if (is_compliant(*cur, sla)) return finalize(true, 0);

    for (int cycle = 1; cycle <= cycle_cap; ++cycle) {
        bool changed_in_cycle = false;
        for (EditKind kind :
             {EditKind::GatewayRebalanceDirect, EditKind::GatewayRebalanceAggregate,
              EditKind::ClusterSplit, EditKind::PathMultiply}) {
            EditRecord rec;
            rec.kind = kind;
            rec.cycle = cycle;
            rec.pre_max_rho = max_rho(cur->delays);
            rec.pre_sla = cur->sla_value(sla.metric);

            std::optional<CompositionPlan> proposal;
            try {
                switch (kind) {
                    case EditKind::GatewayRebalanceDirect: {
                        if (cur->plan.strategy != Strategy::Direct) {
                            rec.detail = "plan is not direct";
                            break;
                        }
                        auto p = rebalance_gateways_direct(topo, alloc, cur->plan, weights,
                                                           traffic, mode, sla, &best_stable);
                        if (edetail::same_plan(p, cur->plan))
                            rec.detail = "already balanced";
                        else
                            proposal = std::move(p);
                        break;
                    }
                    case EditKind::GatewayRebalanceAggregate: {
                        if (cur->plan.strategy == Strategy::Direct) {
                            rec.detail = "plan is direct";
                            break;
                        }
                        auto p = rebalance_gateways_aggregate(topo, alloc, cur->plan, weights,
                                                              traffic, mode, sla, &best_stable);
                        if (edetail::same_plan(p, cur->plan))
                            rec.detail = "already balanced";
                        else
                            proposal = std::move(p);
                        break;
                    }
                    case EditKind::ClusterSplit: {
                        if (cur->plan.strategy != Strategy::Clustered) {
                            rec.detail = "plan is not clustered";
                            break;
                        }
                        auto p = split_cluster(topo, alloc, cur->plan, weights, traffic, mode,
                                               sla.rho_max, seed);
                        if (edetail::same_plan(p, cur->plan))
                            rec.detail = "no overloaded cluster head";
                        else
                            proposal = std::move(p);
                        break;
                    }
                    case EditKind::PathMultiply: {
                        if (cur->plan.strategy != Strategy::Parallel) {
                            rec.detail = "plan is not parallel";
                            break;
                        }
                        proposal = multiply_paths(topo, alloc, cur->plan, weights, traffic, mode);
                        break;
                    }
                    default: break;
                }
            } catch (const NoSplitPossibleError& e) {
                rec.detail = e.what();
            } catch (const TooFewDronesError& e) {
                rec.detail = e.what();
            }

            if (proposal) {
                auto ev = evaluate_plan(topo, *proposal, alloc, traffic, mode);
                ev.index = cur->index;
                edetail::track_stable(best_stable, ev, sla);
                rec.applied = true;
                rec.post_max_rho = max_rho(ev.delays);
                rec.post_sla = ev.sla_value(sla.metric);
                cur = std::move(ev);
                changed_in_cycle = true;
            } else {
                rec.post_max_rho = rec.pre_max_rho;
                rec.post_sla = rec.pre_sla;
            }
            out.edits.push_back(std::move(rec));
            if (is_compliant(*cur, sla)) return finalize(true, cycle);
        }
        if (!changed_in_cycle) return finalize(false, cycle);
    }
    return finalize(false, cycle_cap);
}

}  // namespace snaas
