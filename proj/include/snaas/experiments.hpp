#pragma once

// Experiment harness: Monte Carlo sweeps over request bins producing the
// violation-rate, latency, strategy-frequency and scaling tables. Requests
// inside a bin run concurrently up to a worker count; results land in
// preallocated slots so file output is ordered by bin then request index
// regardless of completion order.

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "snaas/baselines.hpp"
#include "snaas/enforcement.hpp"
#include "snaas/io.hpp"
#include "snaas/workload.hpp"

namespace snaas {

namespace expdetail {

template <typename F>
inline void parallel_for(int n, int workers, F&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    int spawn = std::min(workers, n);
    for (int w = 0; w < spawn; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        double var = (sum2 - sum * sum / n) / (n - 1);
        return var > 0.0 ? std::sqrt(var / n) : 0.0;
    }
};

inline double binomial_se(double p, int n) {
    return n > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) / n) : 0.0;
}

}  // namespace expdetail

struct ExperimentConfig {
    WorkloadConfig workload;
    TrafficConfig traffic;
    FormulaMode mode = FormulaMode::Paper;  // figure reproduction by default
    int requests_per_bin = 100;
    double perturbation = 0.1;
    std::uint64_t seed = 1;
    int workers = 1;

    // exp1: violation rate vs SLA bound, small scale, fixed device count
    std::vector<double> exp1_sla_bins = {0.0012, 0.0016, 0.0022, 0.0030, 0.0040, 0.0055};
    int exp1_device_count = 150;
    std::uint64_t brute_force_cap = 200;

    // exp2/exp3: device-count sweep at a fixed SLA
    std::vector<int> exp2_device_bins = {160, 200, 240, 280, 310, 330, 350, 365};
    double exp2_sla_latency = 0.005;
    std::vector<int> exp3_device_bins = {40, 80, 120, 150, 175, 195, 210, 220};
    double exp3_sla_latency = 0.0025;

    // exp4: device-count sweep per scale, enforced framework
    std::vector<int> exp4_device_bins = {60, 120, 180, 240, 320, 420, 540, 660, 720};
    double exp4_sla_latency = 0.005;
    bool exp4_reduced_large = false;  // 50 entries / 8 gateways wall-clock variant
};

// ---- experiment 1: violation rate & runtime vs SLA bound ----

struct MethodBinStats {
    std::string method;
    double violation_rate = 0.0;
    double violation_se = 0.0;
    double mean_runtime_s = 0.0;
    double runtime_se = 0.0;
};

struct Exp1Bin {
    double sla_bound = 0.0;
    std::vector<MethodBinStats> methods;  // heuristic, bf-direct, bf-clustered
};

struct Exp1Result {
    std::vector<Exp1Bin> bins;
};

inline Exp1Result run_exp1(const ExperimentConfig& cfg) {
    Exp1Result out;
    auto scale = small_scale();
    RequestDefaults base;
    base.device_count = cfg.exp1_device_count;
    base.per_device_lambda = cfg.workload.per_device_lambda;

    struct PerRequest {
        bool viol[3] = {false, false, false};
        double runtime[3] = {0.0, 0.0, 0.0};
    };
    for (std::size_t b = 0; b < cfg.exp1_sla_bins.size(); ++b) {
        auto bin = generate_requests(cfg.exp1_sla_bins[b], BinAxis::SlaLatency, base,
                                     cfg.requests_per_bin, cfg.perturbation,
                                     derive_seed(cfg.seed, 100 + b));
        std::vector<PerRequest> rows(bin.requests.size());
        expdetail::parallel_for(
            static_cast<int>(bin.requests.size()), cfg.workers, [&](int i) {
                const auto& req = bin.requests[i];
                auto topo = materialize_request(scale, req, cfg.workload);
                auto alloc = allocate_devices(topo, {});
                auto timed = [&](auto&& fn) {
                    auto t0 = std::chrono::steady_clock::now();
                    bool v = fn();
                    auto t1 = std::chrono::steady_clock::now();
                    return std::pair<bool, double>(
                        v, std::chrono::duration<double>(t1 - t0).count());
                };
                auto [v0, r0] = timed([&] {
                    auto sel = select_composition(topo, alloc, {}, cfg.traffic, cfg.mode,
                                                  req.sla);
                    return sel.no_feasible();
                });
                auto violates = [&](const BaselineResult& res) {
                    if (!res.best) return true;
                    auto v = res.best->sla_value(req.sla.metric);
                    return !v || *v > req.sla.latency_bound;
                };
                auto [v1, r1] = timed([&] {
                    return violates(brute_force_direct(topo, alloc, cfg.traffic, cfg.mode,
                                                       req.sla, cfg.brute_force_cap, req.seed));
                });
                auto [v2, r2] = timed([&] {
                    return violates(brute_force_clustered(topo, alloc, cfg.traffic, cfg.mode,
                                                          req.sla, cfg.brute_force_cap,
                                                          req.seed));
                });
                rows[i] = PerRequest{{v0, v1, v2}, {r0, r1, r2}};
            });

        Exp1Bin eb;
        eb.sla_bound = cfg.exp1_sla_bins[b];
        const char* names[3] = {"heuristic", "bf-direct", "bf-clustered"};
        for (int m = 0; m < 3; ++m) {
            expdetail::Accumulator rt;
            int viol = 0;
            for (const auto& r : rows) {
                if (r.viol[m]) ++viol;
                rt.add(r.runtime[m]);
            }
            MethodBinStats ms;
            ms.method = names[m];
            ms.violation_rate = static_cast<double>(viol) / rows.size();
            ms.violation_se = expdetail::binomial_se(ms.violation_rate,
                                                    static_cast<int>(rows.size()));
            ms.mean_runtime_s = rt.mean();
            ms.runtime_se = rt.se();
            eb.methods.push_back(ms);
        }
        out.bins.push_back(std::move(eb));
    }
    return out;
}

inline void write_exp1_csv(std::ostream& os, const Exp1Result& r, const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "sla_bin,method,violation_rate,mean_runtime_s,violation_se,runtime_se\n";
    os << std::setprecision(17);
    for (const auto& b : r.bins)
        for (const auto& m : b.methods)
            os << b.sla_bound << "," << m.method << "," << m.violation_rate << ","
               << m.mean_runtime_s << "," << m.violation_se << "," << m.runtime_se << "\n";
}

// ---- experiment 2: latency vs device count, fixed strategies vs enforced ----

struct LatencyBinStats {
    std::string method;
    int requests = 0;
    int stable_requests = 0;
    double stable_fraction = 0.0;
    std::optional<double> mean_latency;  // over stable requests only
    double latency_se = 0.0;
};

struct Exp2Bin {
    int device_count = 0;
    std::vector<LatencyBinStats> methods;  // direct, clustered, parallel, enforced
};

struct Exp2Result {
    std::vector<Exp2Bin> bins;
};

// One request, one fixed strategy: stable? and if so, which mean latency.
inline std::pair<bool, double> fixed_strategy_latency(const Topology& topo,
                                                      const Allocation& alloc,
                                                      Strategy strategy,
                                                      const TrafficConfig& traffic,
                                                      FormulaMode mode, std::uint64_t seed) {
    CompositionPlan plan;
    try {
        switch (strategy) {
            case Strategy::Direct: plan = compose_direct(topo, alloc, {}); break;
            case Strategy::Clustered: plan = compose_clustered(topo, alloc, {}, seed); break;
            case Strategy::Parallel: plan = compose_parallel(topo, alloc, {}); break;
        }
    } catch (const TooFewDronesError&) {
        return {false, 0.0};
    }
    auto ev = evaluate_plan(topo, plan, alloc, traffic, mode);
    if (!ev.feasible || !ev.latency.l_avg) return {false, 0.0};
    return {true, *ev.latency.l_avg};
}

// One request through the full framework: selection, then enforcement if
// nothing met the SLA outright.
inline std::pair<bool, double> enforced_latency(const Topology& topo, const Allocation& alloc,
                                                const SlaSpec& sla,
                                                const TrafficConfig& traffic, FormulaMode mode,
                                                std::uint64_t seed) {
    auto sel = select_composition(topo, alloc, {}, traffic, mode, sla, false, seed);
    if (!sel.no_feasible()) {
        const auto& best = sel.best();
        return {true, *best.latency.l_avg};
    }
    EnforcementOutcome out;
    try {
        out = enforce(topo, alloc, sla, sel, traffic, mode, {}, seed);
    } catch (const TooFewDronesError&) {
        return {false, 0.0};
    }
    if (out.final_eval.feasible && out.final_eval.latency.l_avg)
        return {true, *out.final_eval.latency.l_avg};
    return {false, 0.0};
}

inline Exp2Result run_exp2(const ExperimentConfig& cfg) {
    Exp2Result out;
    auto scale = medium_scale();
    RequestDefaults base;
    base.per_device_lambda = cfg.workload.per_device_lambda;
    base.sla.latency_bound = cfg.exp2_sla_latency;

    struct PerRequest {
        bool stable[4] = {false, false, false, false};
        double latency[4] = {0.0, 0.0, 0.0, 0.0};
    };
    for (std::size_t b = 0; b < cfg.exp2_device_bins.size(); ++b) {
        auto bin = generate_requests(cfg.exp2_device_bins[b], BinAxis::DeviceCount, base,
                                     cfg.requests_per_bin, cfg.perturbation,
                                     derive_seed(cfg.seed, 200 + b));
        std::vector<PerRequest> rows(bin.requests.size());
        expdetail::parallel_for(
            static_cast<int>(bin.requests.size()), cfg.workers, [&](int i) {
                const auto& req = bin.requests[i];
                auto topo = materialize_request(scale, req, cfg.workload);
                auto alloc = allocate_devices(topo, {});
                Strategy fixed[3] = {Strategy::Direct, Strategy::Clustered,
                                     Strategy::Parallel};
                PerRequest row;
                for (int m = 0; m < 3; ++m) {
                    auto [st, lat] = fixed_strategy_latency(topo, alloc, fixed[m], cfg.traffic,
                                                            cfg.mode, req.seed);
                    row.stable[m] = st;
                    row.latency[m] = lat;
                }
                auto [st, lat] =
                    enforced_latency(topo, alloc, req.sla, cfg.traffic, cfg.mode, req.seed);
                row.stable[3] = st;
                row.latency[3] = lat;
                rows[i] = row;
            });

        Exp2Bin eb;
        eb.device_count = cfg.exp2_device_bins[b];
        const char* names[4] = {"direct", "clustered", "parallel", "enforced"};
        for (int m = 0; m < 4; ++m) {
            expdetail::Accumulator acc;
            for (const auto& r : rows)
                if (r.stable[m]) acc.add(r.latency[m]);
            LatencyBinStats ls;
            ls.method = names[m];
            ls.requests = static_cast<int>(rows.size());
            ls.stable_requests = acc.n;
            ls.stable_fraction = static_cast<double>(acc.n) / rows.size();
            if (acc.n > 0) ls.mean_latency = acc.mean();
            ls.latency_se = acc.se();
            eb.methods.push_back(ls);
        }
        out.bins.push_back(std::move(eb));
    }
    return out;
}

inline void write_exp2_csv(std::ostream& os, const Exp2Result& r, const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "device_bin,method,stable_fraction,mean_latency_s,latency_se,stable_requests,"
          "requests\n";
    os << std::setprecision(17);
    for (const auto& b : r.bins)
        for (const auto& m : b.methods) {
            os << b.device_count << "," << m.method << "," << m.stable_fraction << ",";
            if (m.mean_latency) os << *m.mean_latency;
            os << "," << m.latency_se << "," << m.stable_requests << "," << m.requests << "\n";
        }
}

// ---- experiment 3: strategy-selection frequency vs load ----

struct Exp3Bin {
    int device_count = 0;
    double direct_rate = 0.0;
    double clustered_rate = 0.0;
    double parallel_rate = 0.0;
    double none_rate = 0.0;
};

struct Exp3Result {
    std::vector<Exp3Bin> bins;
};

inline Exp3Result run_exp3(const ExperimentConfig& cfg) {
    Exp3Result out;
    auto scale = small_scale();
    RequestDefaults base;
    base.per_device_lambda = cfg.workload.per_device_lambda;
    base.sla.latency_bound = cfg.exp3_sla_latency;

    for (std::size_t b = 0; b < cfg.exp3_device_bins.size(); ++b) {
        auto bin = generate_requests(cfg.exp3_device_bins[b], BinAxis::DeviceCount, base,
                                     cfg.requests_per_bin, cfg.perturbation,
                                     derive_seed(cfg.seed, 300 + b));
        std::vector<int> pick(bin.requests.size(), 3);  // 0=d, 1=c, 2=p, 3=none
        expdetail::parallel_for(
            static_cast<int>(bin.requests.size()), cfg.workers, [&](int i) {
                const auto& req = bin.requests[i];
                auto topo = materialize_request(scale, req, cfg.workload);
                auto alloc = allocate_devices(topo, {});
                // the frequency tracks what the full pipeline (selection,
                // then enforcement when selection fails) ends up running
                auto sel = select_composition(topo, alloc, {}, cfg.traffic, cfg.mode, req.sla,
                                              false, req.seed);
                std::optional<Strategy> chosen;
                if (!sel.no_feasible()) {
                    chosen = sel.best().plan.strategy;
                } else {
                    try {
                        auto out =
                            enforce(topo, alloc, req.sla, sel, cfg.traffic, cfg.mode, {},
                                    req.seed);
                        // count the strategy the pipeline actually sustains;
                        // an unstable final plan falls into the none column
                        if (out.final_eval.feasible) chosen = out.final_plan.strategy;
                    } catch (const TooFewDronesError&) {
                    }
                }
                if (!chosen) return;
                switch (*chosen) {
                    case Strategy::Direct: pick[i] = 0; break;
                    case Strategy::Clustered: pick[i] = 1; break;
                    case Strategy::Parallel: pick[i] = 2; break;
                }
            });
        Exp3Bin eb;
        eb.device_count = cfg.exp3_device_bins[b];
        double n = static_cast<double>(pick.size());
        for (int p : pick) {
            if (p == 0) eb.direct_rate += 1.0 / n;
            if (p == 1) eb.clustered_rate += 1.0 / n;
            if (p == 2) eb.parallel_rate += 1.0 / n;
            if (p == 3) eb.none_rate += 1.0 / n;
        }
        out.bins.push_back(eb);
    }
    return out;
}

inline void write_exp3_csv(std::ostream& os, const Exp3Result& r, const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "device_bin,direct_rate,clustered_rate,parallel_rate,none_rate\n";
    os << std::setprecision(17);
    for (const auto& b : r.bins)
        os << b.device_count << "," << b.direct_rate << "," << b.clustered_rate << ","
           << b.parallel_rate << "," << b.none_rate << "\n";
}

// ---- experiment 4: enforced latency vs device count across scales ----

struct Exp4Cell {
    std::string scale;
    int device_count = 0;
    int requests = 0;
    int stable_requests = 0;
    double stable_fraction = 0.0;
    std::optional<double> mean_latency;
    double latency_se = 0.0;
};

struct Exp4Result {
    std::vector<Exp4Cell> cells;  // ordered scale-major, then bins ascending
};

inline Exp4Result run_exp4(const ExperimentConfig& cfg) {
    Exp4Result out;
    std::vector<ScenarioScale> scales = {small_scale(), medium_scale(),
                                         cfg.exp4_reduced_large ? ScenarioScale{"large", 50, 8}
                                                                : large_scale()};
    RequestDefaults base;
    base.per_device_lambda = cfg.workload.per_device_lambda;
    base.sla.latency_bound = cfg.exp4_sla_latency;

    for (std::size_t s = 0; s < scales.size(); ++s) {
        // a scale can only host what its entry drones have capacity for
        double mu = service_rate_at(cfg.workload.link, cfg.workload.altitude);
        int cap = device_capacity(mu, cfg.workload.per_device_lambda) * scales[s].entry_drones;
        for (std::size_t b = 0; b < cfg.exp4_device_bins.size(); ++b) {
            int nominal = cfg.exp4_device_bins[b];
            if (static_cast<double>(nominal) * (1.0 + cfg.perturbation) > cap) continue;
            auto bin = generate_requests(nominal, BinAxis::DeviceCount, base,
                                         cfg.requests_per_bin, cfg.perturbation,
                                         derive_seed(cfg.seed, 400 + 50 * s + b));
            std::vector<std::pair<bool, double>> rows(bin.requests.size(), {false, 0.0});
            expdetail::parallel_for(
                static_cast<int>(bin.requests.size()), cfg.workers, [&](int i) {
                    const auto& req = bin.requests[i];
                    auto topo = materialize_request(scales[s], req, cfg.workload);
                    auto alloc = allocate_devices(topo, {});
                    rows[i] = enforced_latency(topo, alloc, req.sla, cfg.traffic, cfg.mode,
                                               req.seed);
                });
            Exp4Cell cell;
            cell.scale = scales[s].name;
            cell.device_count = nominal;
            cell.requests = static_cast<int>(rows.size());
            expdetail::Accumulator acc;
            for (const auto& [st, lat] : rows)
                if (st) acc.add(lat);
            cell.stable_requests = acc.n;
            cell.stable_fraction = static_cast<double>(acc.n) / rows.size();
            if (acc.n > 0) cell.mean_latency = acc.mean();
            cell.latency_se = acc.se();
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

inline void write_exp4_csv(std::ostream& os, const Exp4Result& r, const Provenance& prov) {
    os << provenance_comment(prov) << "\n";
    os << "scale,device_bin,stable_fraction,mean_latency_s,latency_se,stable_requests,"
          "requests\n";
    os << std::setprecision(17);
    for (const auto& c : r.cells) {
        os << c.scale << "," << c.device_count << "," << c.stable_fraction << ",";
        if (c.mean_latency) os << *c.mean_latency;
        os << "," << c.latency_se << "," << c.stable_requests << "," << c.requests << "\n";
    }
}

// ---- trend checks (the acceptance gate consumes these) ----

// Allows `allowed_inversions` strictly-increasing adjacent steps beyond
// `tolerance` to absorb sampling noise.
inline bool non_increasing(const std::vector<double>& v, int allowed_inversions = 0,
                           double tolerance = 1e-12) {
    int inversions = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tolerance) ++inversions;
    return inversions <= allowed_inversions;
}

struct Exp1Checks {
    bool rates_non_increasing = false;
    bool bf_direct_highest = false;
    bool heuristic_matches_bf_clustered = false;  // within 3 percentage points
    bool heuristic_runtime_10x = false;
    bool all() const {
        return rates_non_increasing && bf_direct_highest && heuristic_matches_bf_clustered &&
               heuristic_runtime_10x;
    }
};

inline Exp1Checks check_exp1(const Exp1Result& r) {
    Exp1Checks c;
    std::vector<double> rate[3];
    double rt[3] = {0.0, 0.0, 0.0};
    for (const auto& b : r.bins)
        for (int m = 0; m < 3; ++m) {
            rate[m].push_back(b.methods[m].violation_rate);
            rt[m] += b.methods[m].mean_runtime_s;
        }
    c.rates_non_increasing = non_increasing(rate[0], 1) && non_increasing(rate[1], 1) &&
                             non_increasing(rate[2], 1);
    c.bf_direct_highest = true;
    c.heuristic_matches_bf_clustered = true;
    for (const auto& b : r.bins) {
        if (b.methods[1].violation_rate + 1e-12 < b.methods[0].violation_rate ||
            b.methods[1].violation_rate + 1e-12 < b.methods[2].violation_rate)
            c.bf_direct_highest = false;
        if (std::abs(b.methods[0].violation_rate - b.methods[2].violation_rate) > 0.03 + 1e-12)
            c.heuristic_matches_bf_clustered = false;
    }
    c.heuristic_runtime_10x = rt[0] * 10.0 <= rt[1] && rt[0] * 10.0 <= rt[2];
    return c;
}

struct Exp2Checks {
    bool enforced_dominates = false;       // at bins where the fixed strategy is stable
    bool fixed_unstable_earlier = false;   // direct & clustered die before enforced
    bool all() const { return enforced_dominates && fixed_unstable_earlier; }
};

// A method is "stable at a bin" when every request stayed stable.
inline Exp2Checks check_exp2(const Exp2Result& r, double stable_threshold = 1.0) {
    Exp2Checks c;
    c.enforced_dominates = true;
    auto max_stable_bin = [&](int m) {
        int best = -1;
        for (const auto& b : r.bins)
            if (b.methods[m].stable_fraction >= stable_threshold)
                best = std::max(best, b.device_count);
        return best;
    };
    for (const auto& b : r.bins) {
        const auto& enforced = b.methods[3];
        for (int m = 0; m < 3; ++m) {
            const auto& fixed = b.methods[m];
            if (fixed.stable_fraction < stable_threshold) continue;
            if (!enforced.mean_latency || !fixed.mean_latency ||
                *enforced.mean_latency > *fixed.mean_latency + 1e-12)
                c.enforced_dominates = false;
        }
    }
    int enforced_max = max_stable_bin(3);
    c.fixed_unstable_earlier =
        max_stable_bin(0) < enforced_max && max_stable_bin(1) < enforced_max;
    return c;
}

struct Exp3Checks {
    bool direct_dominates_low = false;    // >= 60% in the lowest bin
    bool direct_fades_high = false;       // < 20% in the highest
    bool parallel_rare_low = false;       // < 10% in the lowest
    bool parallel_modal_high = false;     // modal choice in the highest
    bool clustered_modal_between = false; // some middle bin has clustered modal
    bool all() const {
        return direct_dominates_low && direct_fades_high && parallel_rare_low &&
               parallel_modal_high && clustered_modal_between;
    }
};

inline Exp3Checks check_exp3(const Exp3Result& r) {
    Exp3Checks c;
    if (r.bins.empty()) return c;
    const auto& lo = r.bins.front();
    const auto& hi = r.bins.back();
    c.direct_dominates_low = lo.direct_rate >= 0.60;
    c.direct_fades_high = hi.direct_rate < 0.20;
    c.parallel_rare_low = lo.parallel_rate < 0.10;
    // modal is judged among the three strategies; the none column tracks
    // requests the pipeline could not stabilize at all
    c.parallel_modal_high =
        hi.parallel_rate > hi.direct_rate && hi.parallel_rate > hi.clustered_rate;
    for (std::size_t i = 1; i + 1 < r.bins.size(); ++i) {
        const auto& b = r.bins[i];
        if (b.clustered_rate > b.direct_rate && b.clustered_rate > b.parallel_rate)
            c.clustered_modal_between = true;
    }
    return c;
}

struct Exp4Checks {
    bool latency_ordered = false;        // large <= medium <= small at shared stable bins
    bool max_stable_increasing = false;  // strictly increasing in scale
    bool all() const { return latency_ordered && max_stable_increasing; }
};

inline Exp4Checks check_exp4(const Exp4Result& r, double stable_threshold = 1.0) {
    Exp4Checks c;
    auto cell = [&](const std::string& scale, int bin) -> const Exp4Cell* {
        for (const auto& x : r.cells)
            if (x.scale == scale && x.device_count == bin) return &x;
        return nullptr;
    };
    std::vector<int> bins;
    for (const auto& x : r.cells)
        if (x.scale == "small") bins.push_back(x.device_count);

    c.latency_ordered = true;
    for (int b : bins) {
        const auto* s = cell("small", b);
        const auto* m = cell("medium", b);
        const auto* l = cell("large", b);
        if (!s || !m || !l) continue;
        if (s->stable_fraction < stable_threshold || m->stable_fraction < stable_threshold ||
            l->stable_fraction < stable_threshold)
            continue;
        if (!(*l->mean_latency <= *m->mean_latency + 1e-12 &&
              *m->mean_latency <= *s->mean_latency + 1e-12))
            c.latency_ordered = false;
    }
    auto max_stable = [&](const std::string& scale) {
        int best = -1;
        for (const auto& x : r.cells)
            if (x.scale == scale && x.stable_fraction >= stable_threshold)
                best = std::max(best, x.device_count);
        return best;
    };
    int s = max_stable("small"), m = max_stable("medium"), l = max_stable("large");
    c.max_stable_increasing = s < m && m < l;
    return c;
}

// Stable fingerprint of everything that shapes an experiment's outputs, for
// the provenance line of result files.
inline std::uint64_t experiment_config_hash(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << cfg.workload.area << '|' << cfg.workload.per_device_lambda << '|'
       << static_cast<int>(cfg.mode) << '|' << cfg.requests_per_bin << '|'
       << cfg.perturbation << '|' << cfg.seed << '|' << cfg.exp1_device_count << '|'
       << cfg.brute_force_cap << '|' << cfg.exp2_sla_latency << '|' << cfg.exp3_sla_latency
       << '|' << cfg.exp4_sla_latency << '|' << cfg.exp4_reduced_large;
    for (double b : cfg.exp1_sla_bins) os << ',' << b;
    for (int b : cfg.exp2_device_bins) os << ',' << b;
    for (int b : cfg.exp3_device_bins) os << ',' << b;
    for (int b : cfg.exp4_device_bins) os << ',' << b;
    return fnv1a(os.str());
}

}  // namespace snaas
