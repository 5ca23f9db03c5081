// Randomized invariant checks, >= 1000 cases per invariant family. Each case
// uses small fixtures so the whole file stays well under a minute.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "snaas/baselines.hpp"
#include "snaas/enforcement.hpp"
#include "snaas/io.hpp"
#include "snaas/link_budget.hpp"
#include "snaas/selection.hpp"
#include "snaas/workload.hpp"
#include "test_util.hpp"

using namespace snaas;

namespace {

Topology small_random(std::mt19937_64& rng, double mu = 100.0) {
    return testutil::random_topology(rng, 3 + static_cast<int>(rng() % 5),
                                     1 + static_cast<int>(rng() % 3),
                                     4 + static_cast<int>(rng() % 10),
                                     1.0 + static_cast<double>(rng() % 50) / 10.0, 100.0,
                                     mu);
}

std::vector<CompositionPlan> all_plans(const Topology& topo, const Allocation& alloc,
                                       std::uint64_t seed) {
    std::vector<CompositionPlan> plans;
    plans.push_back(compose_direct(topo, alloc, {}));
    try {
        plans.push_back(compose_clustered(topo, alloc, {}, seed));
    } catch (const TooFewDronesError&) {
    }
    try {
        plans.push_back(compose_parallel(topo, alloc, {}));
    } catch (const TooFewDronesError&) {
    }
    return plans;
}

}  // namespace

TEST_CASE("flow is conserved on every plan: node sums and gateway totals") {
    std::mt19937_64 rng(101);
    TrafficConfig traffic;
    int cases = 0;
    for (int rep = 0; rep < 400; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);
        double total = 0.0;
        for (const auto& d : topo.devices) total += d.lambda;

        for (const auto& plan : all_plans(topo, alloc, rng())) {
            ++cases;
            auto arr = derive_node_arrivals(topo, plan, alloc, traffic);
            auto own = alloc.offered_rate(topo);

            for (const auto& [n, in] : arr) {
                // every node carries exactly its own demand plus its children's
                double expect = own.count(n) ? own.at(n) : 0.0;
                for (const auto& [m, t] : plan.forward)
                    if (t == n) expect += arr.at(m).lambda_d;
                REQUIRE(in.lambda_d == Catch::Approx(expect).margin(1e-9));
                REQUIRE(in.lambda_c ==
                        Catch::Approx(traffic.control_fraction * in.lambda_d).margin(1e-9));
            }

            double gw_sum = 0.0;
            for (DroneId g : topo.gateway_ids())
                if (arr.count(g)) gw_sum += arr.at(g).lambda_d;
            REQUIRE(gw_sum == Catch::Approx(total).margin(1e-9));
        }
    }
    REQUIRE(cases >= 1000);
}

TEST_CASE("control traffic never waits longer than data traffic") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1500; ++rep) {
        NodeQueueInput in;
        double xd = 1e-4 + 9e-3 * u(rng);    // data service time
        double xc = xd * (0.01 + 0.5 * u(rng));  // control packets are smaller
        auto dist = rep % 2 ? ServiceDist::Exponential : ServiceDist::Deterministic;
        in.ctrl = class_moments(xc, dist);
        in.data = class_moments(xd, dist);
        // keep rho in (0, 1)
        double rho_target = 0.05 + 0.9 * u(rng);
        double split = 0.05 + 0.9 * u(rng);
        in.lambda_c = rho_target * split / xc;
        in.lambda_d = rho_target * (1.0 - split) / xd;

        for (auto mode : {FormulaMode::Paper, FormulaMode::Standard}) {
            auto nd = node_delay(in, mode);
            REQUIRE(nd.stable);
            REQUIRE(*nd.wait_c >= 0.0);
            REQUIRE(*nd.wait_c <= *nd.wait_d + 1e-15);
            REQUIRE(*nd.sojourn_c <= *nd.wait_c + in.ctrl.xbar + 1e-15);
        }
    }
}

TEST_CASE("plans of all strategies keep their structural shape") {
    std::mt19937_64 rng(303);
    int cases = 0;
    for (int rep = 0; rep < 400; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);
        auto gws = topo.gateway_ids();
        std::set<DroneId> gw_set(gws.begin(), gws.end());

        for (const auto& plan : all_plans(topo, alloc, rng())) {
            ++cases;
            REQUIRE_NOTHROW(validate_plan(topo, plan));

            // every non-gateway participates exactly once in the forward map
            for (DroneId e : topo.non_gateway_ids()) REQUIRE(plan.forward.count(e) == 1);

            for (const auto& path : plan.paths) {
                REQUIRE(path.size() >= 2);
                REQUIRE(gw_set.count(path.back()) == 1);
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    REQUIRE(gw_set.count(path[i]) == 0);
                    // consecutive hops agree with the forward map
                    REQUIRE(plan.forward.at(path[i]) == path[i + 1]);
                }
                // no node repeats inside one path
                std::set<DroneId> uniq(path.begin(), path.end());
                REQUIRE(uniq.size() == path.size());
            }

            if (plan.strategy == Strategy::Direct)
                for (const auto& path : plan.paths) REQUIRE(path.size() == 2);
            if (plan.strategy == Strategy::Clustered) {
                REQUIRE(plan.k >= 1);
                for (const auto& path : plan.paths) REQUIRE(path.size() <= 3);
            }
        }
    }
    REQUIRE(cases >= 1000);
}

TEST_CASE("enforcement edit log cycles in fixed order, bounded, deterministic") {
    std::mt19937_64 rng(404);
    const EditKind order[4] = {EditKind::GatewayRebalanceDirect,
                               EditKind::GatewayRebalanceAggregate, EditKind::ClusterSplit,
                               EditKind::PathMultiply};
    int with_edits = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);
        TrafficConfig traffic;
        SlaSpec sla;
        // bounds low enough that a healthy share of scenarios needs repairs
        sla.latency_bound = 0.002 + 0.001 * static_cast<double>(rng() % 28);
        sla.rho_max = 0.95;
        std::uint64_t seed = rng();

        auto sel =
            select_composition(topo, alloc, {}, traffic, FormulaMode::Standard, sla, false, seed);
        auto out = enforce(topo, alloc, sla, sel, traffic, FormulaMode::Standard, {}, seed);
        if (!out.edits.empty()) ++with_edits;

        std::size_t core = 0;
        for (const auto& rec : out.edits) {
            if (rec.kind == EditKind::ScaleOut || rec.kind == EditKind::SlaDowngrade)
                continue;
            REQUIRE(rec.kind == order[core % 4]);
            REQUIRE(rec.cycle == static_cast<int>(core / 4) + 1);
            ++core;
        }
        REQUIRE(out.cycles <= 20);
        REQUIRE(out.edits.size() <= 20 * 4 + 2);

        auto out2 = enforce(topo, alloc, sla, sel, traffic, FormulaMode::Standard, {}, seed);
        REQUIRE(out2.edit_kinds() == out.edit_kinds());
        REQUIRE(out2.final_plan.forward == out.final_plan.forward);
        REQUIRE(out2.compliant == out.compliant);
    }
    REQUIRE(with_edits >= 200);
}

TEST_CASE("identical seeds reproduce compositions, selections and samples") {
    std::mt19937_64 rng(505);
    for (int rep = 0; rep < 1000; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);
        std::uint64_t seed = rng();
        TrafficConfig traffic;
        SlaSpec sla;
        sla.latency_bound = 0.05;

        try {
            auto c1 = compose_clustered(topo, alloc, {}, seed);
            auto c2 = compose_clustered(topo, alloc, {}, seed);
            REQUIRE(c1.forward == c2.forward);
            REQUIRE(c1.cluster_heads == c2.cluster_heads);
        } catch (const TooFewDronesError&) {
        }

        auto s1 = select_composition(topo, alloc, {}, traffic, FormulaMode::Paper, sla,
                                     false, seed);
        auto s2 = select_composition(topo, alloc, {}, traffic, FormulaMode::Paper, sla,
                                     false, seed);
        REQUIRE(s1.winner == s2.winner);
        REQUIRE(s1.table.size() == s2.table.size());

        auto b1 = brute_force_direct(topo, alloc, traffic, FormulaMode::Paper, sla, 16, seed);
        auto b2 = brute_force_direct(topo, alloc, traffic, FormulaMode::Paper, sla, 16, seed);
        REQUIRE(b1.candidates_examined == b2.candidates_examined);
        REQUIRE(b1.best.has_value() == b2.best.has_value());
        if (b1.best) REQUIRE(b1.best->plan.forward == b2.best->plan.forward);
    }
}

TEST_CASE("brute force examines exactly min(space, cap) candidates") {
    std::mt19937_64 rng(606);
    for (int rep = 0; rep < 1000; ++rep) {
        int entries = 2 + static_cast<int>(rng() % 4);  // space <= 3^5 = 243
        int gateways = 1 + static_cast<int>(rng() % 3);
        auto topo = testutil::random_topology(rng, entries, gateways,
                                              3 + static_cast<int>(rng() % 4), 2.0);
        auto alloc = allocate_devices(topo);
        std::uint64_t cap = 1 + rng() % 260;
        TrafficConfig traffic;
        SlaSpec sla;
        sla.latency_bound = 0.05;

        auto res = brute_force_direct(topo, alloc, traffic, FormulaMode::Paper, sla,
                                      cap, rng());
        std::uint64_t space = 1;
        for (int i = 0; i < entries; ++i) space *= static_cast<std::uint64_t>(gateways);
        REQUIRE(res.space == space);
        REQUIRE(res.candidates_examined == std::min(space, cap));
        REQUIRE(res.exhaustive == (space <= cap));
    }
}

TEST_CASE("link budget and waiting times move the right way") {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LinkBudget lb;
    for (int rep = 0; rep < 1500; ++rep) {
        double b1 = 1e5 + 4e7 * u(rng), b2 = b1 * (1.0 + u(rng));
        double nf = 10.0 * u(rng);
        REQUIRE(noise_power_dbm(b2, nf) >= noise_power_dbm(b1, nf));

        double snr1 = 40.0 * u(rng), snr2 = snr1 + 20.0 * u(rng);
        REQUIRE(service_rate(lb.phy_efficiency, lb.bandwidth_hz, snr2, 8192.0) >=
                service_rate(lb.phy_efficiency, lb.bandwidth_hz, snr1, 8192.0));

        double lam1 = 1.0 + 100.0 * u(rng), lam2 = lam1 * (1.0 + u(rng));
        double mu = 200.0 + 4000.0 * u(rng);
        REQUIRE(device_capacity(mu, lam2) <= device_capacity(mu, lam1));

        // higher data load, all else equal, never shortens either wait
        NodeQueueInput in;
        in.ctrl = class_moments(1e-4, ServiceDist::Deterministic);
        in.data = class_moments(1e-3, ServiceDist::Deterministic);
        in.lambda_c = 40.0 * u(rng);
        double l1 = 500.0 * u(rng), l2 = l1 * (1.0 + u(rng));
        in.lambda_d = l1;
        auto d1 = node_delay(in, FormulaMode::Paper);
        in.lambda_d = l2;
        auto d2 = node_delay(in, FormulaMode::Paper);
        if (d1.stable && d2.stable) {
            REQUIRE(*d2.wait_c >= *d1.wait_c - 1e-15);
            REQUIRE(*d2.wait_d >= *d1.wait_d - 1e-15);
        } else if (!d1.stable) {
            REQUIRE(!d2.stable);  // instability is monotone in load
        }
    }
}

TEST_CASE("worst source latency bounds the average over random plans") {
    std::mt19937_64 rng(808);
    TrafficConfig traffic;
    int cases = 0;
    for (int rep = 0; rep < 600; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);
        for (const auto& plan : all_plans(topo, alloc, rng())) {
            auto ev = evaluate_plan(topo, plan, alloc, traffic, FormulaMode::Paper);
            if (!ev.latency.l_avg) continue;
            ++cases;
            REQUIRE(*ev.latency.l_max >= *ev.latency.l_avg - 1e-12);
            for (const auto& [src, v] : ev.latency.per_source)
                if (v) REQUIRE(*v <= *ev.latency.l_max + 1e-12);
        }
    }
    REQUIRE(cases >= 1000);
}

TEST_CASE("device allocation is total, capacity-safe and picks the nearest host") {
    std::mt19937_64 rng(909);
    for (int rep = 0; rep < 1000; ++rep) {
        auto topo = small_random(rng);
        auto alloc = allocate_devices(topo);

        REQUIRE(alloc.device_to_drone.size() == topo.devices.size());
        auto counts = alloc.counts();
        for (const auto& [dr, n] : counts) {
            REQUIRE_FALSE(topo.drone(dr).is_gateway());
            REQUIRE(n <= topo.drone(dr).capacity);
        }
        // capacities in these fixtures are ample, so nearest entry wins
        for (const auto& dev : topo.devices) {
            DroneId host = alloc.device_to_drone.at(dev.id);
            double hd = distance(dev.pos, topo.drone(host).pos);
            for (DroneId e : topo.non_gateway_ids())
                REQUIRE(hd <= distance(dev.pos, topo.drone(e).pos) + 1e-12);
        }
    }
}
