#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "snaas/composition.hpp"
#include "test_util.hpp"

using namespace snaas;
using Catch::Approx;
using testutil::device;
using testutil::drone;

TEST_CASE("weighted cost normalizes both terms over the candidate set") {
    // candidates: (dist 10, load 0.8) and (dist 90, load 0.2) at alpha = 0.5
    auto s = weighted_cost_scores({10, 90}, {0.8, 0.2}, {0.5, true});
    CHECK(s[0] == Approx(0.5));
    CHECK(s[1] == Approx(0.5));  // exact tie; callers resolve to the lower id

    auto s1 = weighted_cost_scores({10, 90}, {0.8, 0.2}, {1.0, true});
    CHECK(s1[0] == Approx(0.0));
    CHECK(s1[1] == Approx(1.0));

    auto s0 = weighted_cost_scores({10, 90}, {0.8, 0.2}, {0.0, true});
    CHECK(s0[0] == Approx(1.0));
    CHECK(s0[1] == Approx(0.0));
}

TEST_CASE("zero-spread terms contribute nothing under normalization") {
    auto s = weighted_cost_scores({5, 5}, {0.1, 0.9}, {0.5, true});
    CHECK(s[0] == Approx(0.0));
    CHECK(s[1] == Approx(0.5));
}

TEST_CASE("raw mode skips normalization") {
    auto s = weighted_cost_scores({10, 90}, {0.8, 0.2}, {0.5, false});
    CHECK(s[0] == Approx(5.4));
    CHECK(s[1] == Approx(45.1));
}

TEST_CASE("cluster and path counts follow max(|G|, ceil(demand))") {
    CHECK(cluster_count(100, 0.2, 4.0, 3) == 5);  // ceil(5.0) must stay 5
    CHECK(cluster_count(10, 0.1, 5.0, 3) == 3);
    CHECK(cluster_count(0, 0.0, 5.0, 4) == 4);
    CHECK(path_count(40, 0.5, 10.0, 10) == 10);
    CHECK(path_count(40, 0.5, 1e12, 2) == 2);  // huge mu: gateway floor
    CHECK_THROWS_AS(cluster_count(10, 1.0, 0.0, 2), std::invalid_argument);
}

TEST_CASE("kmeans recovers two separated blobs exactly") {
    std::vector<Vec2> pts;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 20; ++i) pts.push_back({n(rng), n(rng)});
    for (int i = 0; i < 20; ++i) pts.push_back({100 + n(rng), 100 + n(rng)});
    auto km = kmeans(pts, 2, 17);
    REQUIRE(km.assignment.size() == 40);
    int first = km.assignment[0];
    for (int i = 0; i < 20; ++i) CHECK(km.assignment[i] == first);
    for (int i = 20; i < 40; ++i) CHECK(km.assignment[i] == 1 - first);
}

TEST_CASE("kmeans is deterministic per seed and validates k") {
    std::vector<Vec2> pts;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 100);
    for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
    auto a = kmeans(pts, 5, 42);
    auto b = kmeans(pts, 5, 42);
    CHECK(a.assignment == b.assignment);
    CHECK_THROWS_AS(kmeans(pts, 31, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(pts, 0, 1), std::invalid_argument);
}

TEST_CASE("kmeans repairs empty clusters deterministically") {
    // 3 distinct locations, k=3, many duplicate points
    std::vector<Vec2> pts = {{0, 0}, {0, 0}, {0, 0}, {50, 0}, {50, 0}, {100, 0}};
    auto km = kmeans(pts, 3, 9);
    std::set<int> used(km.assignment.begin(), km.assignment.end());
    CHECK(used.size() == 3);  // no empty cluster survives
}

TEST_CASE("direct composition is one hop and fills every non-gateway drone") {
    Topology t = testutil::line_topology({0, 10, 20, 30}, {5, 25}, 100, 2.0);
    auto a = allocate_devices(t);
    auto plan = compose_direct(t, a, {0.5, true});
    CHECK(plan.strategy == Strategy::Direct);
    CHECK(plan.paths.size() == 4);
    for (const auto& p : plan.paths) {
        CHECK(p.size() == 2);
        CHECK(t.drone(p.back()).is_gateway());
    }
    for (DroneId id : t.non_gateway_ids()) CHECK(plan.forward.count(id) == 1);
}

TEST_CASE("direct composition at alpha=1 is nearest-gateway assignment") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 300; ++iter) {
        auto t = testutil::random_topology(rng, 6, 3, 12, 1.0);
        for (auto& d : t.drones) d.capacity = 12;
        auto a = allocate_devices(t);
        auto plan = compose_direct(t, a, {1.0, true});
        for (DroneId d : t.non_gateway_ids()) {
            DroneId nearest = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (DroneId g : t.gateway_ids()) {
                double dd = distance(t.drone(d).pos, t.drone(g).pos);
                if (dd < bd) {
                    bd = dd;
                    nearest = g;
                }
            }
            CHECK(plan.forward.at(d) == nearest);
        }
    }
}

TEST_CASE("direct composition at alpha=0 balances load as assignments accumulate") {
    // two gateways equidistant from both entries; entries carry equal demand
    Topology t;
    t.drones.push_back(drone(0, Role::Entry, 50, 10, 100));
    t.drones.push_back(drone(1, Role::Entry, 50, 20, 100));
    t.drones.push_back(drone(2, Role::Gateway, 0, 0, 100));
    t.drones.push_back(drone(3, Role::Gateway, 100, 0, 100));
    t.devices.push_back(device(0, 50, 10, 5.0));
    t.devices.push_back(device(1, 50, 20, 5.0));
    auto a = allocate_devices(t);
    auto plan = compose_direct(t, a, {0.0, true});
    // first entry ties -> lowest gateway id; second avoids the loaded one
    CHECK(plan.forward.at(0) == 2);
    CHECK(plan.forward.at(1) == 3);
}

TEST_CASE("clustered composition: members at two hops, heads at one") {
    Topology t = testutil::line_topology({0, 5, 10, 60, 65, 70}, {20, 80}, 100, 1.0, 2);
    auto a = allocate_devices(t);
    auto plan = compose_clustered(t, a, {0.5, true}, 7);
    CHECK(plan.strategy == Strategy::Clustered);
    CHECK(plan.k == (int)plan.cluster_heads.size());
    for (DroneId head : plan.cluster_heads) {
        auto r = plan.route_from(head);
        CHECK(r.size() == 2);  // head -> gateway
        CHECK(t.drone(r.back()).is_gateway());
    }
    for (DroneId id : t.non_gateway_ids()) {
        auto r = plan.route_from(id);
        CHECK(r.size() <= 3);  // member -> head -> gateway
        CHECK(t.drone(r.back()).is_gateway());
    }
}

TEST_CASE("clustered composition rejects demand beyond the drone supply") {
    // demand forces k = ceil(4 * 80 / 100) = 4 > 2 non-gateway drones
    Topology t = testutil::line_topology({0, 10}, {50}, 100, 80.0, 2);
    auto a = allocate_devices(t);
    CHECK_THROWS_AS(compose_clustered(t, a, {0.5, true}, 1), TooFewDronesError);
}

TEST_CASE("parallel composition: disjoint chains covering all drones, exactly k paths") {
    Topology t = testutil::line_topology({0, 10, 20, 30, 40, 50, 60, 70}, {15, 55}, 100, 3.0, 2);
    auto a = allocate_devices(t);
    auto plan = compose_parallel(t, a, {0.5, true});
    CHECK(plan.strategy == Strategy::Parallel);
    int expected_k = path_count((int)t.devices.size(), 3.0, 100.0, 2);
    CHECK((int)plan.paths.size() == expected_k);
    CHECK(plan.k == expected_k);

    std::set<DroneId> seen;
    for (const auto& p : plan.paths) {
        REQUIRE(p.size() >= 2);
        CHECK(t.drone(p.back()).is_gateway());
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            CHECK_FALSE(t.drone(p[i]).is_gateway());
            CHECK(seen.insert(p[i]).second);  // vertex-disjoint
        }
    }
    for (DroneId id : t.non_gateway_ids()) CHECK(seen.count(id) == 1);
}

TEST_CASE("compositions are deterministic") {
    std::mt19937_64 rng(31);
    auto t = testutil::random_topology(rng, 9, 3, 30, 2.0);
    for (auto& d : t.drones) d.capacity = 30;
    auto a = allocate_devices(t);
    for (int rep = 0; rep < 3; ++rep) {
        auto d1 = compose_direct(t, a, {0.5, true});
        auto d2 = compose_direct(t, a, {0.5, true});
        CHECK(d1.forward == d2.forward);
        auto c1 = compose_clustered(t, a, {0.5, true}, 11);
        auto c2 = compose_clustered(t, a, {0.5, true}, 11);
        CHECK(c1.forward == c2.forward);
        CHECK(c1.cluster_heads == c2.cluster_heads);
        auto p1 = compose_parallel(t, a, {0.5, true});
        auto p2 = compose_parallel(t, a, {0.5, true});
        CHECK(p1.forward == p2.forward);
        CHECK(p1.paths == p2.paths);
    }
}

TEST_CASE("route_from detects forwarding cycles") {
    CompositionPlan plan;
    plan.forward = {{0, 1}, {1, 0}};
    CHECK_THROWS_AS(plan.route_from(0), std::logic_error);
}
