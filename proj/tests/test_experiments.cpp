#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "snaas/experiments.hpp"

using namespace snaas;

namespace {

// trimmed-down configs keep these suites fast; the full pinned defaults run
// in the acceptance binary
ExperimentConfig quick_config() {
    ExperimentConfig cfg;
    cfg.requests_per_bin = 10;
    cfg.seed = 7;
    cfg.workers = 2;
    cfg.exp1_sla_bins = {0.002, 0.005};
    cfg.exp2_device_bins = {160, 240};
    cfg.exp3_device_bins = {60, 180};
    cfg.exp4_device_bins = {60, 120, 720};
    cfg.exp4_reduced_large = true;
    return cfg;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

Provenance test_prov() { return Provenance{kToolVersion, 7, 0xabcdef}; }

}  // namespace

TEST_CASE("exp1 emits one row per bin and method with the documented header") {
    auto cfg = quick_config();
    auto r = run_exp1(cfg);

    REQUIRE(r.bins.size() == 2);
    for (const auto& b : r.bins) {
        REQUIRE(b.methods.size() == 3);
        CHECK(b.methods[0].method == "heuristic");
        CHECK(b.methods[1].method == "bf-direct");
        CHECK(b.methods[2].method == "bf-clustered");
        for (const auto& m : b.methods) {
            CHECK(m.violation_rate >= 0.0);
            CHECK(m.violation_rate <= 1.0);
            CHECK(m.mean_runtime_s > 0.0);
        }
    }

    std::ostringstream os;
    write_exp1_csv(os, r, test_prov());
    auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2 + 2 * 3);  // provenance + header + rows
    CHECK(lines[0].rfind("# snaas", 0) == 0);
    CHECK(lines[1] ==
          "sla_bin,method,violation_rate,mean_runtime_s,violation_se,runtime_se");
    CHECK(lines[2].find("heuristic") != std::string::npos);
}

TEST_CASE("exp1 results are deterministic for a fixed seed") {
    auto cfg = quick_config();
    auto a = run_exp1(cfg);
    auto b = run_exp1(cfg);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i)
        for (std::size_t m = 0; m < 3; ++m)
            CHECK(a.bins[i].methods[m].violation_rate ==
                  b.bins[i].methods[m].violation_rate);
}

TEST_CASE("exp2 covers the three fixed strategies plus the enforced pipeline") {
    auto cfg = quick_config();
    auto r = run_exp2(cfg);

    REQUIRE(r.bins.size() == 2);
    for (const auto& b : r.bins) {
        REQUIRE(b.methods.size() == 4);
        CHECK(b.methods[0].method == "direct");
        CHECK(b.methods[1].method == "clustered");
        CHECK(b.methods[2].method == "parallel");
        CHECK(b.methods[3].method == "enforced");
        for (const auto& m : b.methods) {
            CHECK(m.requests == cfg.requests_per_bin);
            CHECK(m.stable_requests <= m.requests);
            if (m.stable_requests > 0) {
                REQUIRE(m.mean_latency.has_value());
                CHECK(*m.mean_latency > 0.0);
            } else {
                CHECK(!m.mean_latency.has_value());
            }
        }
    }

    std::ostringstream os;
    write_exp2_csv(os, r, test_prov());
    auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2 + 2 * 4);
    CHECK(lines[1] ==
          "device_bin,method,stable_fraction,mean_latency_s,latency_se,stable_requests,"
          "requests");
}

TEST_CASE("exp2 results do not depend on the worker count") {
    auto cfg = quick_config();
    cfg.workers = 1;
    auto a = run_exp2(cfg);
    cfg.workers = 4;
    auto b = run_exp2(cfg);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i)
        for (std::size_t m = 0; m < 4; ++m) {
            CHECK(a.bins[i].methods[m].stable_fraction ==
                  b.bins[i].methods[m].stable_fraction);
            CHECK(a.bins[i].methods[m].mean_latency == b.bins[i].methods[m].mean_latency);
        }
}

TEST_CASE("exp3 strategy frequencies are normalized per bin") {
    auto cfg = quick_config();
    auto r = run_exp3(cfg);

    REQUIRE(r.bins.size() == 2);
    for (const auto& b : r.bins) {
        double total = b.direct_rate + b.clustered_rate + b.parallel_rate + b.none_rate;
        CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(b.direct_rate >= 0.0);
        CHECK(b.clustered_rate >= 0.0);
        CHECK(b.parallel_rate >= 0.0);
        CHECK(b.none_rate >= 0.0);
    }
    // light load resolves to the single-hop strategy
    CHECK(r.bins.front().direct_rate >= 0.5);

    std::ostringstream os;
    write_exp3_csv(os, r, test_prov());
    auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2 + 2);
    CHECK(lines[1] == "device_bin,direct_rate,clustered_rate,parallel_rate,none_rate");
}

TEST_CASE("exp4 skips bins beyond a scale's device capacity") {
    auto cfg = quick_config();
    auto r = run_exp4(cfg);

    std::vector<int> small_bins, medium_bins, large_bins;
    for (const auto& c : r.cells) {
        if (c.scale == "small") small_bins.push_back(c.device_count);
        if (c.scale == "medium") medium_bins.push_back(c.device_count);
        if (c.scale == "large") large_bins.push_back(c.device_count);
    }
    // 720 devices exceed the 10-entry small swarm's admission capacity
    CHECK(small_bins == std::vector<int>{60, 120});
    CHECK(medium_bins == std::vector<int>{60, 120, 720});
    CHECK(large_bins == std::vector<int>{60, 120, 720});

    std::ostringstream os;
    write_exp4_csv(os, r, test_prov());
    auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2 + r.cells.size());
    CHECK(lines[1] ==
          "scale,device_bin,stable_fraction,mean_latency_s,latency_se,stable_requests,"
          "requests");
}

TEST_CASE("trend helpers judge monotonicity and modality as documented") {
    CHECK(non_increasing({1.0, 0.8, 0.8, 0.2}, 0));
    CHECK(!non_increasing({1.0, 0.8, 0.9, 0.2}, 0));
    CHECK(non_increasing({1.0, 0.8, 0.9, 0.2}, 1));

    Exp3Result r;
    r.bins.push_back({40, 0.9, 0.05, 0.05, 0.0});
    r.bins.push_back({120, 0.3, 0.5, 0.2, 0.0});
    r.bins.push_back({200, 0.1, 0.2, 0.5, 0.2});
    auto c = check_exp3(r);
    CHECK(c.direct_dominates_low);
    CHECK(c.direct_fades_high);
    CHECK(c.parallel_rare_low);
    CHECK(c.parallel_modal_high);
    CHECK(c.clustered_modal_between);
    CHECK(c.all());
}
