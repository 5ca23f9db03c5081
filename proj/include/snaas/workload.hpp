#pragma once

// Scenario and request generation: swarm scales, uniform placement over a
// square service area, and per-bin request batches whose axis value (latency
// bound or device count) is perturbed ±10% around the bin nominal. All
// randomness is derived from explicit seeds so any bin replays exactly.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "snaas/link_budget.hpp"
#include "snaas/selection.hpp"

namespace snaas {

struct ScenarioScale {
    std::string name;
    int entry_drones = 0;
    int gateways = 0;
};

inline ScenarioScale small_scale() { return {"small", 10, 3}; }
inline ScenarioScale medium_scale() { return {"medium", 25, 5}; }
inline ScenarioScale large_scale() { return {"large", 100, 10}; }

inline ScenarioScale scale_from_string(const std::string& name) {
    if (name == "small") return small_scale();
    if (name == "medium") return medium_scale();
    if (name == "large") return large_scale();
    throw std::invalid_argument("unknown scale: " + name);
}

struct WorkloadConfig {
    double area = 100.0;     // side of the square service area, meters
    double altitude = 40.0;  // common hover altitude, meters
    // Per-device data rate. With the default link budget (mu ~= 3651 pkt/s)
    // and the small scale's 3 gateways, ~110 devices at 50 pkt/s put the
    // gateways near rho = 0.5 under direct composition.
    double per_device_lambda = 50.0;
    LinkBudget link;
};

// splitmix64 finalizer over (seed, index): cheap, well-mixed derived seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Drones only; devices arrive per request. Entries get ids [0, E), gateways
// [E, E+G). Homogeneous service rate from the link budget; capacity from
// C_d = mu / lambda.
inline Topology generate_topology(const ScenarioScale& scale, const WorkloadConfig& cfg,
                                  std::uint64_t seed) {
    if (cfg.area <= 0.0) throw std::invalid_argument("generate_topology: area must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, cfg.area);
    double mu = service_rate_at(cfg.link, cfg.altitude);
    int cap = device_capacity(mu, cfg.per_device_lambda);

    Topology topo;
    DroneId id = 0;
    auto add = [&](Role role) {
        Drone d;
        d.id = id++;
        d.role = role;
        double x = u(rng), y = u(rng);  // evaluation order of args is unspecified
        d.pos = {x, y};
        d.altitude = cfg.altitude;
        d.mu = mu;
        d.capacity = cap;
        topo.drones.push_back(d);
    };
    for (int i = 0; i < scale.entry_drones; ++i) add(Role::Entry);
    for (int i = 0; i < scale.gateways; ++i) add(Role::Gateway);
    return topo;
}

enum class BinAxis { SlaLatency, DeviceCount };

struct Request {
    int device_count = 0;
    double per_device_lambda = 0.0;
    SlaSpec sla;
    std::uint64_t seed = 0;  // drives topology + device placement
    double value = 0.0;      // the perturbed axis value this request realizes
};

struct RequestBin {
    double nominal = 0.0;
    BinAxis axis = BinAxis::DeviceCount;
    std::vector<Request> requests;
};

// Fixed (non-axis) request parameters.
struct RequestDefaults {
    int device_count = 110;
    double per_device_lambda = 50.0;
    SlaSpec sla;
};

inline RequestBin generate_requests(double nominal, BinAxis axis, const RequestDefaults& base,
                                    int count, double perturbation, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("generate_requests: count must be >= 1");
    if (perturbation < 0.0 || perturbation >= 1.0)
        throw std::invalid_argument("generate_requests: perturbation must be in [0, 1)");
    RequestBin bin;
    bin.nominal = nominal;
    bin.axis = axis;
    for (int i = 0; i < count; ++i) {
        std::uint64_t rseed = derive_seed(seed, static_cast<std::uint64_t>(i));
        std::mt19937_64 rng(rseed);
        double factor =
            std::uniform_real_distribution<double>(1.0 - perturbation, 1.0 + perturbation)(rng);
        Request req;
        req.device_count = base.device_count;
        req.per_device_lambda = base.per_device_lambda;
        req.sla = base.sla;
        req.seed = rseed;
        req.value = nominal * factor;
        if (axis == BinAxis::DeviceCount)
            req.device_count = static_cast<int>(std::lround(req.value));
        else
            req.sla.latency_bound = req.value;
        bin.requests.push_back(req);
    }
    return bin;
}

// Full per-request world: fresh drone positions and fresh device layout.
inline Topology materialize_request(const ScenarioScale& scale, const Request& req,
                                    const WorkloadConfig& cfg) {
    auto topo = generate_topology(scale, cfg, derive_seed(req.seed, 1));
    std::mt19937_64 rng(derive_seed(req.seed, 2));
    std::uniform_real_distribution<double> u(0.0, cfg.area);
    for (int i = 0; i < req.device_count; ++i) {
        Device dev;
        dev.id = i;
        double x = u(rng), y = u(rng);
        dev.pos = {x, y};
        dev.lambda = req.per_device_lambda;
        topo.devices.push_back(dev);
    }
    return topo;
}

}  // namespace snaas
