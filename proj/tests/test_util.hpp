#pragma once

// Shared fixture builders for the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "snaas/core.hpp"
#include "snaas/link_budget.hpp"

namespace testutil {

using namespace snaas;

inline Drone drone(DroneId id, Role role, double x, double y, double mu = 100.0,
                   int capacity = 1000) {
    Drone d;
    d.id = id;
    d.role = role;
    d.pos = {x, y};
    d.mu = mu;
    d.capacity = capacity;
    return d;
}

inline Device device(DeviceId id, double x, double y, double lambda) {
    Device v;
    v.id = id;
    v.pos = {x, y};
    v.lambda = lambda;
    return v;
}

// `entries` hosts at given xs along y=0, one device per entry directly under
// it, uniform per-device rate; gateways along y=50.
inline Topology line_topology(const std::vector<double>& entry_xs,
                              const std::vector<double>& gateway_xs, double mu,
                              double per_device_lambda, int devices_per_entry = 1) {
    Topology t;
    DroneId id = 0;
    DeviceId dev = 0;
    for (double x : entry_xs) {
        t.drones.push_back(drone(id++, Role::Entry, x, 0.0, mu));
        for (int i = 0; i < devices_per_entry; ++i)
            t.devices.push_back(device(dev++, x, 0.0, per_device_lambda));
    }
    for (double x : gateway_xs) t.drones.push_back(drone(id++, Role::Gateway, x, 50.0, mu));
    return t;
}

// Random scattered topology for property tests: n entries + g gateways over a
// square area, `devices` devices placed uniformly.
inline Topology random_topology(std::mt19937_64& rng, int entries, int gateways, int devices,
                                double per_device_lambda, double area = 100.0,
                                double mu = 100.0) {
    std::uniform_real_distribution<double> u(0.0, area);
    Topology t;
    DroneId id = 0;
    for (int i = 0; i < entries; ++i) t.drones.push_back(drone(id++, Role::Entry, u(rng), u(rng), mu));
    for (int i = 0; i < gateways; ++i)
        t.drones.push_back(drone(id++, Role::Gateway, u(rng), u(rng), mu));
    for (int i = 0; i < devices; ++i) t.devices.push_back(device(i, u(rng), u(rng), per_device_lambda));
    return t;
}

}  // namespace testutil
