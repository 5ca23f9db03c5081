#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "snaas/errors.hpp"

namespace snaas {

using DroneId = int;
using DeviceId = int;

enum class Role { Entry, Relay, Gateway };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::Entry: return "entry";
        case Role::Relay: return "relay";
        case Role::Gateway: return "gateway";
    }
    return "?";
}

inline Role role_from_string(const std::string& s) {
    if (s == "entry") return Role::Entry;
    if (s == "relay") return Role::Relay;
    if (s == "gateway") return Role::Gateway;
    throw std::invalid_argument("unknown role: " + s);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// An aerial node. `mu` is the data-packet service rate (packets/s) of its
// transmit queue; `capacity` is the max number of directly served devices.
struct Drone {
    DroneId id = 0;
    Role role = Role::Entry;
    Vec2 pos;
    double altitude = 40.0;
    double mu = 0.0;
    int capacity = 0;

    bool is_gateway() const { return role == Role::Gateway; }
};

// A ground device producing data packets at Poisson rate `lambda` (packets/s).
struct Device {
    DeviceId id = 0;
    Vec2 pos;
    double lambda = 0.0;
};

struct Topology {
    std::vector<Drone> drones;
    std::vector<Device> devices;

    const Drone& drone(DroneId id) const {
        for (const auto& d : drones)
            if (d.id == id) return d;
        throw UnknownDroneError("no drone with id " + std::to_string(id));
    }

    bool has_drone(DroneId id) const {
        return std::any_of(drones.begin(), drones.end(),
                           [&](const Drone& d) { return d.id == id; });
    }

    std::vector<DroneId> gateway_ids() const {
        std::vector<DroneId> out;
        for (const auto& d : drones)
            if (d.is_gateway()) out.push_back(d.id);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<DroneId> non_gateway_ids() const {
        std::vector<DroneId> out;
        for (const auto& d : drones)
            if (!d.is_gateway()) out.push_back(d.id);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Duplicate ids would silently corrupt every id-keyed map downstream.
    void validate() const {
        std::set<DroneId> dr;
        for (const auto& d : drones)
            if (!dr.insert(d.id).second)
                throw std::invalid_argument("duplicate drone id " + std::to_string(d.id));
        std::set<DeviceId> dv;
        for (const auto& d : devices)
            if (!dv.insert(d.id).second)
                throw std::invalid_argument("duplicate device id " + std::to_string(d.id));
    }
};

// Device -> serving drone map.
struct Allocation {
    std::map<DeviceId, DroneId> device_to_drone;

    std::map<DroneId, int> counts() const {
        std::map<DroneId, int> c;
        for (const auto& [dev, dr] : device_to_drone) c[dr]++;
        return c;
    }

    // Aggregate data arrival rate entering each drone from its own devices.
    std::map<DroneId, double> offered_rate(const Topology& topo) const {
        std::map<DroneId, double> r;
        for (const auto& dev : topo.devices) {
            auto it = device_to_drone.find(dev.id);
            if (it != device_to_drone.end()) r[it->second] += dev.lambda;
        }
        return r;
    }
};

struct AllocationOptions {
    // Maximum device->drone distance; unset means unbounded.
    std::optional<double> max_range;
};

// Nearest non-gateway drone with spare slot capacity, devices processed in
// ascending id order; distance ties go to the lowest drone id.
inline Allocation allocate_devices(const Topology& topo, const AllocationOptions& opts = {}) {
    topo.validate();
    std::vector<const Drone*> hosts;
    for (const auto& d : topo.drones)
        if (!d.is_gateway()) hosts.push_back(&d);
    std::sort(hosts.begin(), hosts.end(),
              [](const Drone* a, const Drone* b) { return a->id < b->id; });
    if (hosts.empty() && !topo.devices.empty())
        throw InsufficientCapacityError("no non-gateway drones available for device allocation");

    std::vector<Device> devs = topo.devices;
    std::sort(devs.begin(), devs.end(),
              [](const Device& a, const Device& b) { return a.id < b.id; });

    Allocation alloc;
    std::map<DroneId, int> used;
    for (const auto& dev : devs) {
        const Drone* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const Drone* h : hosts) {
            if (used[h->id] >= h->capacity) continue;
            double d = distance(dev.pos, h->pos);
            if (opts.max_range && d > *opts.max_range) continue;
            if (d < best_d) {  // strict '<' keeps the lowest-id drone on ties
                best_d = d;
                best = h;
            }
        }
        if (!best)
            throw InsufficientCapacityError("device " + std::to_string(dev.id) +
                                            " cannot be allocated: no drone with spare capacity" +
                                            (opts.max_range ? " in range" : ""));
        alloc.device_to_drone[dev.id] = best->id;
        used[best->id]++;
    }
    return alloc;
}

// ---- service descriptors & registry ----

// One drone's advertised service: who it serves and where it forwards.
struct AtomicService {
    DroneId drone = 0;
    Role role = Role::Entry;
    std::vector<DeviceId> served_devices;          // sorted
    std::vector<DroneId> forwards_to;              // sorted successor drones
    double mu = 0.0;
    double offered_load = 0.0;                     // data arrival rate (packets/s)
    bool gateway_reachable = false;

    bool operator==(const AtomicService&) const = default;
};

struct CompositeService {
    std::vector<AtomicService> services;           // sorted by drone id
};

struct DeviceValidity {
    bool reachable = false;
    std::optional<int> hops_to_gateway;            // entry drone -> gateway hop count
};

struct ValidityReport {
    bool valid = false;
    std::map<DeviceId, DeviceValidity> per_device;
};

// Every allocated device must have an acyclic relay path ending at a gateway.
inline ValidityReport validate_composite(const CompositeService& comp, const Topology& topo,
                                         const Allocation& alloc) {
    ValidityReport report;
    std::map<DroneId, const AtomicService*> by_drone;
    for (const auto& s : comp.services) by_drone[s.drone] = &s;

    report.valid = true;
    for (const auto& dev : topo.devices) {
        DeviceValidity v;
        auto it = alloc.device_to_drone.find(dev.id);
        if (it != alloc.device_to_drone.end()) {
            DroneId cur = it->second;
            int hops = 0;
            std::set<DroneId> seen;
            while (true) {
                if (!seen.insert(cur).second) break;  // cycle: unreachable
                auto sit = by_drone.find(cur);
                if (sit == by_drone.end()) break;
                if (sit->second->role == Role::Gateway) {
                    v.reachable = true;
                    v.hops_to_gateway = hops;
                    break;
                }
                if (sit->second->forwards_to.empty()) break;
                cur = sit->second->forwards_to.front();
                hops++;
            }
        }
        if (!v.reachable) report.valid = false;
        report.per_device[dev.id] = v;
    }
    return report;
}

struct RegistryQuery {
    std::optional<Role> role;
    std::optional<bool> gateway_reachable;
};

// In-memory service catalog; publish overwrites by drone id.
class ServiceRegistry {
  public:
    void publish(const AtomicService& svc) { catalog_[svc.drone] = svc; }

    std::optional<AtomicService> lookup(DroneId id) const {
        auto it = catalog_.find(id);
        if (it == catalog_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<AtomicService> discover(const RegistryQuery& q = {}) const {
        std::vector<AtomicService> out;
        for (const auto& [id, svc] : catalog_) {
            if (q.role && svc.role != *q.role) continue;
            if (q.gateway_reachable && svc.gateway_reachable != *q.gateway_reachable) continue;
            out.push_back(svc);
        }
        return out;  // map iteration order == ascending drone id
    }

    std::size_t size() const { return catalog_.size(); }

  private:
    std::map<DroneId, AtomicService> catalog_;
};

}  // namespace snaas
