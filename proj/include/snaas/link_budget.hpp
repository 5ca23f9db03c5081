#pragma once

#include <cmath>
#include <map>
#include <stdexcept>

#include "snaas/errors.hpp"

namespace snaas {

// Radio/link parameters shared by all drones of a deployment. Drones are
// homogeneous: one altitude-bandwidth configuration yields one service rate.
struct LinkBudget {
    double tx_power_dbm = 20.0;
    double carrier_ghz = 3.3;
    double bandwidth_hz = 5e6;
    double noise_figure_db = 7.0;
    double phy_efficiency = 0.6;          // fraction of Shannon capacity achieved
    double data_packet_bits = 8192.0;     // 1 KiB payload frames
    double control_packet_bits = 256.0;   // 32 B control frames
    // Synthetic measured-RSS surrogate: mean received signal strength (dBm)
    // keyed by altitude (m). Queried altitude must be present.
    std::map<double, double> mean_rss_dbm = {{40.0, -70.0}, {70.0, -75.0}, {100.0, -80.0}};

    double rss_at(double altitude) const {
        auto it = mean_rss_dbm.find(altitude);
        if (it == mean_rss_dbm.end())
            throw std::invalid_argument("no RSS sample for altitude " + std::to_string(altitude));
        return it->second;
    }
};

// Thermal noise floor: N = -174 + 10*log10(B) + NF  (dBm).
inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

inline double snr_db(double rss_dbm, double noise_dbm) { return rss_dbm - noise_dbm; }

// Shannon-proxy service rate in packets/s:
//   mu = eta * B * log2(1 + 10^(SNR/10)) / packet_bits
inline double service_rate(double eta, double bandwidth_hz, double snr_db_value,
                           double packet_bits) {
    if (bandwidth_hz <= 0.0 || packet_bits <= 0.0 || eta <= 0.0)
        throw std::invalid_argument("eta, bandwidth and packet size must be positive");
    double snr_lin = std::pow(10.0, snr_db_value / 10.0);
    return eta * bandwidth_hz * std::log2(1.0 + snr_lin) / packet_bits;
}

// Convenience: data-packet service rate for a drone at `altitude`.
inline double service_rate_at(const LinkBudget& lb, double altitude) {
    double n = noise_power_dbm(lb.bandwidth_hz, lb.noise_figure_db);
    double snr = snr_db(lb.rss_at(altitude), n);
    return service_rate(lb.phy_efficiency, lb.bandwidth_hz, snr, lb.data_packet_bits);
}

// Max devices one drone can serve: C_d = floor(mu / lambda).
// The tiny epsilon keeps exact integer ratios from rounding down.
inline int device_capacity(double mu, double lambda) {
    if (lambda <= 0.0) throw ZeroDemandError("per-device arrival rate must be positive");
    if (mu <= 0.0) return 0;
    return static_cast<int>(std::floor(mu / lambda + 1e-9));
}

}  // namespace snaas
