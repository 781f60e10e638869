#pragma once
// Radio geometry, link budgets, and per-device SNR generation.
//
// Distances are in kilometers, powers in dBm, bandwidths in Hz, SNRs linear.
// path_loss_db uses direction-specific urban macro models:
//   uplink   127.0 + 30.0 * log10(d_km)
//   downlink 128.1 + 37.6 * log10(d_km)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitmac/rng.hpp"

namespace splitmac {

enum class Direction { uplink, downlink };

struct RadioParams {
  double uplink_tx_power_dbm = 30.0;
  double downlink_tx_power_dbm = 42.0;
  double bandwidth_ul_hz = 20.0e6;
  double bandwidth_dl_hz = 20.0e6;
  double noise_psd_dbm_hz = -174.0;
  double shadowing_sigma_db = 4.0;
  double cell_radius_min_km = 0.01;
  double cell_radius_max_km = 0.5;

  void validate() const {
    if (!(bandwidth_ul_hz > 0.0) || !(bandwidth_dl_hz > 0.0))
      throw std::invalid_argument("RadioParams: bandwidths must be positive");
    if (!(shadowing_sigma_db >= 0.0))
      throw std::invalid_argument("RadioParams: shadowing sigma must be >= 0");
    if (!(cell_radius_min_km > 0.0) || !(cell_radius_max_km >= cell_radius_min_km))
      throw std::invalid_argument("RadioParams: need 0 < radius_min <= radius_max");
  }
};

struct DeviceChannel {
  int device_id = 0;
  double distance_km = 0.0;
  double snr_ul_linear = 0.0;
  double snr_dl_linear = 0.0;
  double cpu_hz = 0.0;
};

inline double path_loss_db(double distance_km, Direction direction) {
  if (!(distance_km > 0.0))
    throw std::domain_error("path_loss_db: distance must be positive, got " +
                            std::to_string(distance_km));
  return direction == Direction::uplink
             ? 127.0 + 30.0 * std::log10(distance_km)
             : 128.1 + 37.6 * std::log10(distance_km);
}

inline double snr_from_link_budget(double tx_power_dbm, double path_loss_db,
                                   double shadowing_db, double noise_psd_dbm_hz,
                                   double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::domain_error("snr_from_link_budget: bandwidth must be positive");
  const double noise_dbm = noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  const double snr_db = tx_power_dbm - path_loss_db - shadowing_db - noise_dbm;
  return std::pow(10.0, snr_db / 10.0);
}

// Shannon rate of a single link occupying the full band.
inline double rate_bps(double snr_linear, double bandwidth_hz) {
  if (!(snr_linear >= 0.0))
    throw std::domain_error("rate_bps: SNR must be >= 0");
  if (!(bandwidth_hz >= 0.0))
    throw std::domain_error("rate_bps: bandwidth must be >= 0");
  return bandwidth_hz * std::log2(1.0 + snr_linear);
}

// Draws n devices and computes their SNRs from the link budget.
//
// Stream layout (one Rng seeded with `seed`): for each device in draw order,
// distance ~ U[radius_min, radius_max], then uplink shadowing ~ N(0, sigma),
// then downlink shadowing ~ N(0, sigma) — uplink and downlink shadowing are
// independent.  Devices are then sorted by uplink SNR (stable, so ties keep
// draw order) and re-numbered 0..n-1 ascending.
inline std::vector<DeviceChannel> place_devices(int n, const RadioParams& params,
                                                std::uint64_t seed,
                                                double device_cpu_hz = 1.0e9) {
  if (n <= 0) throw std::invalid_argument("place_devices: n must be positive");
  if (!(device_cpu_hz > 0.0))
    throw std::invalid_argument("place_devices: device_cpu_hz must be positive");
  params.validate();
  Rng rng(seed);
  std::vector<DeviceChannel> devices(static_cast<std::size_t>(n));
  for (auto& dev : devices) {
    dev.distance_km = rng.uniform(params.cell_radius_min_km, params.cell_radius_max_km);
    const double shadow_ul = rng.normal(0.0, params.shadowing_sigma_db);
    const double shadow_dl = rng.normal(0.0, params.shadowing_sigma_db);
    dev.snr_ul_linear = snr_from_link_budget(
        params.uplink_tx_power_dbm, path_loss_db(dev.distance_km, Direction::uplink),
        shadow_ul, params.noise_psd_dbm_hz, params.bandwidth_ul_hz);
    dev.snr_dl_linear = snr_from_link_budget(
        params.downlink_tx_power_dbm, path_loss_db(dev.distance_km, Direction::downlink),
        shadow_dl, params.noise_psd_dbm_hz, params.bandwidth_dl_hz);
    dev.cpu_hz = device_cpu_hz;
  }
  std::stable_sort(devices.begin(), devices.end(),
                   [](const DeviceChannel& a, const DeviceChannel& b) {
                     return a.snr_ul_linear < b.snr_ul_linear;
                   });
  for (int i = 0; i < n; ++i) devices[static_cast<std::size_t>(i)].device_id = i;
  return devices;
}

}  // namespace splitmac
