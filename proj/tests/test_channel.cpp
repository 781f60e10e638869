#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "splitmac/channel.hpp"
#include "splitmac/rng.hpp"

using namespace splitmac;

TEST_CASE("path loss matches the per-direction log-distance laws") {
  CHECK(path_loss_db(0.1, Direction::uplink) == Catch::Approx(97.0).epsilon(1e-12));
  CHECK(path_loss_db(0.1, Direction::downlink) == Catch::Approx(90.5).epsilon(1e-12));
  CHECK(path_loss_db(1.0, Direction::uplink) == 127.0);
  CHECK(path_loss_db(1.0, Direction::downlink) == Catch::Approx(128.1));
  // Distance doubling adds a fixed decade fraction per direction.
  CHECK(path_loss_db(0.2, Direction::uplink) - path_loss_db(0.1, Direction::uplink) ==
        Catch::Approx(30.0 * std::log10(2.0)));
  CHECK(path_loss_db(0.2, Direction::downlink) -
            path_loss_db(0.1, Direction::downlink) ==
        Catch::Approx(37.6 * std::log10(2.0)));
}

TEST_CASE("path loss rejects non-positive distances") {
  CHECK_THROWS_AS(path_loss_db(0.0, Direction::uplink), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-1.0, Direction::downlink), std::domain_error);
}

TEST_CASE("link budget produces the expected linear SNRs") {
  // 30 dBm over 97 dB loss, -174 dBm/Hz noise density on 20 MHz.
  CHECK(snr_from_link_budget(30.0, 97.0, 0.0, -174.0, 20.0e6) ==
        Catch::Approx(2505.936168136362).epsilon(1e-12));
  // 42 dBm over 90.5 dB loss on the same band.
  CHECK(snr_from_link_budget(42.0, 90.5, 0.0, -174.0, 20.0e6) ==
        Catch::Approx(177406.69461678763).epsilon(1e-12));
  // 10 dB of shadowing costs exactly a factor 10.
  CHECK(snr_from_link_budget(30.0, 97.0, 10.0, -174.0, 20.0e6) ==
        Catch::Approx(250.5936168136362).epsilon(1e-12));
}

TEST_CASE("link budget rejects a non-positive bandwidth") {
  CHECK_THROWS_AS(snr_from_link_budget(30.0, 97.0, 0.0, -174.0, 0.0),
                  std::domain_error);
}

TEST_CASE("rate follows the log2 capacity form") {
  CHECK(rate_bps(1.0, 1.0) == 1.0);
  CHECK(rate_bps(3.0, 1.0) == 2.0);
  CHECK(rate_bps(0.5, 2.0) == Catch::Approx(1.1699250014423124).epsilon(1e-15));
  CHECK(rate_bps(1.0, 20.0e6) == 20.0e6);
  CHECK_THROWS_AS(rate_bps(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(rate_bps(1.0, 0.0), std::domain_error);
}

TEST_CASE("device placement is sorted, renumbered, and deterministic") {
  const RadioParams params;
  const auto devices = place_devices(50, params, 1234);
  REQUIRE(devices.size() == 50);
  for (int i = 0; i < 50; ++i) {
    const DeviceChannel& dev = devices[static_cast<std::size_t>(i)];
    CHECK(dev.device_id == i);
    CHECK(dev.distance_km >= params.cell_radius_min_km);
    CHECK(dev.distance_km < params.cell_radius_max_km);
    CHECK(dev.snr_ul_linear > 0.0);
    CHECK(dev.snr_dl_linear > 0.0);
    CHECK(dev.cpu_hz == 1.0e9);
    if (i > 0)
      CHECK(devices[static_cast<std::size_t>(i - 1)].snr_ul_linear <=
            dev.snr_ul_linear);
  }
  const auto again = place_devices(50, params, 1234);
  for (int i = 0; i < 50; ++i) {
    CHECK(again[static_cast<std::size_t>(i)].snr_ul_linear ==
          devices[static_cast<std::size_t>(i)].snr_ul_linear);
    CHECK(again[static_cast<std::size_t>(i)].distance_km ==
          devices[static_cast<std::size_t>(i)].distance_km);
  }
  const auto other = place_devices(50, params, 1235);
  bool any_different = false;
  for (int i = 0; i < 50; ++i)
    any_different = any_different || other[static_cast<std::size_t>(i)].distance_km !=
                                         devices[static_cast<std::size_t>(i)].distance_km;
  CHECK(any_different);
}

TEST_CASE("device placement rejects bad arguments") {
  const RadioParams params;
  CHECK_THROWS_AS(place_devices(0, params, 1), std::invalid_argument);
  CHECK_THROWS_AS(place_devices(-3, params, 1), std::invalid_argument);
  CHECK_THROWS_AS(place_devices(4, params, 1, 0.0), std::invalid_argument);
}

TEST_CASE("device CPU capability is configurable") {
  const RadioParams params;
  const auto devices = place_devices(5, params, 9, 2.5e9);
  for (const DeviceChannel& dev : devices) CHECK(dev.cpu_hz == 2.5e9);
}

TEST_CASE("placement follows the documented draw order exactly") {
  // Per device, in stream order: distance, uplink shadowing, downlink
  // shadowing; then a stable sort by uplink SNR and renumbering.
  const RadioParams params;
  const std::uint64_t seed = 20240817;
  const int n = 16;
  Rng mirror(seed);
  std::vector<DeviceChannel> expected(static_cast<std::size_t>(n));
  for (auto& dev : expected) {
    dev.distance_km =
        mirror.uniform(params.cell_radius_min_km, params.cell_radius_max_km);
    const double shadow_ul = mirror.normal(0.0, params.shadowing_sigma_db);
    const double shadow_dl = mirror.normal(0.0, params.shadowing_sigma_db);
    dev.snr_ul_linear = snr_from_link_budget(
        params.uplink_tx_power_dbm, path_loss_db(dev.distance_km, Direction::uplink),
        shadow_ul, params.noise_psd_dbm_hz, params.bandwidth_ul_hz);
    dev.snr_dl_linear = snr_from_link_budget(
        params.downlink_tx_power_dbm,
        path_loss_db(dev.distance_km, Direction::downlink), shadow_dl,
        params.noise_psd_dbm_hz, params.bandwidth_dl_hz);
    dev.cpu_hz = 1.0e9;
  }
  std::stable_sort(expected.begin(), expected.end(),
                   [](const DeviceChannel& a, const DeviceChannel& b) {
                     return a.snr_ul_linear < b.snr_ul_linear;
                   });
  const auto actual = place_devices(n, params, seed);
  REQUIRE(actual.size() == expected.size());
  for (int i = 0; i < n; ++i) {
    CHECK(actual[static_cast<std::size_t>(i)].device_id == i);
    CHECK(actual[static_cast<std::size_t>(i)].distance_km ==
          expected[static_cast<std::size_t>(i)].distance_km);
    CHECK(actual[static_cast<std::size_t>(i)].snr_ul_linear ==
          expected[static_cast<std::size_t>(i)].snr_ul_linear);
    CHECK(actual[static_cast<std::size_t>(i)].snr_dl_linear ==
          expected[static_cast<std::size_t>(i)].snr_dl_linear);
  }
}

TEST_CASE("shadowing realizations have the configured spread") {
  const RadioParams params;
  const int n = 20000;
  const auto devices = place_devices(n, params, 5);
  const double noise_total_db =
      params.noise_psd_dbm_hz + 10.0 * std::log10(params.bandwidth_ul_hz);
  std::vector<double> shadows_ul, shadows_dl;
  for (const DeviceChannel& dev : devices) {
    const double snr_ul_db = 10.0 * std::log10(dev.snr_ul_linear);
    shadows_ul.push_back(params.uplink_tx_power_dbm -
                         path_loss_db(dev.distance_km, Direction::uplink) -
                         noise_total_db - snr_ul_db);
    const double noise_dl_db =
        params.noise_psd_dbm_hz + 10.0 * std::log10(params.bandwidth_dl_hz);
    const double snr_dl_db = 10.0 * std::log10(dev.snr_dl_linear);
    shadows_dl.push_back(params.downlink_tx_power_dbm -
                         path_loss_db(dev.distance_km, Direction::downlink) -
                         noise_dl_db - snr_dl_db);
  }
  const auto moments = [](const std::vector<double>& xs) {
    double sum = 0.0, sum_sq = 0.0;
    for (double x : xs) {
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    return std::pair<double, double>(
        mean, std::sqrt(sum_sq / static_cast<double>(xs.size()) - mean * mean));
  };
  const auto [mean_ul, std_ul] = moments(shadows_ul);
  const auto [mean_dl, std_dl] = moments(shadows_dl);
  CHECK(std::abs(mean_ul) < 0.15);
  CHECK(std::abs(mean_dl) < 0.15);
  CHECK(std_ul == Catch::Approx(params.shadowing_sigma_db).epsilon(0.05));
  CHECK(std_dl == Catch::Approx(params.shadowing_sigma_db).epsilon(0.05));
  // The two directions draw independent shadowing terms.
  double cov = 0.0;
  for (std::size_t i = 0; i < shadows_ul.size(); ++i)
    cov += (shadows_ul[i] - mean_ul) * (shadows_dl[i] - mean_dl);
  cov /= static_cast<double>(shadows_ul.size());
  CHECK(std::abs(cov / (std_ul * std_dl)) < 0.05);
}

TEST_CASE("radio parameter validation rejects broken setups") {
  RadioParams params;
  params.bandwidth_ul_hz = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = RadioParams{};
  params.cell_radius_min_km = 0.6;  // above the max
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = RadioParams{};
  params.shadowing_sigma_db = -1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  CHECK_NOTHROW(RadioParams{}.validate());
}
