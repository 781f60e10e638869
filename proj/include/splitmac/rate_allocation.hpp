#pragma once
// Min-max rate allocation over multiple-access capacity regions.
//
// This module works in per-Hz spectral terms: rates are bits/s/Hz and the
// returned latency is normalized (bits divided by bits/s/Hz, i.e. seconds x Hz).
// Dividing a normalized latency by the bandwidth in Hz yields seconds.
//
// For a group transmitting the same payload simultaneously, the latency-optimal
// allocation gives every member the equal rate R = payload / tau with
//   tau = payload * max_m  m / log2(1 + sum of the m smallest SNRs),
// because the binding boundary face for each subset size m is the one spanned
// by the weakest m members.  Only the L prefix subsets of the SNR-ascending
// ordering are evaluated; tests validate this shortcut against an all-subsets
// oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitmac {

struct DeviceGroup {
  std::vector<int> member_ids;
  std::vector<double> snrs;  // uplink SNRs, linear, aligned with member_ids

  std::size_t size() const { return member_ids.size(); }

  void validate() const {
    if (member_ids.empty())
      throw std::invalid_argument("DeviceGroup: group must be nonempty");
    if (member_ids.size() != snrs.size())
      throw std::invalid_argument("DeviceGroup: member_ids and snrs must align");
    for (double s : snrs)
      if (!(s > 0.0))
        throw std::domain_error("DeviceGroup: SNRs must be positive");
  }
};

struct RateAllocation {
  std::vector<double> rates_bits_per_hz;  // aligned with the group's members
  double latency_normalized = 0.0;        // seconds x Hz; divide by bandwidth for s
  int binding_prefix_size = 0;            // m achieving the max (smallest on ties)
};

// Membership test for the multiple-access capacity region: every nonempty
// subset S must satisfy  sum_{k in S} R_k <= log2(1 + sum_{k in S} SNR_k),
// checked with 1e-12 absolute slack for boundary points.
inline bool capacity_region_contains(const DeviceGroup& group,
                                     const std::vector<double>& rates) {
  group.validate();
  if (rates.size() != group.size())
    throw std::invalid_argument("capacity_region_contains: rates must align with group");
  const std::size_t n = group.size();
  if (n > 20)
    throw std::invalid_argument("capacity_region_contains: group too large for subset scan");
  for (double r : rates)
    if (!(r >= 0.0)) return false;
  const std::uint64_t full = (1ull << n) - 1ull;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    double rate_sum = 0.0, snr_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1ull << k)) {
        rate_sum += rates[k];
        snr_sum += group.snrs[k];
      }
    }
    if (rate_sum > std::log2(1.0 + snr_sum) + 1e-12) return false;
  }
  return true;
}

// Equal-rate optimum for a simultaneous group transmission; see header note.
inline RateAllocation min_latency_group(const DeviceGroup& group, double payload_bits) {
  group.validate();
  if (!(payload_bits > 0.0))
    throw std::domain_error("min_latency_group: payload must be positive");
  std::vector<double> ascending(group.snrs);
  std::sort(ascending.begin(), ascending.end());
  double best = -std::numeric_limits<double>::infinity();
  int binding = 0;
  double prefix = 0.0;
  for (std::size_t m = 1; m <= ascending.size(); ++m) {
    prefix += ascending[m - 1];
    const double tau = (static_cast<double>(m) * payload_bits) / std::log2(1.0 + prefix);
    if (tau > best) {
      best = tau;
      binding = static_cast<int>(m);
    }
  }
  RateAllocation alloc;
  alloc.latency_normalized = best;
  alloc.binding_prefix_size = binding;
  alloc.rates_bits_per_hz.assign(group.size(), payload_bits / best);
  return alloc;
}

// Closed-form per-Hz rates for a two-device group:
//   r_i = min{ log2(1 + s1 + s2) / 2, log2(1 + s_i) }.
inline std::pair<double, double> optimal_rates_pair(double snr1, double snr2) {
  if (!(snr1 > 0.0) || !(snr2 > 0.0))
    throw std::domain_error("optimal_rates_pair: SNRs must be positive");
  const double half_sum = std::log2(1.0 + (snr1 + snr2)) / 2.0;
  return {std::min(half_sum, std::log2(1.0 + snr1)),
          std::min(half_sum, std::log2(1.0 + snr2))};
}

// Two-device specialization of min_latency_group; written with identical
// floating expressions so the two agree bit-for-bit.
inline double min_latency_pair(double snr1, double snr2, double payload_bits) {
  if (!(snr1 > 0.0) || !(snr2 > 0.0))
    throw std::domain_error("min_latency_pair: SNRs must be positive");
  if (!(payload_bits > 0.0))
    throw std::domain_error("min_latency_pair: payload must be positive");
  const double weak = std::min(snr1, snr2);
  const double tau_sum = (2.0 * payload_bits) / std::log2(1.0 + (snr1 + snr2));
  const double tau_weak = (1.0 * payload_bits) / std::log2(1.0 + weak);
  return std::max(tau_sum, tau_weak);
}

// Test oracle: minimizes max(payload/R1, payload/R2) directly over the upper
// boundary of the two-device capacity region, with no knowledge of the closed
// form.  A uniform grid over R1 locates the global bracket; derivative-free
// ternary refinement polishes inside it (the objective is the max of a
// decreasing and a non-decreasing function of R1, hence unimodal).
inline double min_latency_pair_numeric(double snr1, double snr2, double payload_bits,
                                       int grid_n) {
  if (!(snr1 > 0.0) || !(snr2 > 0.0))
    throw std::domain_error("min_latency_pair_numeric: SNRs must be positive");
  if (!(payload_bits > 0.0))
    throw std::domain_error("min_latency_pair_numeric: payload must be positive");
  if (grid_n < 1000)
    throw std::invalid_argument("min_latency_pair_numeric: grid_n must be >= 1000");
  const double c1 = std::log2(1.0 + snr1);
  const double c2 = std::log2(1.0 + snr2);
  const double c12 = std::log2(1.0 + snr1 + snr2);
  const double hi = std::min(c1, c12);
  const auto objective = [&](double r1) {
    if (!(r1 > 0.0)) return std::numeric_limits<double>::infinity();
    const double r2 = std::min(c2, c12 - r1);
    if (!(r2 > 0.0)) return std::numeric_limits<double>::infinity();
    return std::max(payload_bits / r1, payload_bits / r2);
  };
  double best = std::numeric_limits<double>::infinity();
  int best_i = 1;
  for (int i = 1; i <= grid_n; ++i) {
    const double value = objective(hi * static_cast<double>(i) / grid_n);
    if (value < best) {
      best = value;
      best_i = i;
    }
  }
  double lo_r = hi * static_cast<double>(std::max(best_i - 1, 1)) / grid_n;
  double hi_r = hi * static_cast<double>(std::min(best_i + 1, grid_n)) / grid_n;
  for (int iter = 0; iter < 200; ++iter) {
    const double m1 = lo_r + (hi_r - lo_r) / 3.0;
    const double m2 = hi_r - (hi_r - lo_r) / 3.0;
    if (objective(m1) < objective(m2))
      hi_r = m2;
    else
      lo_r = m1;
  }
  return std::min(best, objective((lo_r + hi_r) / 2.0));
}

}  // namespace splitmac
