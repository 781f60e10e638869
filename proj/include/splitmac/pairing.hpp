#pragma once
// Device pairing strategies for simultaneous uplink transmission.
//
// All pairing operations take the device SNR list in ascending order (the
// canonical device numbering) and return a GroupingPlan whose groups partition
// the ids 0..N-1 into pairs.  Pair members are stored weak-first; the group
// sequence is deterministic per algorithm and is also the order later used to
// assemble clusters.
//
// Deviation regimes (exact floating comparisons, no tolerance):
//   small: SNR_max <= (1 + SNR_min) * SNR_min      — pairing by extremes is optimal
//   large: SNR_{i+1} >= (1 + SNR_i) * SNR_i  (all consecutive i, ascending)
//                                                   — pairing neighbors is optimal

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitmac/rate_allocation.hpp"
#include "splitmac/rng.hpp"

namespace splitmac {

struct GroupingPlan {
  std::vector<DeviceGroup> groups;

  int total_devices() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return static_cast<int>(n);
  }
};

struct DeviationReport {
  bool small_deviation = false;
  bool large_deviation = false;
  double snr_min = 0.0;
  double snr_max = 0.0;
};

namespace detail {

inline void require_positive(const std::vector<double>& snrs, const char* who) {
  if (snrs.empty())
    throw std::invalid_argument(std::string(who) + ": SNR list must be nonempty");
  for (double s : snrs)
    if (!(s > 0.0))
      throw std::domain_error(std::string(who) + ": SNRs must be positive");
}

inline void require_ascending(const std::vector<double>& snrs, const char* who) {
  for (std::size_t i = 1; i < snrs.size(); ++i)
    if (snrs[i] < snrs[i - 1])
      throw std::invalid_argument(std::string(who) +
                                  ": SNRs must be in ascending order");
}

inline void require_even(const std::vector<double>& snrs, const char* who) {
  if (snrs.size() % 2 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": pairing needs an even device count, got " +
                                std::to_string(snrs.size()));
}

inline DeviceGroup make_pair_group(const std::vector<double>& snrs, int weak, int strong) {
  DeviceGroup g;
  g.member_ids = {weak, strong};
  g.snrs = {snrs[static_cast<std::size_t>(weak)], snrs[static_cast<std::size_t>(strong)]};
  return g;
}

}  // namespace detail

// Sum of the per-group min-max latencies (normalized units, see rate module).
inline double total_uplink_latency(const GroupingPlan& plan, double payload_bits) {
  if (plan.groups.empty())
    throw std::invalid_argument("total_uplink_latency: plan has no groups");
  double total = 0.0;
  for (const auto& g : plan.groups)
    total += min_latency_group(g, payload_bits).latency_normalized;
  return total;
}

inline bool small_deviation_holds(const std::vector<double>& snrs) {
  detail::require_positive(snrs, "small_deviation_holds");
  const auto [lo_it, hi_it] = std::minmax_element(snrs.begin(), snrs.end());
  return *hi_it <= (1.0 + *lo_it) * *lo_it;
}

inline bool large_deviation_holds(const std::vector<double>& snrs_sorted) {
  detail::require_positive(snrs_sorted, "large_deviation_holds");
  detail::require_ascending(snrs_sorted, "large_deviation_holds");
  for (std::size_t i = 0; i + 1 < snrs_sorted.size(); ++i)
    if (!(snrs_sorted[i + 1] >= (1.0 + snrs_sorted[i]) * snrs_sorted[i])) return false;
  return true;
}

inline DeviationReport deviation_report(const std::vector<double>& snrs) {
  detail::require_positive(snrs, "deviation_report");
  std::vector<double> ascending(snrs);
  std::sort(ascending.begin(), ascending.end());
  DeviationReport report;
  report.snr_min = ascending.front();
  report.snr_max = ascending.back();
  report.small_deviation = small_deviation_holds(ascending);
  report.large_deviation = large_deviation_holds(ascending);
  return report;
}

// Pairs extremes: {0, N-1}, {1, N-2}, ..., {N/2-1, N/2}.
inline GroupingPlan snr_balanced_pairing(const std::vector<double>& snrs_ascending) {
  detail::require_positive(snrs_ascending, "snr_balanced_pairing");
  detail::require_ascending(snrs_ascending, "snr_balanced_pairing");
  detail::require_even(snrs_ascending, "snr_balanced_pairing");
  const int n = static_cast<int>(snrs_ascending.size());
  GroupingPlan plan;
  for (int i = 0; i < n / 2; ++i)
    plan.groups.push_back(detail::make_pair_group(snrs_ascending, i, n - 1 - i));
  return plan;
}

// Pairs neighbors: {0, 1}, {2, 3}, ..., {N-2, N-1}.
inline GroupingPlan snr_ordered_pairing(const std::vector<double>& snrs_ascending) {
  detail::require_positive(snrs_ascending, "snr_ordered_pairing");
  detail::require_ascending(snrs_ascending, "snr_ordered_pairing");
  detail::require_even(snrs_ascending, "snr_ordered_pairing");
  const int n = static_cast<int>(snrs_ascending.size());
  GroupingPlan plan;
  for (int i = 0; i < n / 2; ++i)
    plan.groups.push_back(detail::make_pair_group(snrs_ascending, 2 * i, 2 * i + 1));
  return plan;
}

// Band-peeling hybrid.  Repeatedly takes the band of devices within the small
// deviation range of the current strongest device,
//   [(-1 + sqrt(1 + 4 * SNR_max)) / 2,  SNR_max],
// dropping the band's weakest member back when the band is odd, and stops when
// a band comes up empty or no devices remain.  Peeled bands (strongest first)
// are paired by extremes; the low-SNR remainder is paired by neighbors.
inline GroupingPlan near_optimal_pairing(const std::vector<double>& snrs_ascending) {
  detail::require_positive(snrs_ascending, "near_optimal_pairing");
  detail::require_ascending(snrs_ascending, "near_optimal_pairing");
  detail::require_even(snrs_ascending, "near_optimal_pairing");
  std::vector<int> remaining(snrs_ascending.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);

  std::vector<std::vector<int>> bands;
  while (!remaining.empty()) {
    const double snr_max = snrs_ascending[static_cast<std::size_t>(remaining.back())];
    const double threshold = (-1.0 + std::sqrt(1.0 + 4.0 * snr_max)) / 2.0;
    auto band_begin = std::find_if(remaining.begin(), remaining.end(), [&](int id) {
      return snrs_ascending[static_cast<std::size_t>(id)] >= threshold;
    });
    std::vector<int> band(band_begin, remaining.end());
    if (band.size() % 2 != 0) band.erase(band.begin());  // weakest goes back
    if (band.empty()) break;
    remaining.erase(remaining.end() - static_cast<std::ptrdiff_t>(band.size()),
                    remaining.end());
    bands.push_back(std::move(band));
  }

  GroupingPlan plan;
  for (const auto& band : bands) {
    const int m = static_cast<int>(band.size());
    for (int i = 0; i < m / 2; ++i)
      plan.groups.push_back(detail::make_pair_group(
          snrs_ascending, band[static_cast<std::size_t>(i)],
          band[static_cast<std::size_t>(m - 1 - i)]));
  }
  const int m = static_cast<int>(remaining.size());
  for (int i = 0; i < m / 2; ++i)
    plan.groups.push_back(detail::make_pair_group(
        snrs_ascending, remaining[static_cast<std::size_t>(2 * i)],
        remaining[static_cast<std::size_t>(2 * i + 1)]));
  return plan;
}

// Enumerates every perfect matching (generation order is lexicographic on the
// canonical weak-first, first-id-sorted pair list, so keeping the first strict
// minimum breaks ties toward the lexicographically smallest plan).
inline std::pair<GroupingPlan, double> exhaustive_pairing(
    const std::vector<double>& snrs_ascending, double payload_bits) {
  detail::require_positive(snrs_ascending, "exhaustive_pairing");
  detail::require_ascending(snrs_ascending, "exhaustive_pairing");
  detail::require_even(snrs_ascending, "exhaustive_pairing");
  const int n = static_cast<int>(snrs_ascending.size());
  if (n > 14)
    throw std::length_error(
        "exhaustive_pairing: N=" + std::to_string(n) +
        " exceeds the N<=14 enumeration cap ((N-1)!! matchings)");

  std::vector<std::vector<double>> pair_tau(static_cast<std::size_t>(n),
                                            std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      pair_tau[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          min_latency_pair(snrs_ascending[static_cast<std::size_t>(a)],
                           snrs_ascending[static_cast<std::size_t>(b)], payload_bits);

  std::vector<int> current(static_cast<std::size_t>(n) / 2 * 2, 0);
  std::vector<int> best_pairs;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  // Depth-first over matchings: always match the lowest unused id next.
  auto recurse = [&](auto&& self, int depth, double acc) -> void {
    if (acc >= best_value) return;  // safe: pair latencies are positive
    if (depth == n / 2) {
      best_value = acc;
      best_pairs.assign(current.begin(), current.end());
      return;
    }
    int a = 0;
    while (used[static_cast<std::size_t>(a)]) ++a;
    used[static_cast<std::size_t>(a)] = true;
    for (int b = a + 1; b < n; ++b) {
      if (used[static_cast<std::size_t>(b)]) continue;
      used[static_cast<std::size_t>(b)] = true;
      current[static_cast<std::size_t>(2 * depth)] = a;
      current[static_cast<std::size_t>(2 * depth + 1)] = b;
      self(self, depth + 1, acc + pair_tau[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
      used[static_cast<std::size_t>(b)] = false;
    }
    used[static_cast<std::size_t>(a)] = false;
  };
  recurse(recurse, 0, 0.0);

  GroupingPlan plan;
  for (std::size_t i = 0; i + 1 < best_pairs.size(); i += 2)
    plan.groups.push_back(
        detail::make_pair_group(snrs_ascending, best_pairs[i], best_pairs[i + 1]));
  return {plan, best_value};
}

// Uniformly random perfect matching: Fisher-Yates shuffle of the id list, pair
// consecutive entries, then canonicalize (weak-first pairs, sorted by first id).
// Every matching corresponds to the same number of shuffles, so the matching
// distribution is uniform.
inline GroupingPlan random_pairing(const std::vector<double>& snrs_ascending,
                                   std::uint64_t seed) {
  detail::require_positive(snrs_ascending, "random_pairing");
  detail::require_ascending(snrs_ascending, "random_pairing");
  detail::require_even(snrs_ascending, "random_pairing");
  const int n = static_cast<int>(snrs_ascending.size());
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n / 2; ++i) {
    int a = ids[static_cast<std::size_t>(2 * i)];
    int b = ids[static_cast<std::size_t>(2 * i + 1)];
    if (a > b) std::swap(a, b);
    pairs.emplace_back(a, b);
  }
  std::sort(pairs.begin(), pairs.end());
  GroupingPlan plan;
  for (const auto& [a, b] : pairs)
    plan.groups.push_back(detail::make_pair_group(snrs_ascending, a, b));
  return plan;
}

}  // namespace splitmac
