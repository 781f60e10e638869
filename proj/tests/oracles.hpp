#pragma once
// Test oracles.  Everything here is computed by a different route than the
// library uses, so agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "splitmac/pairing.hpp"

namespace oracle {

// Min-max transmission latency via the full subset form: the binding
// constraint may a priori be any nonempty subset, so scan them all (the
// library walks sorted prefixes only).
inline double group_latency_all_subsets(const std::vector<double>& snrs,
                                        double payload_bits) {
  const std::size_t n = snrs.size();
  double worst = 0.0;
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
    double snr_sum = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1ull << k)) {
        snr_sum += snrs[k];
        ++count;
      }
    }
    worst = std::max(worst, static_cast<double>(count) / std::log2(1.0 + snr_sum));
  }
  return payload_bits * worst;
}

using Matching = std::vector<std::pair<int, int>>;

inline Matching canonical(Matching pairs) {
  for (auto& [a, b] : pairs)
    if (a > b) std::swap(a, b);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline Matching plan_pairs(const splitmac::GroupingPlan& plan) {
  Matching pairs;
  for (const splitmac::DeviceGroup& group : plan.groups)
    pairs.emplace_back(group.member_ids.at(0), group.member_ids.at(1));
  return canonical(pairs);
}

// Every distinct perfect matching, found by pairing consecutive entries of
// every permutation and de-duplicating canonical forms.
inline std::set<Matching> all_matchings(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::set<Matching> found;
  do {
    Matching pairs;
    for (int i = 0; i < n; i += 2) {
      pairs.emplace_back(ids[static_cast<std::size_t>(i)],
                         ids[static_cast<std::size_t>(i + 1)]);
    }
    found.insert(canonical(pairs));
  } while (std::next_permutation(ids.begin(), ids.end()));
  return found;
}

// Total latency of a matching, each pair evaluated through the subset oracle.
inline double matching_value(const Matching& pairs, const std::vector<double>& snrs,
                             double payload_bits) {
  double total = 0.0;
  for (const auto& [a, b] : pairs)
    total += group_latency_all_subsets({snrs[static_cast<std::size_t>(a)],
                                        snrs[static_cast<std::size_t>(b)]},
                                       payload_bits);
  return total;
}

// Optimal matching value by exhaustive scan over all_matchings.
inline double best_matching_value(const std::vector<double>& snrs, double payload_bits) {
  double best = std::numeric_limits<double>::infinity();
  for (const Matching& pairs : all_matchings(static_cast<int>(snrs.size())))
    best = std::min(best, matching_value(pairs, snrs, payload_bits));
  return best;
}

}  // namespace oracle
