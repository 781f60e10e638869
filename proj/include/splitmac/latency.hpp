#pragma once
// Per-step latencies and round-latency composition for split training over a
// shared radio uplink/downlink, under three protocols:
//
//   - splitmac:     devices train in fixed-size groups; each group transmits
//                   its cut-layer activations simultaneously over NOMA with
//                   the min-max rate allocation; clusters of several groups
//                   pipeline server-side work behind the next group's uplink,
//   - vanilla:      one device at a time, full bandwidth, fully sequential,
//   - cluster_fdma: a whole cluster transmits at once on disjoint subbands
//                   sized so that all its devices finish together.
//
// One training round walks these steps per cluster: model distribution (MD),
// device-side execution (DME), smashed-data transmission (SDT), server-side
// processing (SMP, per device), gradient return (IGT), device-side backward
// pass (DMP), and device model upload (DMT).  With more than one group per
// cluster the IGT/DMP/SMP work of a group is assumed hidden behind later
// groups' uplink transmissions and drops out of the total;
// pipeline_assumption_check reports where that assumption fails.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitmac/channel.hpp"
#include "splitmac/model_profile.hpp"
#include "splitmac/rate_allocation.hpp"

namespace splitmac {

enum class Protocol { splitmac, vanilla, cluster_fdma };

inline const char* to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::splitmac: return "splitmac";
    case Protocol::vanilla: return "vanilla";
    case Protocol::cluster_fdma: return "cluster_fdma";
  }
  return "?";
}

// Scope of the model-distribution broadcast: the downlink rate that binds
// tau_md is the worst one over the current cluster (default) or over every
// device in the plan.
enum class MdScope { cluster, all_devices };

inline const char* to_string(MdScope scope) {
  return scope == MdScope::cluster ? "cluster" : "all_devices";
}

// A round schedule: groups listed in transmission order, consecutive runs of
// `groups_per_cluster` groups forming one cluster.
struct ClusterPlan {
  std::vector<DeviceGroup> groups_in_order;
  int groups_per_cluster = 1;        // C: groups per cluster
  int group_size = 2;                // L: devices per group
  int local_update_period_groups = 1;  // Q: groups per server-side update window

  int total_groups() const { return static_cast<int>(groups_in_order.size()); }
  int num_clusters() const { return total_groups() / groups_per_cluster; }
  int devices_per_cluster() const { return groups_per_cluster * group_size; }
  int total_devices() const { return total_groups() * group_size; }

  void validate() const {
    if (groups_per_cluster < 1 || group_size < 1)
      throw std::invalid_argument("ClusterPlan: cluster and group sizes must be >= 1");
    if (local_update_period_groups < 1 ||
        local_update_period_groups > groups_per_cluster)
      throw std::invalid_argument(
          "ClusterPlan: local update period must be in [1, groups_per_cluster]");
    if (groups_in_order.empty())
      throw std::invalid_argument("ClusterPlan: no groups");
    if (total_groups() % groups_per_cluster != 0)
      throw std::invalid_argument(
          "ClusterPlan: group count must be a multiple of groups_per_cluster");
    for (const DeviceGroup& group : groups_in_order) {
      group.validate();
      if (static_cast<int>(group.size()) != group_size)
        throw std::invalid_argument("ClusterPlan: group does not match group_size");
    }
  }
};

struct GroupSteps {
  double sdt_s = 0.0;
  double igt_s = 0.0;
  double dmp_s = 0.0;
  double dmt_s = 0.0;
};

struct ClusterSteps {
  double md_s = 0.0;
  double dme_s = 0.0;
  std::vector<GroupSteps> per_group;
};

struct LatencyBreakdown {
  Protocol protocol = Protocol::splitmac;
  std::vector<ClusterSteps> per_cluster;
  double smp_per_device_s = 0.0;
  int n_devices = 0;
  double total_s = 0.0;

  double sum_md() const { return sum([](const ClusterSteps& c) { return c.md_s; }); }
  double sum_dme() const { return sum([](const ClusterSteps& c) { return c.dme_s; }); }
  double sum_sdt() const { return sum_group([](const GroupSteps& g) { return g.sdt_s; }); }
  double sum_igt() const { return sum_group([](const GroupSteps& g) { return g.igt_s; }); }
  double sum_dmp() const { return sum_group([](const GroupSteps& g) { return g.dmp_s; }); }
  double sum_dmt() const { return sum_group([](const GroupSteps& g) { return g.dmt_s; }); }
  double smp_total_s() const { return smp_per_device_s * n_devices; }
  int group_count() const {
    std::size_t n = 0;
    for (const ClusterSteps& cluster : per_cluster) n += cluster.per_group.size();
    return static_cast<int>(n);
  }

 private:
  template <typename Fn>
  double sum(Fn fn) const {
    double acc = 0.0;
    for (const ClusterSteps& cluster : per_cluster) acc += fn(cluster);
    return acc;
  }
  template <typename Fn>
  double sum_group(Fn fn) const {
    double acc = 0.0;
    for (const ClusterSteps& cluster : per_cluster)
      for (const GroupSteps& group : cluster.per_group) acc += fn(group);
    return acc;
  }
};

namespace detail {

inline void require_rates(const std::vector<double>& rates_bps, const char* who) {
  if (rates_bps.empty())
    throw std::invalid_argument(std::string(who) + ": empty rate list");
  for (double r : rates_bps)
    if (!(r > 0.0)) throw std::domain_error(std::string(who) + ": rate must be positive");
}

inline void require_cpus(const std::vector<double>& cpu_hz, const char* who) {
  if (cpu_hz.empty())
    throw std::invalid_argument(std::string(who) + ": empty CPU list");
  for (double f : cpu_hz)
    if (!(f > 0.0))
      throw std::domain_error(std::string(who) + ": CPU rate must be positive");
}

}  // namespace detail

// --- Per-step latencies -----------------------------------------------------
// Payload steps take the per-device link rates in bits/s for the relevant
// direction; compute steps take the per-device CPU rates in Hz.

// Model distribution: the broadcast finishes when the slowest scoped downlink
// has received the device-side model.
inline double tau_md(const ModelProfile& model, const std::vector<double>& dl_rates_bps) {
  detail::require_rates(dl_rates_bps, "tau_md");
  double worst = 0.0;
  for (double r : dl_rates_bps) worst = std::max(worst, model.device_model_bits / r);
  return worst;
}

// Device-side forward pass over one batch; the slowest device binds.
inline double tau_dme(const ModelProfile& model, const ComputeProfile& compute,
                      const std::vector<double>& cpu_hz) {
  detail::require_cpus(cpu_hz, "tau_dme");
  double worst = 0.0;
  for (double f : cpu_hz)
    worst = std::max(worst, model.batch_size * model.fwd_device_flops_per_sample /
                               (f * compute.device_intensity_flops_per_cycle));
  return worst;
}

// Device-side backward pass over one batch; the slowest group member binds.
inline double tau_dmp(const ModelProfile& model, const ComputeProfile& compute,
                      const std::vector<double>& cpu_hz) {
  detail::require_cpus(cpu_hz, "tau_dmp");
  double worst = 0.0;
  for (double f : cpu_hz)
    worst = std::max(worst, model.batch_size * model.bwd_device_flops_per_sample /
                               (f * compute.device_intensity_flops_per_cycle));
  return worst;
}

// Smashed-data upload at the group's uplink rates; the slowest member binds
// (with the min-max group allocation all members finish together).
inline double tau_sdt(const ModelProfile& model,
                      const std::vector<double>& noma_rates_bps) {
  detail::require_rates(noma_rates_bps, "tau_sdt");
  double worst = 0.0;
  for (double r : noma_rates_bps)
    worst = std::max(worst, model.smashed_bits_per_batch / r);
  return worst;
}

// Device-model upload at the same uplink rates.
inline double tau_dmt(const ModelProfile& model,
                      const std::vector<double>& noma_rates_bps) {
  detail::require_rates(noma_rates_bps, "tau_dmt");
  double worst = 0.0;
  for (double r : noma_rates_bps)
    worst = std::max(worst, model.device_model_bits / r);
  return worst;
}

// Server-side forward+backward pass for one device's batch.
inline double tau_smp(const ModelProfile& model, const ComputeProfile& compute) {
  return model.batch_size *
         (model.fwd_server_flops_per_sample + model.bwd_server_flops_per_sample) /
         (compute.server_cpu_hz * compute.server_intensity_flops_per_cycle);
}

// Gradient return to a group's members, one unicast per member (summed).
inline double tau_igt(const ModelProfile& model, const std::vector<double>& dl_rates_bps) {
  detail::require_rates(dl_rates_bps, "tau_igt");
  double acc = 0.0;
  for (double r : dl_rates_bps) acc += model.grad_bits_per_batch / r;
  return acc;
}

// --- Composition ------------------------------------------------------------

// Recomputes a round total from its per-step components.  With more than one
// group per cluster, the per-group IGT/DMP and all SMP work are hidden behind
// later uplink transmissions and only MD/DME/SDT/DMT enter the total; with a
// single group per cluster everything is sequential and the per-device
// server-side processing is paid N times.
inline double compose_total(const LatencyBreakdown& breakdown) {
  if (breakdown.per_cluster.empty())
    throw std::invalid_argument("compose_total: no clusters");
  for (const ClusterSteps& cluster : breakdown.per_cluster)
    if (cluster.per_group.empty())
      throw std::invalid_argument("compose_total: cluster with no groups");
  const bool pipelined = breakdown.per_cluster.front().per_group.size() > 1;
  double total = 0.0;
  for (const ClusterSteps& cluster : breakdown.per_cluster) {
    total += cluster.md_s + cluster.dme_s;
    for (const GroupSteps& group : cluster.per_group)
      total += pipelined ? group.sdt_s + group.dmt_s
                         : group.sdt_s + group.igt_s + group.dmp_s + group.dmt_s;
  }
  if (!pipelined) total += breakdown.smp_per_device_s * breakdown.n_devices;
  return total;
}

namespace detail {

inline void check_plan_ids(const ClusterPlan& plan,
                           const std::vector<DeviceChannel>& devices) {
  std::vector<bool> seen(devices.size(), false);
  for (const DeviceGroup& group : plan.groups_in_order)
    for (int id : group.member_ids) {
      if (id < 0 || id >= static_cast<int>(devices.size()))
        throw std::invalid_argument("round latency: group member id out of range");
      if (seen[static_cast<std::size_t>(id)])
        throw std::invalid_argument("round latency: device appears in two groups");
      seen[static_cast<std::size_t>(id)] = true;
    }
}

}  // namespace detail

// Full round walk for the grouped-NOMA protocol.  Uplink SNRs, downlink SNRs
// and CPU rates are read from `devices` via each group's member ids; group
// uplink rates come from the min-max allocation (computed per unit bandwidth,
// then scaled by the uplink bandwidth).
inline LatencyBreakdown splitmac_round_latency(const ClusterPlan& plan,
                                               const std::vector<DeviceChannel>& devices,
                                               const ModelProfile& model,
                                               const ComputeProfile& compute,
                                               const RadioParams& radio,
                                               MdScope md_scope = MdScope::cluster) {
  plan.validate();
  model.validate();
  compute.validate();
  radio.validate();
  detail::check_plan_ids(plan, devices);

  const auto dl_rate = [&](int id) {
    return rate_bps(devices[static_cast<std::size_t>(id)].snr_dl_linear,
                    radio.bandwidth_dl_hz);
  };

  std::vector<double> all_dl_rates;
  if (md_scope == MdScope::all_devices)
    for (const DeviceGroup& group : plan.groups_in_order)
      for (int id : group.member_ids) all_dl_rates.push_back(dl_rate(id));

  LatencyBreakdown out;
  out.protocol = Protocol::splitmac;
  out.smp_per_device_s = tau_smp(model, compute);
  out.n_devices = plan.total_devices();

  const int clusters = plan.num_clusters();
  for (int j = 0; j < clusters; ++j) {
    ClusterSteps cluster;
    std::vector<double> cluster_dl, cluster_cpu;
    const int first_group = j * plan.groups_per_cluster;
    for (int g = first_group; g < first_group + plan.groups_per_cluster; ++g)
      for (int id : plan.groups_in_order[static_cast<std::size_t>(g)].member_ids) {
        cluster_dl.push_back(dl_rate(id));
        cluster_cpu.push_back(devices[static_cast<std::size_t>(id)].cpu_hz);
      }
    cluster.md_s = tau_md(model, md_scope == MdScope::cluster ? cluster_dl : all_dl_rates);
    cluster.dme_s = tau_dme(model, compute, cluster_cpu);

    for (int g = first_group; g < first_group + plan.groups_per_cluster; ++g) {
      const DeviceGroup& members = plan.groups_in_order[static_cast<std::size_t>(g)];
      DeviceGroup noma;
      noma.member_ids = members.member_ids;
      for (int id : members.member_ids)
        noma.snrs.push_back(devices[static_cast<std::size_t>(id)].snr_ul_linear);
      const RateAllocation alloc = min_latency_group(noma, 1.0);
      std::vector<double> ul_rates_bps;
      for (double r : alloc.rates_bits_per_hz)
        ul_rates_bps.push_back(r * radio.bandwidth_ul_hz);

      std::vector<double> group_dl, group_cpu;
      for (int id : members.member_ids) {
        group_dl.push_back(dl_rate(id));
        group_cpu.push_back(devices[static_cast<std::size_t>(id)].cpu_hz);
      }

      GroupSteps steps;
      steps.sdt_s = tau_sdt(model, ul_rates_bps);
      steps.dmt_s = tau_dmt(model, ul_rates_bps);
      steps.igt_s = tau_igt(model, group_dl);
      steps.dmp_s = tau_dmp(model, compute, group_cpu);
      cluster.per_group.push_back(steps);
    }
    out.per_cluster.push_back(std::move(cluster));
  }
  out.total_s = compose_total(out);
  return out;
}

// Fully sequential baseline: every device gets the whole band to itself.
// Implemented as the grouped walk with one singleton group per "cluster", so
// the one-device degenerate case is the same computation bit for bit.
inline LatencyBreakdown vanilla_sl_round_latency(const std::vector<DeviceChannel>& devices,
                                                 const ModelProfile& model,
                                                 const ComputeProfile& compute,
                                                 const RadioParams& radio) {
  if (devices.empty())
    throw std::invalid_argument("vanilla_sl_round_latency: no devices");
  ClusterPlan plan;
  plan.groups_per_cluster = 1;
  plan.group_size = 1;
  plan.local_update_period_groups = 1;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    DeviceGroup solo;
    solo.member_ids = {static_cast<int>(k)};
    solo.snrs = {devices[k].snr_ul_linear};
    plan.groups_in_order.push_back(std::move(solo));
  }
  LatencyBreakdown out =
      splitmac_round_latency(plan, devices, model, compute, radio, MdScope::cluster);
  out.protocol = Protocol::vanilla;
  return out;
}

// Cluster-wide FDMA baseline: all devices of a cluster upload at once on
// disjoint subbands sized to equalize finish times, which makes the cluster
// upload time the sum of the full-band per-device times.  Server-side and
// downlink steps are fully sequential (single-group composition).
inline LatencyBreakdown cluster_fdma_round_latency(const ClusterPlan& plan,
                                                   const std::vector<DeviceChannel>& devices,
                                                   const ModelProfile& model,
                                                   const ComputeProfile& compute,
                                                   const RadioParams& radio,
                                                   MdScope md_scope = MdScope::cluster) {
  plan.validate();
  model.validate();
  compute.validate();
  radio.validate();
  detail::check_plan_ids(plan, devices);

  const auto dl_rate = [&](int id) {
    return rate_bps(devices[static_cast<std::size_t>(id)].snr_dl_linear,
                    radio.bandwidth_dl_hz);
  };

  std::vector<double> all_dl_rates;
  if (md_scope == MdScope::all_devices)
    for (const DeviceGroup& group : plan.groups_in_order)
      for (int id : group.member_ids) all_dl_rates.push_back(dl_rate(id));

  LatencyBreakdown out;
  out.protocol = Protocol::cluster_fdma;
  out.smp_per_device_s = tau_smp(model, compute);
  out.n_devices = plan.total_devices();

  const int clusters = plan.num_clusters();
  for (int j = 0; j < clusters; ++j) {
    std::vector<int> member_ids;
    const int first_group = j * plan.groups_per_cluster;
    for (int g = first_group; g < first_group + plan.groups_per_cluster; ++g)
      for (int id : plan.groups_in_order[static_cast<std::size_t>(g)].member_ids)
        member_ids.push_back(id);

    std::vector<double> cluster_dl, cluster_cpu;
    double sdt = 0.0, dmt = 0.0;
    for (int id : member_ids) {
      const DeviceChannel& dev = devices[static_cast<std::size_t>(id)];
      const double full_band_bps = rate_bps(dev.snr_ul_linear, radio.bandwidth_ul_hz);
      sdt += model.smashed_bits_per_batch / full_band_bps;
      dmt += model.device_model_bits / full_band_bps;
      cluster_dl.push_back(dl_rate(id));
      cluster_cpu.push_back(dev.cpu_hz);
    }

    ClusterSteps cluster;
    cluster.md_s = tau_md(model, md_scope == MdScope::cluster ? cluster_dl : all_dl_rates);
    cluster.dme_s = tau_dme(model, compute, cluster_cpu);
    GroupSteps steps;
    steps.sdt_s = sdt;
    steps.dmt_s = dmt;
    steps.igt_s = tau_igt(model, cluster_dl);
    steps.dmp_s = tau_dmp(model, compute, cluster_cpu);
    cluster.per_group.push_back(steps);
    out.per_cluster.push_back(std::move(cluster));
  }
  out.total_s = compose_total(out);
  return out;
}

// --- Pipelining sanity check ------------------------------------------------

struct PipelineViolation {
  int cluster_index = 0;
  int group_index = 0;  // the group whose hidden work does not fit
  double lhs_s = 0.0;   // server window + gradient return
  double rhs_s = 0.0;   // next group's upload time
};

// The hidden-work assumption: while group i+1 uploads, the server must finish
// its processing window (one batch for each of the Q*L devices of an update
// period) and return group i's gradients.  Checked for every group with a
// successor in its cluster; an empty result means the pipelined totals are
// trustworthy.
inline std::vector<PipelineViolation> pipeline_assumption_check(
    const LatencyBreakdown& breakdown, const ClusterPlan& plan) {
  const double window_s = breakdown.smp_per_device_s *
                          plan.local_update_period_groups * plan.group_size;
  std::vector<PipelineViolation> violations;
  for (std::size_t j = 0; j < breakdown.per_cluster.size(); ++j) {
    const std::vector<GroupSteps>& groups = breakdown.per_cluster[j].per_group;
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
      const double lhs = window_s + groups[i].igt_s;
      const double rhs = groups[i + 1].sdt_s;
      if (lhs > rhs)
        violations.push_back({static_cast<int>(j), static_cast<int>(i), lhs, rhs});
    }
  }
  return violations;
}

inline std::vector<PipelineViolation> pipeline_assumption_check(
    const ClusterPlan& plan, const std::vector<DeviceChannel>& devices,
    const ModelProfile& model, const ComputeProfile& compute, const RadioParams& radio,
    MdScope md_scope = MdScope::cluster) {
  return pipeline_assumption_check(
      splitmac_round_latency(plan, devices, model, compute, radio, md_scope), plan);
}

}  // namespace splitmac
