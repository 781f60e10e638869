// Command-line front end: sweeps, single pairings, and config checks.
//
// Exit codes: 0 success, 1 invalid input (flags or configuration), 2 runtime
// or I/O failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitmac/harness.hpp"

namespace {

int do_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& out_path) {
  splitmac::ExperimentSpec spec = splitmac::load_spec(config_path);
  if (seed) spec.seed = *seed;
  const splitmac::RunResult result = splitmac::run_sweep(spec);
  if (!out_path.empty()) splitmac::emit_csv(result, out_path);
  std::cout << "spec_hash=" << result.spec_hash << "\n";
  std::cout << "rows=" << result.rows.size() << "\n";
  std::cout << splitmac::emit_summary(result);
  return 0;
}

int do_pair(std::vector<double> snrs, const std::string& algorithm_name,
            double payload_bits, double bandwidth_hz, std::uint64_t seed) {
  const std::optional<splitmac::Algorithm> algorithm =
      splitmac::algorithm_from_string(algorithm_name);
  if (!algorithm)
    throw std::invalid_argument("unknown algorithm: " + algorithm_name);
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("--bandwidth-hz must be positive");
  std::sort(snrs.begin(), snrs.end());
  const splitmac::GroupingPlan plan =
      *algorithm == splitmac::Algorithm::random
          ? splitmac::random_pairing(snrs, seed)
          : splitmac::detail::run_algorithm(*algorithm, snrs, seed);
  double total = 0.0;
  for (const splitmac::DeviceGroup& group : plan.groups) {
    const double tau =
        splitmac::min_latency_group(group, payload_bits).latency_normalized /
        bandwidth_hz;
    total += tau;
    std::cout << "pair: " << group.member_ids[0] << "," << group.member_ids[1]
              << " tau_s=" << splitmac::format_double(tau) << "\n";
  }
  std::cout << "total_s=" << splitmac::format_double(total) << "\n";
  return 0;
}

int do_sweep(const std::string& config_path, const std::string& out_path) {
  const splitmac::ExperimentSpec spec = splitmac::load_spec(config_path);
  const splitmac::RunResult result = splitmac::run_sweep(spec);
  splitmac::emit_csv(result, out_path);
  std::cout << "spec_hash=" << result.spec_hash << "\n";
  std::cout << "rows=" << result.rows.size() << "\n";
  return 0;
}

int do_check(const std::string& config_path) {
  const splitmac::ExperimentSpec spec = splitmac::load_spec(config_path);
  std::cout << "config ok\n";
  std::cout << "spec_hash=" << splitmac::spec_hash(spec) << "\n";
  const bool has_splitmac =
      std::find(spec.protocols.begin(), spec.protocols.end(),
                splitmac::Protocol::splitmac) != spec.protocols.end();
  if (!has_splitmac) {
    std::cout << "pipeline check skipped (no splitmac protocol)\n";
    return 0;
  }
  const int n = spec.n_devices.front();
  const std::uint64_t seed = splitmac::row_seed(spec.seed, n, 0);
  const std::vector<splitmac::DeviceChannel> devices =
      splitmac::detail::build_devices(spec, n, seed);
  std::vector<double> snrs;
  for (const splitmac::DeviceChannel& dev : devices) snrs.push_back(dev.snr_ul_linear);
  const splitmac::ClusterPlan plan = splitmac::detail::make_cluster_plan(
      spec, splitmac::detail::run_algorithm(spec.algorithms.front(), snrs, seed));
  const std::vector<splitmac::PipelineViolation> violations =
      splitmac::pipeline_assumption_check(plan, devices, spec.model, spec.compute,
                                          spec.radio, spec.md_scope);
  for (const splitmac::PipelineViolation& v : violations)
    std::cout << "violation: cluster=" << v.cluster_index << " group=" << v.group_index
              << " lhs_s=" << splitmac::format_double(v.lhs_s)
              << " rhs_s=" << splitmac::format_double(v.rhs_s) << "\n";
  std::cout << "violations=" << violations.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Round-latency simulator for split training over a shared uplink"};
  app.require_subcommand(1);

  CLI::App* sim = app.add_subcommand("simulate", "Run a sweep and print the summary table");
  std::string sim_config, sim_out;
  std::uint64_t sim_seed = 0;
  sim->add_option("--config", sim_config, "JSON experiment configuration")->required();
  sim->add_option("--seed", sim_seed, "Override the configured seed");
  sim->add_option("--out", sim_out, "Also write the per-row CSV to this path");

  CLI::App* pair = app.add_subcommand("pair", "Pair a set of uplink SNRs and print the plan");
  std::vector<double> pair_snrs;
  std::string pair_algorithm = "near_optimal";
  double payload_bits = 1.0, bandwidth_hz = 1.0;
  std::uint64_t pair_seed = 0;
  pair->add_option("--snrs", pair_snrs,
                   "Comma-separated uplink SNRs, linear scale (sorted ascending; "
                   "printed ids index the sorted list)")
      ->required()
      ->delimiter(',');
  pair->add_option("--algorithm", pair_algorithm,
                   "balanced | ordered | near_optimal | exhaustive | random");
  pair->add_option("--payload-bits", payload_bits, "Payload per device in bits");
  pair->add_option("--bandwidth-hz", bandwidth_hz, "Uplink bandwidth in Hz");
  pair->add_option("--seed", pair_seed, "Shuffle seed for the random algorithm");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a sweep and write the per-row CSV");
  std::string sweep_config, sweep_out;
  sweep->add_option("--config", sweep_config, "JSON experiment configuration")->required();
  sweep->add_option("--out", sweep_out, "CSV output path")->required();

  CLI::App* check = app.add_subcommand("check", "Validate a config and check the pipelining assumption");
  std::string check_config;
  check->add_option("--config", check_config, "JSON experiment configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed())
      return do_simulate(sim_config,
                         sim->count("--seed") ? std::optional<std::uint64_t>(sim_seed)
                                              : std::nullopt,
                         sim_out);
    if (pair->parsed())
      return do_pair(pair_snrs, pair_algorithm, payload_bits, bandwidth_hz, pair_seed);
    if (sweep->parsed()) return do_sweep(sweep_config, sweep_out);
    if (check->parsed()) return do_check(check_config);
  } catch (const splitmac::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::length_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
