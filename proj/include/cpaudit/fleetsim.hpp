#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpaudit/model.hpp"

namespace cpaudit::fleetsim {

/// Piecewise-linear performance multiplier over load/physical core.
/// Clamped interpolation outside the given points.
struct LoadResponse {
  std::vector<std::pair<double, double>> points;  // (load_per_core, multiplier)

  double at(double load_per_core) const;
  /// Exact mean of the multiplier over [lo, hi] (trapezoid integration;
  /// exact for a piecewise-linear curve). lo == hi degenerates to at(lo).
  double mean_over(double lo, double hi) const;

  bool operator==(const LoadResponse&) const = default;
};

struct CpuProfile {
  CpuModelId model;
  double true_corepower_at_full_load = 0.0;
  LoadResponse load_response;  // normalized so the full-load mark maps to 1
  int physical_cores = 0;
  bool smt_enabled = false;
  double era_scaling = 1.0;  // effective score multiplier for old silicon

  double full_mark() const { return smt_enabled ? 2.0 : 1.0; }
  bool operator==(const CpuProfile&) const = default;
};

enum class DeclaredPolicyKind { Accurate, StaleCloned, Scaled };

struct DeclaredPolicy {
  DeclaredPolicyKind kind = DeclaredPolicyKind::Accurate;
  QueueId clone_source;       // StaleCloned only
  double scale_factor = 1.0;  // Scaled only
  bool operator==(const DeclaredPolicy&) const = default;
};

struct QueueFleet {
  struct ModelGroup {
    CpuProfile profile;
    int servers = 1;
    double job_share = 0.0;
    bool operator==(const ModelGroup&) const = default;
  };

  QueueId id;
  std::vector<ModelGroup> models;
  DeclaredPolicy declared_policy;
  bool cloned = false;  // registry provenance marker
  std::pair<double, double> load_band{0.9, 1.1};  // utilization of full mark
  bool operator==(const QueueFleet&) const = default;
};

struct SiteFleet {
  std::string site;
  std::vector<QueueFleet> queues;
  bool operator==(const SiteFleet&) const = default;
};

struct FleetSpec {
  std::vector<SiteFleet> sites;
  std::uint64_t seed = 0;
  double noise = 0.0;
  double jobs_per_hour = 10.0;

  void validate() const;  // throws ConfigError
  std::size_t queue_count() const;
  bool operator==(const FleetSpec&) const = default;
};

/// Random-fleet recipe; see README for the JSON schema.
struct SimConfig {
  int sites = 3;
  std::pair<int, int> queues_per_site{1, 2};
  std::pair<int, int> models_per_queue{1, 2};
  std::pair<int, int> servers_per_model{1, 4};
  std::pair<double, double> corepower_range{8.0, 25.0};
  std::vector<int> physical_cores_choices{16, 32, 64};
  double smt_fraction = 0.7;
  double arm_fraction = 0.0;
  double old_era_fraction = 0.0;
  double old_era_scaling = 0.7;
  std::pair<double, double> load_band{0.9, 1.1};
  std::vector<std::pair<double, double>> load_response_x86{
      {0.0, 1.20}, {1.0, 1.15}, {2.0, 1.00}, {2.5, 0.92}};
  std::vector<std::pair<double, double>> load_response_arm{{0.0, 1.0},
                                                           {2.5, 1.0}};
  double clone_fraction = 0.0;
  double inherit_fraction = 0.0;
  double scaled_fraction = 0.0;
  std::pair<double, double> scaled_factor_range{0.7, 0.7};
  double noise = 0.02;
  double jobs_per_hour = 10.0;
  double duration_hours = 168.0;
  double cadence_hours = 4.0;

  void validate() const;  // throws ConfigError

  static SimConfig from_json_text(const std::string& text);
  static SimConfig from_file(const std::string& path);
};

struct OracleEntry {
  double true_runtime_corepower = 0.0;
  double declared_corepower = 0.0;
  double true_relative_change = 0.0;
  bool operator==(const OracleEntry&) const = default;
};

struct SimOutput {
  std::vector<BenchmarkRecord> benchmark_records;
  std::vector<JobRecord> job_records;
  std::vector<DeclaredEntry> declared;
  std::map<QueueId, OracleEntry> oracle;
};

/// Deterministic for (config, seed): regenerating yields an identical
/// FleetSpec. Clone/inherit/scaled fractions are applied as exact
/// rounded quotas over a seeded shuffle of the queues.
FleetSpec generate_fleet(const SimConfig& config, std::uint64_t seed);

/// One record per cadence tick per queue, on a server sampled by job
/// share. Benchmark slots are 8 cores.
std::vector<BenchmarkRecord> simulate_benchmarks(const FleetSpec& fleet,
                                                 double duration_hours,
                                                 double cadence_hours = 4.0,
                                                 double noise = 0.0);

std::vector<JobRecord> simulate_job_accounting(const FleetSpec& fleet,
                                               double duration_hours);

/// Registry snapshot per declared policy. Stale clones resolve their
/// source's declared value recursively; cycles are a ConfigError.
std::vector<DeclaredEntry> emit_declared(const FleetSpec& fleet);

/// Analytic per-queue truth, independent of any generated samples: the
/// job-share-weighted expected corepower under the queue's load band,
/// the declared value the registry will carry, and their relative change.
std::map<QueueId, OracleEntry> compute_oracle(const FleetSpec& fleet);

SimOutput simulate(const FleetSpec& fleet, double duration_hours,
                   double cadence_hours, double noise);

/// Writes benchmarks.jsonl, jobs.jsonl, declared.csv and oracle.json into
/// `out_dir`, in exactly the formats the ingest parsers accept.
void write_sim_output(const SimOutput& output, const std::string& out_dir);

std::string oracle_to_json_text(const std::map<QueueId, OracleEntry>& oracle);

/// Full ground-truth serialization (debugging, determinism checks).
std::string fleet_to_json(const FleetSpec& fleet);

inline constexpr int kSlotCores = 8;

}  // namespace cpaudit::fleetsim
