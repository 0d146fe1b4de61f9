#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace cpaudit {

/// Fatal problem with an input stream or file (unreadable, malformed registry).
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An analysis operation cannot produce a result for the given inputs.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (CLI options, simulator config).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Canonical CPU model string. Produced by ingest::normalize_cpu_model;
/// normalizing a canonical name returns it unchanged.
struct CpuModelId {
  std::string canonical_name;
  auto operator<=>(const CpuModelId&) const = default;
};

/// (site, queue) pair identifying one batch queue.
struct QueueId {
  std::string site;
  std::string queue_name;
  auto operator<=>(const QueueId&) const = default;
  std::string str() const { return site + "/" + queue_name; }
};

/// UTC instant with second resolution (unix epoch seconds).
using UtcSeconds = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM:SS[.fff]Z" (or +00:00 offset). Fractional
/// seconds are truncated. Throws IngestError on anything else.
UtcSeconds parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(UtcSeconds t);

/// One benchmark run on one server. `score` is the whole-slot value; the
/// per-record corepower divides it by the slot cores.
struct BenchmarkRecord {
  QueueId queue;
  CpuModelId cpu_model;
  UtcSeconds timestamp = 0;
  double score = 0.0;
  int allocated_cores = 0;
  int physical_cores = 0;
  int online_cores = 0;
  bool smt_enabled = false;
  double load_avg = 0.0;
  std::optional<double> cpu_freq_mhz;
  std::optional<double> mem_used_gib;

  double corepower() const { return score / allocated_cores; }
  bool operator==(const BenchmarkRecord&) const = default;
};

/// One accounting entry from production jobs.
struct JobRecord {
  QueueId queue;
  CpuModelId cpu_model;
  double walltime_s = 0.0;
  int cores = 0;

  double walltime_x_core() const { return walltime_s * cores; }
  bool operator==(const JobRecord&) const = default;
};

/// One registry snapshot row. Queues without a declared value are simply
/// absent from the registry, never represented as 0.
struct DeclaredEntry {
  QueueId queue;
  double declared_corepower = 0.0;
  std::string source;
  bool operator==(const DeclaredEntry&) const = default;
};

enum class Classification { CriticalNegative, Within, CriticalPositive };

std::string to_string(Classification c);
std::optional<Classification> classification_from_string(const std::string& s);

/// Aggregate of repeated benchmark probes for one CPU model on one queue.
struct ModelRuntime {
  double mean_corepower = 0.0;
  std::size_t runs = 0;
  double stddev = 0.0;  // sample std deviation, 0 for a single run
  bool operator==(const ModelRuntime&) const = default;
};

/// Per-queue analysis result. A queue is auditable iff `classification`
/// is set; otherwise `failure_reason` says why not. Fields filled up to
/// the point where the pipeline stopped are kept for reporting.
struct QueueAudit {
  QueueId queue;
  std::map<CpuModelId, double> weights;
  std::map<CpuModelId, ModelRuntime> per_model_runtime;
  std::optional<double> runtime_corepower;
  std::optional<double> declared_corepower;
  std::optional<double> relative_change;
  std::optional<Classification> classification;
  double contribution = 0.0;  // total walltime x cores over the queue's jobs
  bool complete_weights = false;
  std::optional<std::string> failure_reason;

  bool auditable() const { return classification.has_value(); }
  std::size_t benchmark_runs() const {
    std::size_t n = 0;
    for (const auto& [model, stats] : per_model_runtime) n += stats.runs;
    return n;
  }
};

}  // namespace cpaudit
