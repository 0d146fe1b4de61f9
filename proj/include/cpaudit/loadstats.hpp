#pragma once

#include <span>
#include <vector>

#include "cpaudit/corepower.hpp"
#include "cpaudit/model.hpp"

namespace cpaudit::loadstats {

/// Load/physical-core windows that count as "fully loaded". Nominal full
/// marks are 1.0 without SMT and 2.0 with it; the widths absorb normal
/// load-average jitter and are configurable per run.
struct LoadBand {
  std::pair<double, double> ht_off_full{0.9, 1.1};
  std::pair<double, double> ht_on_full{1.8, 2.2};
};

double load_per_physical_core(const BenchmarkRecord& r);

/// Keeps records whose load/physical core sits inside the band for their
/// SMT state. Preserves input order; idempotent.
std::vector<BenchmarkRecord> fully_loaded_filter(
    std::span<const BenchmarkRecord> records, const LoadBand& band = {});

struct LoadCurvePoint {
  CpuModelId cpu_model;
  double load_per_core = 0.0;
  double corepower = 0.0;
  bool operator==(const LoadCurvePoint&) const = default;
};

/// Raw scatter for plot emission: one point per record, grouped by CPU
/// model (groups contiguous, input order kept inside each group).
std::vector<LoadCurvePoint> load_performance_curve(
    std::span<const BenchmarkRecord> records, const QueueId& queue);

enum class CorrelationKind { Pearson, Spearman };

/// Correlation of (load_per_core, corepower) over points of one model.
/// Throws AnalysisError("insufficient variation") for fewer than 2 points
/// or zero variance in either coordinate.
double load_correlation(std::span<const LoadCurvePoint> points,
                        CorrelationKind kind = CorrelationKind::Pearson);

/// audit_queue on the fully-loaded subset of the records.
QueueAudit audit_fully_loaded(std::span<const JobRecord> jobs,
                              std::span<const BenchmarkRecord> records,
                              std::optional<double> declared,
                              corepower::Threshold threshold,
                              const corepower::CompletenessPolicy& policy,
                              const LoadBand& band, const QueueId& queue);

/// SMT state is taken from the record, never inferred from load; this
/// flags records where the two disagree (load/core > 1.2 with SMT off).
std::vector<std::string> smt_consistency_warnings(
    std::span<const BenchmarkRecord> records);

}  // namespace cpaudit::loadstats
