#pragma once

#include <span>

#include "cpaudit/model.hpp"

namespace cpaudit::corepower {

/// Relative-change magnitude beyond which a queue counts as a critical
/// discrepancy. The boundary itself is still WITHIN.
struct Threshold {
  double value = 0.25;
};

/// What "complete weights" means: every CPU model counts as covered when
/// it has at least min_runs_per_model benchmark runs, and the covered
/// models must carry at least min_weight_covered of the queue's weight.
struct CompletenessPolicy {
  std::size_t min_runs_per_model = 3;
  double min_weight_covered = 1.0;
};

/// Per-CPU-model weights from job accounting: each model's share of the
/// queue's total walltime x cores. Throws AnalysisError("no accounting
/// data") when the queue has no jobs.
std::map<CpuModelId, double> compute_weights(std::span<const JobRecord> jobs,
                                             const QueueId& queue);

/// Mean per-record corepower (score / allocated cores) per CPU model,
/// with run count and sample std deviation. Empty input -> empty map.
std::map<CpuModelId, ModelRuntime> per_model_runtime(
    std::span<const BenchmarkRecord> records, const QueueId& queue);

/// Weighted average corepower over the models present in both maps, with
/// the weights renormalized to that covered subset. Throws
/// AnalysisError("no benchmark coverage") when the intersection is empty.
double queue_runtime_corepower(
    const std::map<CpuModelId, double>& weights,
    const std::map<CpuModelId, ModelRuntime>& per_model);

/// runtime / declared - 1. Throws AnalysisError("declared corepower
/// unavailable") when declared is absent or non-positive.
double relative_change(double runtime, double declared);
double relative_change(double runtime, std::optional<double> declared);

Classification classify(double relative_change, Threshold threshold = {});

/// True iff the weight carried by sufficiently-benchmarked models reaches
/// the policy's minimum coverage.
bool completeness_check(const std::map<CpuModelId, double>& weights,
                        const std::map<CpuModelId, ModelRuntime>& per_model,
                        const CompletenessPolicy& policy);

/// Full per-queue pipeline. Inputs are expected to be pre-filtered to
/// `queue` (records for other queues are ignored). Sub-operation errors
/// become a failure_reason on the returned audit instead of propagating.
QueueAudit audit_queue(std::span<const JobRecord> jobs,
                       std::span<const BenchmarkRecord> records,
                       std::optional<double> declared, Threshold threshold,
                       const CompletenessPolicy& policy, const QueueId& queue);

/// Contribution-weighted mean relative change over the auditable audits.
/// Throws AnalysisError when none are auditable.
double overall_weighted_discrepancy(std::span<const QueueAudit> audits);

}  // namespace cpaudit::corepower
