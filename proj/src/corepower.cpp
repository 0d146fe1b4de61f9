#include "cpaudit/corepower.hpp"

#include <cmath>
#include <vector>

namespace cpaudit::corepower {

std::map<CpuModelId, double> compute_weights(std::span<const JobRecord> jobs,
                                             const QueueId& queue) {
  std::map<CpuModelId, double> totals;
  double grand_total = 0.0;
  for (const auto& job : jobs) {
    if (job.queue != queue) continue;
    totals[job.cpu_model] += job.walltime_x_core();
    grand_total += job.walltime_x_core();
  }
  if (totals.empty() || grand_total <= 0.0)
    throw AnalysisError("no accounting data");
  std::map<CpuModelId, double> weights;
  for (const auto& [model, total] : totals) weights[model] = total / grand_total;
  return weights;
}

std::map<CpuModelId, ModelRuntime> per_model_runtime(
    std::span<const BenchmarkRecord> records, const QueueId& queue) {
  std::map<CpuModelId, std::vector<double>> samples;
  for (const auto& r : records) {
    if (r.queue != queue) continue;
    samples[r.cpu_model].push_back(r.corepower());
  }
  std::map<CpuModelId, ModelRuntime> out;
  for (const auto& [model, values] : samples) {
    ModelRuntime stats;
    stats.runs = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    stats.mean_corepower = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) {
        const double d = v - stats.mean_corepower;
        ss += d * d;
      }
      stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out[model] = stats;
  }
  return out;
}

double queue_runtime_corepower(
    const std::map<CpuModelId, double>& weights,
    const std::map<CpuModelId, ModelRuntime>& per_model) {
  double weighted_sum = 0.0;
  double weight_sum = 0.0;
  for (const auto& [model, weight] : weights) {
    auto it = per_model.find(model);
    if (it == per_model.end()) continue;
    weighted_sum += weight * it->second.mean_corepower;
    weight_sum += weight;
  }
  if (weight_sum <= 0.0) throw AnalysisError("no benchmark coverage");
  return weighted_sum / weight_sum;
}

double relative_change(double runtime, double declared) {
  if (!(declared > 0.0)) throw AnalysisError("declared corepower unavailable");
  return runtime / declared - 1.0;
}

double relative_change(double runtime, std::optional<double> declared) {
  if (!declared) throw AnalysisError("declared corepower unavailable");
  return relative_change(runtime, *declared);
}

Classification classify(double rc, Threshold threshold) {
  if (rc > threshold.value) return Classification::CriticalPositive;
  if (rc < -threshold.value) return Classification::CriticalNegative;
  return Classification::Within;
}

bool completeness_check(const std::map<CpuModelId, double>& weights,
                        const std::map<CpuModelId, ModelRuntime>& per_model,
                        const CompletenessPolicy& policy) {
  double covered = 0.0;
  for (const auto& [model, weight] : weights) {
    auto it = per_model.find(model);
    if (it != per_model.end() && it->second.runs >= policy.min_runs_per_model)
      covered += weight;
  }
  // slack for the floating sum of weights when the policy demands 1.0
  return covered + 1e-9 >= policy.min_weight_covered;
}

QueueAudit audit_queue(std::span<const JobRecord> jobs,
                       std::span<const BenchmarkRecord> records,
                       std::optional<double> declared, Threshold threshold,
                       const CompletenessPolicy& policy, const QueueId& queue) {
  QueueAudit audit;
  audit.queue = queue;
  for (const auto& job : jobs)
    if (job.queue == queue) audit.contribution += job.walltime_x_core();

  try {
    audit.weights = compute_weights(jobs, queue);
  } catch (const AnalysisError& e) {
    audit.failure_reason = e.what();
    return audit;
  }
  audit.per_model_runtime = per_model_runtime(records, queue);
  audit.complete_weights =
      completeness_check(audit.weights, audit.per_model_runtime, policy);
  try {
    audit.runtime_corepower =
        queue_runtime_corepower(audit.weights, audit.per_model_runtime);
  } catch (const AnalysisError& e) {
    audit.failure_reason = e.what();
    return audit;
  }
  if (!declared) {
    audit.failure_reason = "declared corepower unavailable";
    return audit;
  }
  audit.declared_corepower = declared;
  if (!audit.complete_weights) {
    audit.failure_reason = "incomplete weight coverage";
    return audit;
  }
  try {
    audit.relative_change =
        relative_change(*audit.runtime_corepower, *audit.declared_corepower);
  } catch (const AnalysisError& e) {
    audit.failure_reason = e.what();
    return audit;
  }
  audit.classification = classify(*audit.relative_change, threshold);
  return audit;
}

double overall_weighted_discrepancy(std::span<const QueueAudit> audits) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& a : audits) {
    if (!a.auditable()) continue;
    weighted += a.contribution * (*a.relative_change);
    total += a.contribution;
  }
  if (total <= 0.0) throw AnalysisError("no auditable queues");
  return weighted / total;
}

}  // namespace cpaudit::corepower
