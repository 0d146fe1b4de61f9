#include "cpaudit/loadstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpaudit/text.hpp"

namespace cpaudit::loadstats {

double load_per_physical_core(const BenchmarkRecord& r) {
  return r.load_avg / r.physical_cores;
}

std::vector<BenchmarkRecord> fully_loaded_filter(
    std::span<const BenchmarkRecord> records, const LoadBand& band) {
  std::vector<BenchmarkRecord> kept;
  for (const auto& r : records) {
    const auto& [lo, hi] = r.smt_enabled ? band.ht_on_full : band.ht_off_full;
    const double lpc = load_per_physical_core(r);
    if (lpc >= lo && lpc <= hi) kept.push_back(r);
  }
  return kept;
}

std::vector<LoadCurvePoint> load_performance_curve(
    std::span<const BenchmarkRecord> records, const QueueId& queue) {
  std::vector<LoadCurvePoint> points;
  for (const auto& r : records) {
    if (r.queue != queue) continue;
    points.push_back({r.cpu_model, load_per_physical_core(r), r.corepower()});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const LoadCurvePoint& a, const LoadCurvePoint& b) {
                     return a.cpu_model < b.cpu_model;
                   });
  return points;
}

namespace {

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw AnalysisError("insufficient variation");
  return sxy / std::sqrt(sxx * syy);
}

// mid-ranks for ties
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
    i = j + 1;
  }
  return r;
}

}  // namespace

double load_correlation(std::span<const LoadCurvePoint> points,
                        CorrelationKind kind) {
  if (points.size() < 2) throw AnalysisError("insufficient variation");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& p : points) {
    xs.push_back(p.load_per_core);
    ys.push_back(p.corepower);
  }
  if (kind == CorrelationKind::Spearman) {
    xs = ranks(xs);
    ys = ranks(ys);
  }
  return pearson(xs, ys);
}

QueueAudit audit_fully_loaded(std::span<const JobRecord> jobs,
                              std::span<const BenchmarkRecord> records,
                              std::optional<double> declared,
                              corepower::Threshold threshold,
                              const corepower::CompletenessPolicy& policy,
                              const LoadBand& band, const QueueId& queue) {
  const auto filtered = fully_loaded_filter(records, band);
  QueueAudit audit = corepower::audit_queue(jobs, filtered, declared, threshold,
                                            policy, queue);
  const bool queue_has_records =
      std::any_of(records.begin(), records.end(),
                  [&](const BenchmarkRecord& r) { return r.queue == queue; });
  if (audit.failure_reason == "no benchmark coverage" && queue_has_records)
    audit.failure_reason = "no fully-loaded measurements";
  return audit;
}

std::vector<std::string> smt_consistency_warnings(
    std::span<const BenchmarkRecord> records) {
  std::vector<std::string> warnings;
  for (const auto& r : records) {
    const double lpc = load_per_physical_core(r);
    if (!r.smt_enabled && lpc > 1.2) {
      warnings.push_back("suspicious SMT state on " + r.queue.str() + " (" +
                         r.cpu_model.canonical_name + "): load/core " +
                         text::format_double(lpc) +
                         " with smt_enabled = false at " +
                         format_iso8601_utc(r.timestamp));
    }
  }
  return warnings;
}

}  // namespace cpaudit::loadstats
