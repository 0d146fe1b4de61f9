#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpaudit/corepower.hpp"
#include "cpaudit/ingest.hpp"
#include "cpaudit/loadstats.hpp"
#include "cpaudit/model.hpp"

namespace cpaudit::report {

struct AuditOptions {
  corepower::Threshold threshold;
  corepower::CompletenessPolicy policy;
  bool fully_loaded = false;
  loadstats::LoadBand band;
  std::string anonymize_salt;  // empty = no anonymization
  ingest::IngestOptions ingest;

  void validate() const;  // throws ConfigError
};

struct AuditInputs {
  std::vector<BenchmarkRecord> benchmarks;
  ingest::IngestReport benchmark_report;
  std::string benchmarks_path;
  std::vector<JobRecord> jobs;
  ingest::IngestReport job_report;
  std::string jobs_path;
  std::vector<DeclaredEntry> declared;
  ingest::IngestReport declared_report;
  std::string declared_path;
};

struct QueueRow {
  QueueAudit audit;
  std::vector<loadstats::LoadCurvePoint> load_curve;
};

struct Summary {
  std::size_t queues_total = 0;
  std::size_t queues_auditable = 0;
  std::size_t not_auditable = 0;
  std::size_t within = 0;
  std::size_t critical_positive = 0;
  std::size_t critical_negative = 0;
  std::optional<double> fraction_critical;  // over auditable queues
  std::optional<double> overall_weighted_discrepancy;
  // the same statistic grouped per site: a site counts as critical when
  // any of its auditable queues is critical
  std::size_t sites_total = 0;
  std::size_t sites_analyzed = 0;
  std::size_t sites_with_critical = 0;
  std::optional<double> fraction_critical_sites;
};

struct Metadata {
  std::string tool = "cpaudit";
  std::string version;
  std::string generated_at;
  std::string benchmarks_path;
  std::string jobs_path;
  std::string declared_path;
  double threshold = 0.25;
  std::size_t min_runs_per_model = 3;
  double min_weight_covered = 1.0;
  bool fully_loaded = false;
  loadstats::LoadBand band;
  bool anonymized = false;
  ingest::IngestReport benchmark_ingest;
  ingest::IngestReport job_ingest;
  ingest::IngestReport declared_ingest;
  std::size_t smt_warnings = 0;
};

/// Every queue seen in any input stream appears exactly once, sorted by
/// QueueId; summary counts are recounted from the rows before returning.
struct AuditReport {
  Metadata metadata;
  Summary summary;
  std::vector<QueueRow> rows;
};

AuditReport build_report(const AuditInputs& inputs, const AuditOptions& options);

/// Loads the three inputs and builds the report (anonymizing when the
/// options carry a salt).
AuditReport run_audit_files(const std::string& benchmarks_path,
                            const std::string& jobs_path,
                            const std::string& declared_path,
                            const AuditOptions& options);

/// Keyed one-way site label: stable for (site, salt), "SITE-" + 12 hex
/// digits. Distinct sites must map to distinct labels.
std::string site_label(const std::string& site, const std::string& salt);

/// Replaces site names throughout the report and re-sorts the rows.
/// Throws AnalysisError on empty salt or a label collision.
void anonymize_sites(AuditReport& report, const std::string& salt);

/// Canonical machine-readable form (golden format for tests).
std::string report_to_json_text(const AuditReport& report, int indent = 2);

void write_report_csv(std::ostream& out, const AuditReport& report);

/// Plot-ready files: relative_change.csv (one point per auditable queue,
/// marker weight = contribution normalized to [0, 1]) and a per-queue
/// load-curve CSV with declared/runtime reference values in the header.
void emit_plot_data(const AuditReport& report, const std::string& out_dir);

}  // namespace cpaudit::report
