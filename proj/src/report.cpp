#include "cpaudit/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "cpaudit/text.hpp"
#include "json.hpp"

namespace cpaudit::report {

using nlohmann::ordered_json;

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string now_iso8601() {
  return format_iso8601_utc(static_cast<UtcSeconds>(std::time(nullptr)));
}

void recount_summary(AuditReport& report) {
  Summary s;
  s.queues_total = report.rows.size();
  std::set<std::string> sites, analyzed, critical_sites;
  std::vector<QueueAudit> audits;
  for (const auto& row : report.rows) {
    const QueueAudit& a = row.audit;
    sites.insert(a.queue.site);
    if (!a.auditable()) {
      ++s.not_auditable;
      continue;
    }
    ++s.queues_auditable;
    analyzed.insert(a.queue.site);
    switch (*a.classification) {
      case Classification::Within:
        ++s.within;
        break;
      case Classification::CriticalPositive:
        ++s.critical_positive;
        critical_sites.insert(a.queue.site);
        break;
      case Classification::CriticalNegative:
        ++s.critical_negative;
        critical_sites.insert(a.queue.site);
        break;
    }
    audits.push_back(a);
  }
  if (s.queues_auditable > 0) {
    s.fraction_critical =
        static_cast<double>(s.critical_positive + s.critical_negative) /
        static_cast<double>(s.queues_auditable);
    s.overall_weighted_discrepancy = corepower::overall_weighted_discrepancy(audits);
  }
  s.sites_total = sites.size();
  s.sites_analyzed = analyzed.size();
  s.sites_with_critical = critical_sites.size();
  if (!analyzed.empty())
    s.fraction_critical_sites = static_cast<double>(critical_sites.size()) /
                                static_cast<double>(analyzed.size());
  report.summary = s;
}

}  // namespace

void AuditOptions::validate() const {
  if (!(threshold.value > 0.0)) throw ConfigError("threshold must be positive");
  if (policy.min_runs_per_model < 1)
    throw ConfigError("min_runs_per_model must be >= 1");
  if (!(policy.min_weight_covered > 0.0 && policy.min_weight_covered <= 1.0))
    throw ConfigError("min_weight_covered must lie in (0, 1]");
  for (const auto& [lo, hi] : {band.ht_off_full, band.ht_on_full}) {
    if (!(lo > 0.0 && lo < hi))
      throw ConfigError("load band edges must satisfy 0 < low < high");
  }
}

AuditReport build_report(const AuditInputs& inputs, const AuditOptions& options) {
  options.validate();
  AuditReport report;
  report.metadata.version = CPAUDIT_VERSION;
  report.metadata.generated_at = now_iso8601();
  report.metadata.benchmarks_path = inputs.benchmarks_path;
  report.metadata.jobs_path = inputs.jobs_path;
  report.metadata.declared_path = inputs.declared_path;
  report.metadata.threshold = options.threshold.value;
  report.metadata.min_runs_per_model = options.policy.min_runs_per_model;
  report.metadata.min_weight_covered = options.policy.min_weight_covered;
  report.metadata.fully_loaded = options.fully_loaded;
  report.metadata.band = options.band;
  report.metadata.benchmark_ingest = inputs.benchmark_report;
  report.metadata.job_ingest = inputs.job_report;
  report.metadata.declared_ingest = inputs.declared_report;
  report.metadata.smt_warnings =
      loadstats::smt_consistency_warnings(inputs.benchmarks).size();

  std::set<QueueId> universe;
  for (const auto& r : inputs.benchmarks) universe.insert(r.queue);
  for (const auto& j : inputs.jobs) universe.insert(j.queue);
  std::map<QueueId, double> declared;
  for (const auto& e : inputs.declared) {
    universe.insert(e.queue);
    declared[e.queue] = e.declared_corepower;
  }

  for (const auto& queue : universe) {
    QueueRow row;
    std::optional<double> declared_value;
    if (auto it = declared.find(queue); it != declared.end())
      declared_value = it->second;
    if (options.fully_loaded) {
      row.audit = loadstats::audit_fully_loaded(
          inputs.jobs, inputs.benchmarks, declared_value, options.threshold,
          options.policy, options.band, queue);
    } else {
      row.audit =
          corepower::audit_queue(inputs.jobs, inputs.benchmarks, declared_value,
                                 options.threshold, options.policy, queue);
    }
    row.load_curve = loadstats::load_performance_curve(inputs.benchmarks, queue);
    report.rows.push_back(std::move(row));
  }

  recount_summary(report);
  return report;
}

AuditReport run_audit_files(const std::string& benchmarks_path,
                            const std::string& jobs_path,
                            const std::string& declared_path,
                            const AuditOptions& options) {
  options.validate();
  AuditInputs inputs;
  auto [benchmarks, benchmark_report] =
      ingest::load_benchmark_file(benchmarks_path, options.ingest);
  inputs.benchmarks = std::move(benchmarks);
  inputs.benchmark_report = benchmark_report;
  inputs.benchmarks_path = benchmarks_path;
  auto [jobs, job_report] = ingest::load_job_file(jobs_path, options.ingest);
  inputs.jobs = std::move(jobs);
  inputs.job_report = job_report;
  inputs.jobs_path = jobs_path;
  auto [entries, declared_report] = ingest::load_declared_file(declared_path);
  inputs.declared = std::move(entries);
  inputs.declared_report = declared_report;
  inputs.declared_path = declared_path;

  AuditReport report = build_report(inputs, options);
  if (!options.anonymize_salt.empty())
    anonymize_sites(report, options.anonymize_salt);
  return report;
}

std::string site_label(const std::string& site, const std::string& salt) {
  if (salt.empty()) throw AnalysisError("anonymization salt must be non-empty");
  std::string material = salt;
  material.push_back('\x1e');
  material += site;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1 ||
      len < 6)
    throw AnalysisError("hashing failed");
  static const char* hex = "0123456789abcdef";
  std::string label = "SITE-";
  for (int i = 0; i < 6; ++i) {
    label.push_back(hex[digest[i] >> 4]);
    label.push_back(hex[digest[i] & 0xf]);
  }
  return label;
}

void anonymize_sites(AuditReport& report, const std::string& salt) {
  std::map<std::string, std::string> mapping;
  std::set<std::string> labels;
  for (const auto& row : report.rows) {
    const std::string& site = row.audit.queue.site;
    if (mapping.contains(site)) continue;
    std::string label = site_label(site, salt);
    if (!labels.insert(label).second)
      throw AnalysisError("site label collision on " + label);
    mapping[site] = label;
  }
  for (auto& row : report.rows) row.audit.queue.site = mapping[row.audit.queue.site];
  std::sort(report.rows.begin(), report.rows.end(),
            [](const QueueRow& a, const QueueRow& b) {
              return a.audit.queue < b.audit.queue;
            });
  report.metadata.anonymized = true;
}

namespace {

ordered_json ingest_to_json(const ingest::IngestReport& r) {
  ordered_json j;
  j["accepted"] = r.accepted;
  j["rejected"] = r.rejected;
  j["rejection_reasons"] = ordered_json::object();
  for (const auto& [reason, count] : r.rejection_reasons)
    j["rejection_reasons"][reason] = count;
  j["distinct_queues"] = r.distinct_queues;
  j["distinct_cpu_models"] = r.distinct_cpu_models;
  if (r.time_span) {
    j["time_span"] = {format_iso8601_utc(r.time_span->first),
                      format_iso8601_utc(r.time_span->second)};
  } else {
    j["time_span"] = nullptr;
  }
  return j;
}

ordered_json row_to_json(const QueueRow& row) {
  const QueueAudit& a = row.audit;
  ordered_json j;
  j["site"] = a.queue.site;
  j["queue"] = a.queue.queue_name;
  j["auditable"] = a.auditable();
  if (!a.auditable()) j["reason"] = a.failure_reason.value_or("unknown");
  j["contribution"] = a.contribution;
  j["complete_weights"] = a.complete_weights;
  j["weights"] = ordered_json::object();
  for (const auto& [model, w] : a.weights) j["weights"][model.canonical_name] = w;
  j["per_model_runtime"] = ordered_json::object();
  for (const auto& [model, stats] : a.per_model_runtime) {
    j["per_model_runtime"][model.canonical_name] = {
        {"mean_corepower", stats.mean_corepower},
        {"runs", stats.runs},
        {"stddev", stats.stddev}};
  }
  j["benchmark_runs"] = a.benchmark_runs();
  j["runtime_corepower"] =
      a.runtime_corepower ? ordered_json(*a.runtime_corepower) : ordered_json();
  j["declared_corepower"] =
      a.declared_corepower ? ordered_json(*a.declared_corepower) : ordered_json();
  j["relative_change"] =
      a.relative_change ? ordered_json(*a.relative_change) : ordered_json();
  j["classification"] =
      a.classification ? ordered_json(to_string(*a.classification)) : ordered_json();
  return j;
}

}  // namespace

std::string report_to_json_text(const AuditReport& report, int indent) {
  ordered_json root;
  ordered_json& meta = root["metadata"];
  meta["tool"] = report.metadata.tool;
  meta["version"] = report.metadata.version;
  meta["generated_at"] = report.metadata.generated_at;
  meta["benchmarks"] = report.metadata.benchmarks_path;
  meta["jobs"] = report.metadata.jobs_path;
  meta["declared"] = report.metadata.declared_path;
  meta["threshold"] = report.metadata.threshold;
  meta["min_runs_per_model"] = report.metadata.min_runs_per_model;
  meta["min_weight_covered"] = report.metadata.min_weight_covered;
  meta["fully_loaded"] = report.metadata.fully_loaded;
  meta["band"] = {
      {"ht_off", {report.metadata.band.ht_off_full.first,
                  report.metadata.band.ht_off_full.second}},
      {"ht_on", {report.metadata.band.ht_on_full.first,
                 report.metadata.band.ht_on_full.second}}};
  meta["anonymized"] = report.metadata.anonymized;
  meta["ingest"] = {{"benchmarks", ingest_to_json(report.metadata.benchmark_ingest)},
                    {"jobs", ingest_to_json(report.metadata.job_ingest)},
                    {"declared", ingest_to_json(report.metadata.declared_ingest)}};
  meta["smt_warnings"] = report.metadata.smt_warnings;

  ordered_json& summary = root["summary"];
  const Summary& s = report.summary;
  summary["queues_total"] = s.queues_total;
  summary["queues_auditable"] = s.queues_auditable;
  summary["not_auditable"] = s.not_auditable;
  summary["within"] = s.within;
  summary["critical_positive"] = s.critical_positive;
  summary["critical_negative"] = s.critical_negative;
  summary["fraction_critical"] =
      s.fraction_critical ? ordered_json(*s.fraction_critical) : ordered_json();
  summary["overall_weighted_discrepancy"] =
      s.overall_weighted_discrepancy
          ? ordered_json(*s.overall_weighted_discrepancy)
          : ordered_json();
  summary["sites_total"] = s.sites_total;
  summary["sites_analyzed"] = s.sites_analyzed;
  summary["sites_with_critical"] = s.sites_with_critical;
  summary["fraction_critical_sites"] =
      s.fraction_critical_sites ? ordered_json(*s.fraction_critical_sites)
                                : ordered_json();

  root["queues"] = ordered_json::array();
  for (const auto& row : report.rows) root["queues"].push_back(row_to_json(row));
  return root.dump(indent) + "\n";
}

void write_report_csv(std::ostream& out, const AuditReport& report) {
  out << "# tool = " << report.metadata.tool << " "
      << report.metadata.version << "\n";
  out << "# threshold = " << text::format_double(report.metadata.threshold)
      << "\n";
  out << "site,queue,auditable,classification,relative_change,"
         "runtime_corepower,declared_corepower,contribution,complete_weights,"
         "benchmark_runs,reason\n";
  for (const auto& row : report.rows) {
    const QueueAudit& a = row.audit;
    out << csv_escape(a.queue.site) << ',' << csv_escape(a.queue.queue_name)
        << ',' << (a.auditable() ? "true" : "false") << ','
        << (a.classification ? to_string(*a.classification) : "") << ','
        << (a.relative_change ? text::format_double(*a.relative_change) : "")
        << ','
        << (a.runtime_corepower ? text::format_double(*a.runtime_corepower) : "")
        << ','
        << (a.declared_corepower ? text::format_double(*a.declared_corepower)
                                 : "")
        << ',' << text::format_double(a.contribution) << ','
        << (a.complete_weights ? "true" : "false") << ',' << a.benchmark_runs()
        << ',' << csv_escape(a.failure_reason.value_or("")) << "\n";
  }
}

namespace {

std::string sanitize_filename(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

}  // namespace

void emit_plot_data(const AuditReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);

  double max_contribution = 0.0;
  for (const auto& row : report.rows)
    if (row.audit.auditable())
      max_contribution = std::max(max_contribution, row.audit.contribution);

  auto scatter = open_for_write(fs::path(out_dir) / "relative_change.csv");
  scatter << "# threshold = " << text::format_double(report.metadata.threshold)
          << "\n";
  scatter << "site,queue,relative_change,marker_weight,classification\n";
  for (const auto& row : report.rows) {
    const QueueAudit& a = row.audit;
    if (!a.auditable()) continue;
    const double marker =
        max_contribution > 0.0 ? a.contribution / max_contribution : 0.0;
    scatter << csv_escape(a.queue.site) << ',' << csv_escape(a.queue.queue_name)
            << ',' << text::format_double(*a.relative_change) << ','
            << text::format_double(marker) << ','
            << to_string(*a.classification) << "\n";
  }

  for (const auto& row : report.rows) {
    if (row.load_curve.empty()) continue;
    const QueueAudit& a = row.audit;
    const std::string name = "load_curve_" + sanitize_filename(a.queue.site) +
                             "_" + sanitize_filename(a.queue.queue_name) +
                             ".csv";
    auto curve = open_for_write(fs::path(out_dir) / name);
    curve << "# site = " << a.queue.site << "\n";
    curve << "# queue = " << a.queue.queue_name << "\n";
    curve << "# declared_corepower = "
          << (a.declared_corepower ? text::format_double(*a.declared_corepower)
                                   : "n/a")
          << "\n";
    curve << "# runtime_corepower = "
          << (a.runtime_corepower ? text::format_double(*a.runtime_corepower)
                                  : "n/a")
          << "\n";
    curve << "cpu_model,load_per_core,corepower\n";
    for (const auto& p : row.load_curve) {
      curve << csv_escape(p.cpu_model.canonical_name) << ','
            << text::format_double(p.load_per_core) << ','
            << text::format_double(p.corepower) << "\n";
    }
  }
}

}  // namespace cpaudit::report
