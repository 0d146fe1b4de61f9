#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpaudit/fleetsim.hpp"
#include "cpaudit/report.hpp"
#include "cpaudit/text.hpp"

namespace {

// 0 success, 1 usage/config error, 2 fatal ingest error, 3 no auditable
// queues. Discrepancy findings never change the exit status.
constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kIngestError = 2;
constexpr int kNoAuditableQueues = 3;

struct AuditArgs {
  std::string benchmarks;
  std::string jobs;
  std::string declared;
  double threshold = 0.25;
  std::size_t min_runs = 3;
  double min_weight_covered = 1.0;
  bool fully_loaded = false;
  std::vector<double> band_low{0.9, 1.8};   // per SMT state: off, on
  std::vector<double> band_high{1.1, 2.2};  // per SMT state: off, on
  std::string anonymize_salt;
  std::string out_dir;
  std::string format = "json";
  bool exact_cpu_models = false;
};

cpaudit::report::AuditOptions make_options(const AuditArgs& args) {
  using cpaudit::ConfigError;
  cpaudit::report::AuditOptions options;
  if (!(args.threshold > 0.0)) throw ConfigError("--threshold must be positive");
  if (args.min_runs < 1) throw ConfigError("--min-runs must be >= 1");
  if (!(args.min_weight_covered > 0.0 && args.min_weight_covered <= 1.0))
    throw ConfigError("--min-weight-covered must lie in (0, 1]");
  options.threshold.value = args.threshold;
  options.policy.min_runs_per_model = args.min_runs;
  options.policy.min_weight_covered = args.min_weight_covered;
  options.fully_loaded = args.fully_loaded;

  auto band_value = [](const std::vector<double>& v, bool smt_on) {
    // one value applies to the SMT-off state, the SMT-on mark is twice it
    if (v.size() == 1) return smt_on ? 2.0 * v[0] : v[0];
    return smt_on ? v[1] : v[0];
  };
  options.band.ht_off_full = {band_value(args.band_low, false),
                              band_value(args.band_high, false)};
  options.band.ht_on_full = {band_value(args.band_low, true),
                             band_value(args.band_high, true)};
  for (const auto& [lo, hi] :
       {options.band.ht_off_full, options.band.ht_on_full}) {
    if (!(lo > 0.0 && lo < hi))
      throw ConfigError("--band-low/--band-high must satisfy 0 < low < high");
  }
  options.anonymize_salt = args.anonymize_salt;
  options.ingest.normalize_models = !args.exact_cpu_models;
  return options;
}

void print_summary(std::ostream& out, const cpaudit::report::AuditReport& r) {
  const auto& s = r.summary;
  out << "queues: " << s.queues_total << " total, " << s.queues_auditable
      << " auditable, " << s.not_auditable << " not auditable\n";
  out << "classification: " << s.within << " within, " << s.critical_positive
      << " critical-positive, " << s.critical_negative
      << " critical-negative\n";
  if (s.fraction_critical)
    out << "fraction critical (queues): "
        << cpaudit::text::format_double(*s.fraction_critical) << "\n";
  out << "sites: " << s.sites_total << " total, " << s.sites_analyzed
      << " analyzed, " << s.sites_with_critical << " with critical queues";
  if (s.fraction_critical_sites)
    out << " (fraction " << cpaudit::text::format_double(*s.fraction_critical_sites)
        << ")";
  out << "\n";
  if (s.overall_weighted_discrepancy)
    out << "overall weighted discrepancy: "
        << cpaudit::text::format_double(*s.overall_weighted_discrepancy) << "\n";
}

int run_audit(const AuditArgs& args) {
  namespace fs = std::filesystem;
  const auto options = make_options(args);

  cpaudit::report::AuditInputs inputs;
  {
    auto [records, rep] =
        cpaudit::ingest::load_benchmark_file(args.benchmarks, options.ingest);
    inputs.benchmarks = std::move(records);
    inputs.benchmark_report = rep;
    inputs.benchmarks_path = args.benchmarks;
  }
  {
    auto [jobs, rep] = cpaudit::ingest::load_job_file(args.jobs, options.ingest);
    inputs.jobs = std::move(jobs);
    inputs.job_report = rep;
    inputs.jobs_path = args.jobs;
  }
  {
    auto [entries, rep] = cpaudit::ingest::load_declared_file(args.declared);
    inputs.declared = std::move(entries);
    inputs.declared_report = rep;
    inputs.declared_path = args.declared;
  }
  const auto warnings =
      cpaudit::loadstats::smt_consistency_warnings(inputs.benchmarks);
  auto report = cpaudit::report::build_report(inputs, options);
  if (!options.anonymize_salt.empty())
    cpaudit::report::anonymize_sites(report, options.anonymize_salt);
  for (std::size_t i = 0; i < warnings.size() && i < 5; ++i)
    std::cerr << "warning: " << warnings[i] << "\n";
  if (warnings.size() > 5)
    std::cerr << "warning: ... " << warnings.size() - 5
              << " more SMT consistency warnings\n";

  if (!args.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) throw cpaudit::ConfigError("cannot create output directory: " +
                                       args.out_dir);
    const fs::path report_path =
        fs::path(args.out_dir) /
        (args.format == "csv" ? "report.csv" : "report.json");
    std::ofstream out(report_path);
    if (!out)
      throw cpaudit::ConfigError("cannot write file: " + report_path.string());
    if (args.format == "csv")
      cpaudit::report::write_report_csv(out, report);
    else
      out << cpaudit::report::report_to_json_text(report);
    cpaudit::report::emit_plot_data(report, args.out_dir);
    print_summary(std::cout, report);
    std::cout << "report written to " << report_path.string() << "\n";
  } else {
    if (args.format == "csv")
      cpaudit::report::write_report_csv(std::cout, report);
    else
      std::cout << cpaudit::report::report_to_json_text(report);
    print_summary(std::cerr, report);
  }

  if (report.summary.queues_auditable == 0) {
    std::cerr << "error: no auditable queues\n";
    return kNoAuditableQueues;
  }
  return kOk;
}

int run_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_dir) {
  const auto config = cpaudit::fleetsim::SimConfig::from_file(config_path);
  const auto fleet = cpaudit::fleetsim::generate_fleet(config, seed);
  const auto output = cpaudit::fleetsim::simulate(
      fleet, config.duration_hours, config.cadence_hours, config.noise);
  cpaudit::fleetsim::write_sim_output(output, out_dir);
  std::cout << "fleet: " << fleet.queue_count() << " queues across "
            << fleet.sites.size() << " sites\n";
  std::cout << "benchmarks: " << output.benchmark_records.size()
            << " records, jobs: " << output.job_records.size()
            << " records, declared: " << output.declared.size() << " rows\n";
  std::cout << "written to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validates declared CPU corepower of batch queues against "
               "benchmark-observed runtime corepower; includes a synthetic "
               "fleet simulator."};
  app.require_subcommand(1);

  AuditArgs audit_args;
  auto* audit = app.add_subcommand(
      "audit", "Run the corepower audit over benchmark, job and registry files");
  audit->add_option("--benchmarks", audit_args.benchmarks,
                    "Benchmark records (JSONL)")->required();
  audit->add_option("--jobs", audit_args.jobs, "Job accounting (JSONL)")
      ->required();
  audit->add_option("--declared", audit_args.declared,
                    "Declared corepower registry (CSV)")->required();
  audit->add_option("--threshold", audit_args.threshold,
                    "Critical discrepancy threshold (fraction)")
      ->capture_default_str();
  audit->add_option("--min-runs", audit_args.min_runs,
                    "Benchmark runs required per CPU model")
      ->capture_default_str();
  audit->add_option("--min-weight-covered", audit_args.min_weight_covered,
                    "Weight that benchmarked models must cover")
      ->capture_default_str();
  audit->add_flag("--fully-loaded", audit_args.fully_loaded,
                  "Audit only measurements taken on fully loaded servers");
  audit->add_option("--band-low", audit_args.band_low,
                    "Full-load band lower edge(s): SMT-off [SMT-on]")
      ->expected(1, 2)->capture_default_str();
  audit->add_option("--band-high", audit_args.band_high,
                    "Full-load band upper edge(s): SMT-off [SMT-on]")
      ->expected(1, 2)->capture_default_str();
  audit->add_flag("--exact-cpu-models", audit_args.exact_cpu_models,
                  "Match CPU model strings exactly instead of normalizing");
  audit->add_option("--anonymize-salt", audit_args.anonymize_salt,
                    "Replace site names with stable keyed labels");
  audit->add_option("--out", audit_args.out_dir,
                    "Output directory for the report and plot data");
  audit->add_option("--format", audit_args.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::string sim_config;
  std::uint64_t sim_seed = 42;
  std::string sim_out;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic fleet and its telemetry files");
  simulate->add_option("--config", sim_config, "Fleet config (JSON)")
      ->required();
  simulate->add_option("--seed", sim_seed, "Simulation seed")
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  auto* version = app.add_subcommand("version", "Print the tool version");

  try {
    app.parse(argc, argv);
    if (audit->parsed()) return run_audit(audit_args);
    if (simulate->parsed()) return run_simulate(sim_config, sim_seed, sim_out);
    if (version->parsed()) {
      std::cout << "cpaudit " << CPAUDIT_VERSION << "\n";
      return kOk;
    }
    return kUsageError;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  } catch (const cpaudit::IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIngestError;
  } catch (const cpaudit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
