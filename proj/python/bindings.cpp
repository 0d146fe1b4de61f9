#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cpaudit/corepower.hpp"
#include "cpaudit/fleetsim.hpp"
#include "cpaudit/ingest.hpp"
#include "cpaudit/loadstats.hpp"
#include "cpaudit/report.hpp"

namespace py = pybind11;
using namespace cpaudit;

namespace {

std::string audit_files(const std::string& benchmarks, const std::string& jobs,
                        const std::string& declared, double threshold,
                        std::size_t min_runs, double min_weight_covered,
                        bool fully_loaded,
                        std::pair<double, double> band_off,
                        std::pair<double, double> band_on,
                        const std::string& anonymize_salt,
                        bool exact_cpu_models) {
  report::AuditOptions options;
  options.threshold.value = threshold;
  options.policy.min_runs_per_model = min_runs;
  options.policy.min_weight_covered = min_weight_covered;
  options.fully_loaded = fully_loaded;
  options.band.ht_off_full = band_off;
  options.band.ht_on_full = band_on;
  options.anonymize_salt = anonymize_salt;
  options.ingest.normalize_models = !exact_cpu_models;
  const auto rep = report::run_audit_files(benchmarks, jobs, declared, options);
  return report::report_to_json_text(rep);
}

py::dict simulate_to_dir(const std::string& config_json, std::uint64_t seed,
                         const std::string& out_dir) {
  const auto config = fleetsim::SimConfig::from_json_text(config_json);
  const auto fleet = fleetsim::generate_fleet(config, seed);
  const auto output = fleetsim::simulate(fleet, config.duration_hours,
                                         config.cadence_hours, config.noise);
  fleetsim::write_sim_output(output, out_dir);
  py::dict summary;
  summary["queues"] = fleet.queue_count();
  summary["sites"] = fleet.sites.size();
  summary["benchmark_records"] = output.benchmark_records.size();
  summary["job_records"] = output.job_records.size();
  summary["declared_rows"] = output.declared.size();
  return summary;
}

std::map<std::string, double> compute_weights_py(
    const std::vector<std::tuple<std::string, double, int>>& jobs) {
  const QueueId queue{"site", "queue"};
  std::vector<JobRecord> records;
  records.reserve(jobs.size());
  for (const auto& [model, walltime_s, cores] : jobs)
    records.push_back({queue, CpuModelId{model}, walltime_s, cores});
  std::map<std::string, double> out;
  for (const auto& [model, w] : corepower::compute_weights(records, queue))
    out[model.canonical_name] = w;
  return out;
}

double queue_runtime_corepower_py(
    const std::map<std::string, double>& weights,
    const std::map<std::string, double>& per_model_mean) {
  std::map<CpuModelId, double> w;
  for (const auto& [model, value] : weights) w[CpuModelId{model}] = value;
  std::map<CpuModelId, ModelRuntime> p;
  for (const auto& [model, mean] : per_model_mean)
    p[CpuModelId{model}] = ModelRuntime{mean, 1, 0.0};
  return corepower::queue_runtime_corepower(w, p);
}

double load_correlation_py(const std::vector<std::pair<double, double>>& points,
                           const std::string& kind) {
  std::vector<loadstats::LoadCurvePoint> curve;
  curve.reserve(points.size());
  for (const auto& [load, cp] : points)
    curve.push_back({CpuModelId{"model"}, load, cp});
  const auto k = kind == "spearman" ? loadstats::CorrelationKind::Spearman
                                    : loadstats::CorrelationKind::Pearson;
  return loadstats::load_correlation(curve, k);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Corepower audit toolkit: declared vs runtime corepower of batch "
            "queues, plus a synthetic fleet simulator.";
  m.attr("__version__") = CPAUDIT_VERSION;

  py::register_exception<IngestError>(m, "IngestError");
  py::register_exception<AnalysisError>(m, "AnalysisError");
  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("normalize_cpu_model",
        [](const std::string& raw) {
          return ingest::normalize_cpu_model(raw).canonical_name;
        },
        py::arg("raw"), "Canonical form of a CPU model string.");

  m.def("relative_change",
        [](double runtime, double declared) {
          return corepower::relative_change(runtime, declared);
        },
        py::arg("runtime"), py::arg("declared"),
        "runtime / declared - 1; raises AnalysisError for declared <= 0.");

  m.def("classify",
        [](double rc, double threshold) {
          return to_string(corepower::classify(rc, {threshold}));
        },
        py::arg("relative_change"), py::arg("threshold") = 0.25);

  m.def("compute_weights", &compute_weights_py, py::arg("jobs"),
        "Per-model weights from (cpu_model, walltime_s, cores) tuples.");

  m.def("queue_runtime_corepower", &queue_runtime_corepower_py,
        py::arg("weights"), py::arg("per_model_mean"),
        "Weighted mean corepower, renormalized over the covered models.");

  m.def("load_correlation", &load_correlation_py, py::arg("points"),
        py::arg("kind") = "pearson",
        "Correlation of (load_per_core, corepower) points.");

  m.def("audit_files", &audit_files, py::arg("benchmarks"), py::arg("jobs"),
        py::arg("declared"), py::arg("threshold") = 0.25,
        py::arg("min_runs") = 3, py::arg("min_weight_covered") = 1.0,
        py::arg("fully_loaded") = false,
        py::arg("band_off") = std::pair<double, double>{0.9, 1.1},
        py::arg("band_on") = std::pair<double, double>{1.8, 2.2},
        py::arg("anonymize_salt") = std::string{},
        py::arg("exact_cpu_models") = false,
        "Run the audit over the three input files; returns the JSON report.");

  m.def("simulate", &simulate_to_dir, py::arg("config_json"), py::arg("seed"),
        py::arg("out_dir"),
        "Generate a synthetic fleet and write its telemetry files.");
}
