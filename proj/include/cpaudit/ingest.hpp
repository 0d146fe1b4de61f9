#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpaudit/model.hpp"

namespace cpaudit::ingest {

/// Per-stream ingestion summary. accepted + rejected equals the number of
/// input lines, not counting blank lines and `#` comments.
struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejection_reasons;
  std::size_t distinct_queues = 0;
  std::size_t distinct_cpu_models = 0;
  std::optional<std::pair<UtcSeconds, UtcSeconds>> time_span;

  bool operator==(const IngestReport&) const = default;
};

struct IngestOptions {
  /// When false, CPU model strings are matched exactly as written
  /// (only trimmed); the default canonicalizes them.
  bool normalize_models = true;
};

/// Canonical form: trademark glyphs and frequency suffixes stripped,
/// standalone "cpu"/"processor" tokens dropped, whitespace collapsed,
/// case-folded. Idempotent. Throws IngestError on empty input.
CpuModelId normalize_cpu_model(const std::string& raw);

std::pair<std::vector<BenchmarkRecord>, IngestReport> parse_benchmark_records(
    std::istream& in, const IngestOptions& options = {});

std::pair<std::vector<JobRecord>, IngestReport> parse_job_accounting(
    std::istream& in, const IngestOptions& options = {});

/// Registry snapshot CSV. Duplicate (site, queue) keys are a fatal
/// IngestError; rows with non-positive corepower are rejected per row.
std::pair<std::vector<DeclaredEntry>, IngestReport> parse_declared(
    std::istream& in, const IngestOptions& options = {});

// File variants; unreadable path -> IngestError.
std::pair<std::vector<BenchmarkRecord>, IngestReport> load_benchmark_file(
    const std::string& path, const IngestOptions& options = {});
std::pair<std::vector<JobRecord>, IngestReport> load_job_file(
    const std::string& path, const IngestOptions& options = {});
std::pair<std::vector<DeclaredEntry>, IngestReport> load_declared_file(
    const std::string& path, const IngestOptions& options = {});

// Writers emit exactly the formats the parsers accept, so accepted
// records round-trip without loss.
void write_benchmark_records(std::ostream& out,
                             std::span<const BenchmarkRecord> records);
void write_job_records(std::ostream& out, std::span<const JobRecord> records);
void write_declared(std::ostream& out, std::span<const DeclaredEntry> entries);

}  // namespace cpaudit::ingest
