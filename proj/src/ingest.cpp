#include "cpaudit/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "cpaudit/text.hpp"
#include "json.hpp"

namespace cpaudit::ingest {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Thrown for one bad line; converted to a rejection count, never fatal.
struct LineReject {
  std::string reason;
};

bool is_freq_token(const std::string& tok) {
  if (tok.size() < 4) return false;
  std::string unit = tok.substr(tok.size() - 3);
  if (unit != "ghz" && unit != "mhz") return false;
  const std::string num = tok.substr(0, tok.size() - 3);
  bool saw_digit = false, saw_dot = false;
  for (char c : num) {
    if (c >= '0' && c <= '9') {
      saw_digit = true;
    } else if (c == '.' && !saw_dot) {
      saw_dot = true;
    } else {
      return false;
    }
  }
  return saw_digit;
}

bool is_number_token(const std::string& tok) {
  bool saw_digit = false, saw_dot = false;
  for (char c : tok) {
    if (c >= '0' && c <= '9') {
      saw_digit = true;
    } else if (c == '.' && !saw_dot) {
      saw_dot = true;
    } else {
      return false;
    }
  }
  return saw_digit;
}

// Strips "(R)", "(TM)", "(C)" and the corresponding unicode glyphs.
std::string strip_trademark_marks(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '(') {
      std::size_t close = s.find(')', i);
      if (close != std::string::npos && close - i <= 3) {
        std::string inner = text::to_lower(s.substr(i + 1, close - i - 1));
        if (inner == "r" || inner == "tm" || inner == "c") {
          out.push_back(' ');
          i = close + 1;
          continue;
        }
      }
    }
    // UTF-8: ® = C2 AE, © = C2 A9, ™ = E2 84 A2
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == 0xC2 && i + 1 < s.size()) {
      unsigned char n = static_cast<unsigned char>(s[i + 1]);
      if (n == 0xAE || n == 0xA9) {
        out.push_back(' ');
        i += 2;
        continue;
      }
    }
    if (c == 0xE2 && i + 2 < s.size() &&
        static_cast<unsigned char>(s[i + 1]) == 0x84 &&
        static_cast<unsigned char>(s[i + 2]) == 0xA2) {
      out.push_back(' ');
      i += 3;
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

const char* kBenchmarkRequired[] = {"timestamp",      "site",
                                    "queue",          "cpu_model",
                                    "score_hs23",     "allocated_cores",
                                    "physical_cores", "online_cores",
                                    "smt_enabled",    "load_avg"};
const char* kJobRequired[] = {"site", "queue", "cpu_model", "walltime_s",
                              "cores"};

json parse_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw LineReject{"invalid json"};
  return j;
}

template <std::size_t N>
void require_fields(const json& j, const char* (&fields)[N]) {
  for (const char* f : fields) {
    if (!j.contains(f)) throw LineReject{std::string("missing field: ") + f};
  }
}

std::string get_string(const json& j, const char* key) {
  if (!j.at(key).is_string())
    throw LineReject{std::string("invalid field: ") + key};
  return j.at(key).get<std::string>();
}

double get_number(const json& j, const char* key) {
  if (!j.at(key).is_number())
    throw LineReject{std::string("invalid field: ") + key};
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key) {
  if (!j.at(key).is_number_integer())
    throw LineReject{std::string("invalid field: ") + key};
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const char* key) {
  if (!j.at(key).is_boolean())
    throw LineReject{std::string("invalid field: ") + key};
  return j.at(key).get<bool>();
}

QueueId read_queue_id(const json& j) {
  QueueId q{text::trim(get_string(j, "site")), text::trim(get_string(j, "queue"))};
  if (q.site.empty()) throw LineReject{"empty site"};
  if (q.queue_name.empty()) throw LineReject{"empty queue"};
  return q;
}

CpuModelId read_cpu_model(const json& j, const IngestOptions& options) {
  std::string raw = text::trim(get_string(j, "cpu_model"));
  if (raw.empty()) throw LineReject{"empty cpu_model"};
  if (options.normalize_models) return normalize_cpu_model(raw);
  return CpuModelId{raw};
}

BenchmarkRecord read_benchmark(const json& j, const IngestOptions& options) {
  require_fields(j, kBenchmarkRequired);
  BenchmarkRecord r;
  r.queue = read_queue_id(j);
  r.cpu_model = read_cpu_model(j, options);
  try {
    r.timestamp = parse_iso8601_utc(get_string(j, "timestamp"));
  } catch (const IngestError&) {
    throw LineReject{"timestamp not ISO-8601 UTC"};
  }
  r.score = get_number(j, "score_hs23");
  r.allocated_cores = get_int(j, "allocated_cores");
  r.physical_cores = get_int(j, "physical_cores");
  r.online_cores = get_int(j, "online_cores");
  r.smt_enabled = get_bool(j, "smt_enabled");
  r.load_avg = get_number(j, "load_avg");
  if (j.contains("cpu_freq_mhz")) r.cpu_freq_mhz = get_number(j, "cpu_freq_mhz");
  if (j.contains("mem_used_gib")) r.mem_used_gib = get_number(j, "mem_used_gib");

  if (!(r.score > 0)) throw LineReject{"score > 0"};
  if (r.allocated_cores < 1) throw LineReject{"allocated_cores >= 1"};
  if (r.physical_cores < 1) throw LineReject{"physical_cores >= 1"};
  if (r.online_cores < r.physical_cores)
    throw LineReject{"online_cores >= physical_cores"};
  if (r.smt_enabled && r.online_cores <= r.physical_cores)
    throw LineReject{"smt_enabled implies online_cores > physical_cores"};
  if (r.load_avg < 0) throw LineReject{"load_avg >= 0"};
  return r;
}

JobRecord read_job(const json& j, const IngestOptions& options) {
  require_fields(j, kJobRequired);
  JobRecord r;
  r.queue = read_queue_id(j);
  r.cpu_model = read_cpu_model(j, options);
  r.walltime_s = get_number(j, "walltime_s");
  r.cores = get_int(j, "cores");
  if (!(r.walltime_s > 0)) throw LineReject{"walltime > 0"};
  if (r.cores < 1) throw LineReject{"cores >= 1"};
  return r;
}

bool skippable(const std::string& line) {
  const std::string t = text::trim(line);
  return t.empty() || t[0] == '#';
}

double parse_csv_double(const std::string& cell) {
  const std::string t = text::trim(cell);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw LineReject{"invalid declared_corepower"};
  return v;
}

}  // namespace

CpuModelId normalize_cpu_model(const std::string& raw) {
  std::string s = text::trim(raw);
  if (s.empty()) throw IngestError("cpu model string is empty");
  s = strip_trademark_marks(s);
  s = text::to_lower(s);
  for (char& c : s)
    if (c == '@') c = ' ';

  std::vector<std::string> kept;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) {
    if (tok == "cpu" || tok == "processor") continue;
    if (is_freq_token(tok)) continue;
    if ((tok == "ghz" || tok == "mhz") && !kept.empty() &&
        is_number_token(kept.back())) {
      kept.pop_back();
      continue;
    }
    kept.push_back(tok);
  }
  std::string out;
  for (const auto& t : kept) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  if (out.empty()) throw IngestError("cpu model string is empty after normalization");
  return CpuModelId{out};
}

namespace {

template <typename Record, typename ReadFn>
std::pair<std::vector<Record>, IngestReport> parse_jsonl(std::istream& in,
                                                         ReadFn read_fn) {
  if (!in.good()) throw IngestError("unreadable input stream");
  std::vector<Record> records;
  IngestReport report;
  std::set<QueueId> queues;
  std::set<CpuModelId> models;
  std::string line;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    try {
      Record r = read_fn(parse_json_line(line));
      queues.insert(r.queue);
      models.insert(r.cpu_model);
      records.push_back(std::move(r));
      ++report.accepted;
    } catch (const LineReject& rej) {
      ++report.rejected;
      ++report.rejection_reasons[rej.reason];
    }
  }
  if (in.bad()) throw IngestError("error while reading input stream");
  report.distinct_queues = queues.size();
  report.distinct_cpu_models = models.size();
  return {std::move(records), std::move(report)};
}

}  // namespace

std::pair<std::vector<BenchmarkRecord>, IngestReport> parse_benchmark_records(
    std::istream& in, const IngestOptions& options) {
  auto result = parse_jsonl<BenchmarkRecord>(
      in, [&](const json& j) { return read_benchmark(j, options); });
  UtcSeconds first = 0, last = 0;
  bool any = false;
  for (const auto& r : result.first) {
    if (!any || r.timestamp < first) first = r.timestamp;
    if (!any || r.timestamp > last) last = r.timestamp;
    any = true;
  }
  if (any) result.second.time_span = {first, last};
  return result;
}

std::pair<std::vector<JobRecord>, IngestReport> parse_job_accounting(
    std::istream& in, const IngestOptions& options) {
  return parse_jsonl<JobRecord>(
      in, [&](const json& j) { return read_job(j, options); });
}

std::pair<std::vector<DeclaredEntry>, IngestReport> parse_declared(
    std::istream& in, const IngestOptions& /*options*/) {
  if (!in.good()) throw IngestError("unreadable input stream");
  std::vector<DeclaredEntry> entries;
  IngestReport report;
  std::set<QueueId> seen;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    if (!header_seen) {
      if (text::trim(line) != "site,queue,declared_corepower,source")
        throw IngestError("declared registry: expected header "
                          "'site,queue,declared_corepower,source'");
      header_seen = true;
      continue;
    }
    try {
      auto cells = text::split(line, ',');
      if (cells.size() != 4) throw LineReject{"malformed row"};
      DeclaredEntry e;
      e.queue = QueueId{text::trim(cells[0]), text::trim(cells[1])};
      if (e.queue.site.empty()) throw LineReject{"empty site"};
      if (e.queue.queue_name.empty()) throw LineReject{"empty queue"};
      e.declared_corepower = parse_csv_double(cells[2]);
      if (!(e.declared_corepower > 0)) throw LineReject{"declared_corepower > 0"};
      e.source = text::trim(cells[3]);
      if (!seen.insert(e.queue).second)
        throw IngestError("declared registry: duplicate queue key " +
                          e.queue.str());
      entries.push_back(std::move(e));
      ++report.accepted;
    } catch (const LineReject& rej) {
      ++report.rejected;
      ++report.rejection_reasons[rej.reason];
    }
  }
  if (in.bad()) throw IngestError("error while reading input stream");
  report.distinct_queues = seen.size();
  return {std::move(entries), std::move(report)};
}

namespace {

template <typename Loader>
auto load_file(const std::string& path, Loader loader) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open file: " + path);
  return loader(in);
}

}  // namespace

std::pair<std::vector<BenchmarkRecord>, IngestReport> load_benchmark_file(
    const std::string& path, const IngestOptions& options) {
  return load_file(path, [&](std::istream& in) {
    return parse_benchmark_records(in, options);
  });
}

std::pair<std::vector<JobRecord>, IngestReport> load_job_file(
    const std::string& path, const IngestOptions& options) {
  return load_file(
      path, [&](std::istream& in) { return parse_job_accounting(in, options); });
}

std::pair<std::vector<DeclaredEntry>, IngestReport> load_declared_file(
    const std::string& path, const IngestOptions& options) {
  return load_file(
      path, [&](std::istream& in) { return parse_declared(in, options); });
}

void write_benchmark_records(std::ostream& out,
                             std::span<const BenchmarkRecord> records) {
  for (const auto& r : records) {
    ordered_json j;
    j["timestamp"] = format_iso8601_utc(r.timestamp);
    j["site"] = r.queue.site;
    j["queue"] = r.queue.queue_name;
    j["cpu_model"] = r.cpu_model.canonical_name;
    j["score_hs23"] = r.score;
    j["allocated_cores"] = r.allocated_cores;
    j["physical_cores"] = r.physical_cores;
    j["online_cores"] = r.online_cores;
    j["smt_enabled"] = r.smt_enabled;
    j["load_avg"] = r.load_avg;
    if (r.cpu_freq_mhz) j["cpu_freq_mhz"] = *r.cpu_freq_mhz;
    if (r.mem_used_gib) j["mem_used_gib"] = *r.mem_used_gib;
    out << j.dump() << '\n';
  }
}

void write_job_records(std::ostream& out, std::span<const JobRecord> records) {
  for (const auto& r : records) {
    ordered_json j;
    j["site"] = r.queue.site;
    j["queue"] = r.queue.queue_name;
    j["cpu_model"] = r.cpu_model.canonical_name;
    j["walltime_s"] = r.walltime_s;
    j["cores"] = r.cores;
    out << j.dump() << '\n';
  }
}

void write_declared(std::ostream& out, std::span<const DeclaredEntry> entries) {
  out << "site,queue,declared_corepower,source\n";
  for (const auto& e : entries) {
    out << e.queue.site << ',' << e.queue.queue_name << ','
        << text::format_double(e.declared_corepower) << ',' << e.source << '\n';
  }
}

}  // namespace cpaudit::ingest
