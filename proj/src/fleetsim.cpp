#include "cpaudit/fleetsim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cpaudit/ingest.hpp"
#include "cpaudit/rng.hpp"
#include "cpaudit/text.hpp"
#include "json.hpp"

namespace cpaudit::fleetsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// 2025-01-01T00:00:00Z; all simulated runs are timestamped from here.
constexpr UtcSeconds kSimEpoch = 1735689600;

void validate_response_points(
    const std::vector<std::pair<double, double>>& points,
    const std::string& what) {
  if (points.empty()) throw ConfigError(what + ": needs at least one point");
  double prev = -1.0;
  for (const auto& [x, y] : points) {
    if (x < 0.0 || x > 2.5)
      throw ConfigError(what + ": load/core points must lie in [0, 2.5]");
    if (x <= prev) throw ConfigError(what + ": points must increase in load");
    if (!(y > 0.0)) throw ConfigError(what + ": multipliers must be positive");
    prev = x;
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

LoadResponse normalized_response(
    const std::vector<std::pair<double, double>>& raw_points,
    double full_mark) {
  LoadResponse raw{raw_points};
  const double at_full = raw.at(full_mark);
  LoadResponse out;
  out.points.reserve(raw_points.size());
  for (const auto& [x, y] : raw_points) out.points.emplace_back(x, y / at_full);
  return out;
}

std::string two_digits(int n) {
  std::string s = std::to_string(n);
  return s.size() < 2 ? "0" + s : s;
}

}  // namespace

double LoadResponse::at(double load_per_core) const {
  if (load_per_core <= points.front().first) return points.front().second;
  if (load_per_core >= points.back().first) return points.back().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& [x1, y1] = points[i];
    if (load_per_core > x1) continue;
    const auto& [x0, y0] = points[i - 1];
    if (load_per_core == x1) return y1;  // exact breakpoint hits stay exact
    if (load_per_core == x0) return y0;
    const double t = (load_per_core - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
  }
  return points.back().second;
}

double LoadResponse::mean_over(double lo, double hi) const {
  if (hi < lo) throw ConfigError("load response: empty integration range");
  if (hi - lo < 1e-15) return at(lo);
  std::vector<double> xs{lo, hi};
  for (const auto& [x, y] : points)
    if (x > lo && x < hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    integral += 0.5 * (at(xs[i]) + at(xs[i + 1])) * (xs[i + 1] - xs[i]);
  return integral / (hi - lo);
}

std::size_t FleetSpec::queue_count() const {
  std::size_t n = 0;
  for (const auto& s : sites) n += s.queues.size();
  return n;
}

void FleetSpec::validate() const {
  if (queue_count() == 0) throw ConfigError("fleet has zero queues");
  if (noise < 0.0) throw ConfigError("noise must be non-negative");
  if (!(jobs_per_hour > 0.0)) throw ConfigError("jobs_per_hour must be positive");
  for (const auto& site : sites) {
    if (site.site.empty()) throw ConfigError("empty site name");
    for (const auto& q : site.queues) {
      if (q.id.queue_name.empty()) throw ConfigError("empty queue name");
      if (q.models.empty())
        throw ConfigError("queue without CPU models: " + q.id.str());
      if (!(q.load_band.first >= 0.0 && q.load_band.first <= q.load_band.second))
        throw ConfigError("bad load band on " + q.id.str());
      double share_sum = 0.0;
      for (const auto& g : q.models) {
        if (g.servers < 1) throw ConfigError("server count must be >= 1");
        if (g.job_share < 0.0) throw ConfigError("negative job share");
        share_sum += g.job_share;
        const auto& p = g.profile;
        if (!(p.true_corepower_at_full_load > 0.0))
          throw ConfigError("corepower must be positive");
        if (p.physical_cores < 1) throw ConfigError("physical cores must be >= 1");
        if (!(p.era_scaling > 0.0)) throw ConfigError("era scaling must be positive");
        validate_response_points(p.load_response.points,
                                 "load response of " + p.model.canonical_name);
      }
      if (std::abs(share_sum - 1.0) > 1e-9)
        throw ConfigError("job shares must sum to 1 on " + q.id.str());
    }
  }
}

void SimConfig::validate() const {
  if (sites < 1) throw ConfigError("sites must be >= 1");
  auto check_range = [](auto range, auto min_lo, const char* what) {
    if (range.first < min_lo || range.second < range.first)
      throw ConfigError(std::string(what) + ": bad range");
  };
  check_range(queues_per_site, 1, "queues_per_site");
  check_range(models_per_queue, 1, "models_per_queue");
  check_range(servers_per_model, 1, "servers_per_model");
  if (!(corepower_range.first > 0.0) ||
      corepower_range.second < corepower_range.first)
    throw ConfigError("corepower_range: bad range");
  if (physical_cores_choices.empty())
    throw ConfigError("physical_cores_choices must not be empty");
  for (int c : physical_cores_choices)
    if (c < 1) throw ConfigError("physical_cores_choices must be >= 1");
  for (double f : {smt_fraction, arm_fraction, old_era_fraction, clone_fraction,
                   inherit_fraction, scaled_fraction})
    if (f < 0.0 || f > 1.0) throw ConfigError("fractions must lie in [0, 1]");
  if (!(old_era_scaling > 0.0)) throw ConfigError("old_era_scaling must be positive");
  if (load_band.first < 0.0 || load_band.second < load_band.first)
    throw ConfigError("load_band: bad range");
  validate_response_points(load_response_x86, "load_response_x86");
  validate_response_points(load_response_arm, "load_response_arm");
  if (!(scaled_factor_range.first > 0.0) ||
      scaled_factor_range.second < scaled_factor_range.first)
    throw ConfigError("scaled_factor_range: bad range");
  if (noise < 0.0) throw ConfigError("noise must be non-negative");
  if (!(jobs_per_hour > 0.0)) throw ConfigError("jobs_per_hour must be positive");
  if (!(cadence_hours > 0.0)) throw ConfigError("cadence_hours must be positive");
  if (duration_hours < cadence_hours)
    throw ConfigError("duration_hours must cover at least one cadence tick");
}

namespace {

std::pair<int, int> as_int_pair(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    throw ConfigError(key + ": expected [lo, hi] integers");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::pair<double, double> as_double_pair(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(key + ": expected [lo, hi] numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<std::pair<double, double>> as_points(const json& j,
                                                 const std::string& key) {
  if (!j.is_array()) throw ConfigError(key + ": expected [[load, mult], ...]");
  std::vector<std::pair<double, double>> out;
  for (const auto& p : j) out.push_back(as_double_pair(p, key));
  return out;
}

}  // namespace

SimConfig SimConfig::from_json_text(const std::string& textual) {
  json j = json::parse(textual, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config is not a JSON object");
  SimConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "sites") {
      if (!value.is_number_integer()) throw ConfigError("sites: expected integer");
      cfg.sites = value.get<int>();
    } else if (key == "queues_per_site") {
      cfg.queues_per_site = as_int_pair(value, key);
    } else if (key == "models_per_queue") {
      cfg.models_per_queue = as_int_pair(value, key);
    } else if (key == "servers_per_model") {
      cfg.servers_per_model = as_int_pair(value, key);
    } else if (key == "corepower_range") {
      cfg.corepower_range = as_double_pair(value, key);
    } else if (key == "physical_cores_choices") {
      if (!value.is_array() || value.empty())
        throw ConfigError("physical_cores_choices: expected [ints]");
      cfg.physical_cores_choices.clear();
      for (const auto& v : value) {
        if (!v.is_number_integer())
          throw ConfigError("physical_cores_choices: expected [ints]");
        cfg.physical_cores_choices.push_back(v.get<int>());
      }
    } else if (key == "smt_fraction") {
      cfg.smt_fraction = value.get<double>();
    } else if (key == "arm_fraction") {
      cfg.arm_fraction = value.get<double>();
    } else if (key == "old_era_fraction") {
      cfg.old_era_fraction = value.get<double>();
    } else if (key == "old_era_scaling") {
      cfg.old_era_scaling = value.get<double>();
    } else if (key == "load_band") {
      cfg.load_band = as_double_pair(value, key);
    } else if (key == "load_response_x86") {
      cfg.load_response_x86 = as_points(value, key);
    } else if (key == "load_response_arm") {
      cfg.load_response_arm = as_points(value, key);
    } else if (key == "clone_fraction") {
      cfg.clone_fraction = value.get<double>();
    } else if (key == "inherit_fraction") {
      cfg.inherit_fraction = value.get<double>();
    } else if (key == "scaled_fraction") {
      cfg.scaled_fraction = value.get<double>();
    } else if (key == "scaled_factor_range") {
      cfg.scaled_factor_range = as_double_pair(value, key);
    } else if (key == "noise") {
      cfg.noise = value.get<double>();
    } else if (key == "jobs_per_hour") {
      cfg.jobs_per_hour = value.get<double>();
    } else if (key == "duration_hours") {
      cfg.duration_hours = value.get<double>();
    } else if (key == "cadence_hours") {
      cfg.cadence_hours = value.get<double>();
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

namespace {

CpuProfile make_x86_profile(const SimConfig& cfg, Rng& rng, int index) {
  CpuProfile p;
  p.true_corepower_at_full_load =
      rng.uniform(cfg.corepower_range.first, cfg.corepower_range.second);
  p.physical_cores = cfg.physical_cores_choices[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(cfg.physical_cores_choices.size()) - 1))];
  p.smt_enabled = rng.uniform() < cfg.smt_fraction;
  p.era_scaling =
      rng.uniform() < cfg.old_era_fraction ? cfg.old_era_scaling : 1.0;
  p.model = CpuModelId{"sim xeon e" + std::to_string(1000 + index) + " v" +
                       std::to_string(1 + index % 5)};
  p.load_response = normalized_response(cfg.load_response_x86, p.full_mark());
  return p;
}

CpuProfile make_arm_profile(const SimConfig& cfg, Rng& rng, int index) {
  CpuProfile p;
  p.true_corepower_at_full_load =
      rng.uniform(cfg.corepower_range.first, cfg.corepower_range.second);
  p.physical_cores = cfg.physical_cores_choices[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(cfg.physical_cores_choices.size()) - 1))];
  p.smt_enabled = false;
  p.era_scaling = 1.0;
  p.model = CpuModelId{"sim neoverse-n" + std::to_string(index)};
  p.load_response = normalized_response(cfg.load_response_arm, p.full_mark());
  return p;
}

}  // namespace

FleetSpec generate_fleet(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "fleet"));

  FleetSpec fleet;
  fleet.seed = seed;
  fleet.noise = config.noise;
  fleet.jobs_per_hour = config.jobs_per_hour;

  std::vector<QueueFleet*> queues;
  for (int si = 0; si < config.sites; ++si) {
    SiteFleet site;
    site.site = "SIM_SITE_" + two_digits(si);
    const int nq = rng.uniform_int(config.queues_per_site.first,
                                   config.queues_per_site.second);
    for (int qi = 1; qi <= nq; ++qi) {
      QueueFleet q;
      q.id = QueueId{site.site, "queue" + std::to_string(qi)};
      q.load_band = config.load_band;
      site.queues.push_back(std::move(q));
    }
    fleet.sites.push_back(std::move(site));
  }
  for (auto& site : fleet.sites)
    for (auto& q : site.queues) queues.push_back(&q);
  const std::size_t total = queues.size();
  if (total == 0) throw ConfigError("fleet has zero queues");

  // architecture quota: exactly round(arm_fraction * N) single-model ARM queues
  const auto arch_perm = shuffled_indices(total, rng);
  const auto n_arm =
      static_cast<std::size_t>(std::llround(config.arm_fraction * total));
  std::vector<bool> is_arm(total, false);
  for (std::size_t i = 0; i < n_arm; ++i) is_arm[arch_perm[i]] = true;

  int profile_index = 0;
  for (std::size_t i = 0; i < total; ++i) {
    QueueFleet& q = *queues[i];
    const int n_models = is_arm[i] ? 1
                                   : rng.uniform_int(config.models_per_queue.first,
                                                     config.models_per_queue.second);
    double share_sum = 0.0;
    for (int m = 0; m < n_models; ++m) {
      QueueFleet::ModelGroup g;
      g.profile = is_arm[i] ? make_arm_profile(config, rng, profile_index++)
                            : make_x86_profile(config, rng, profile_index++);
      g.servers = rng.uniform_int(config.servers_per_model.first,
                                  config.servers_per_model.second);
      g.job_share = rng.uniform(0.2, 1.0);
      share_sum += g.job_share;
      q.models.push_back(std::move(g));
    }
    for (auto& g : q.models) g.job_share /= share_sum;
  }

  // declared-policy quotas over a fresh shuffle
  const auto perm = shuffled_indices(total, rng);
  const auto n_clone =
      static_cast<std::size_t>(std::llround(config.clone_fraction * total));
  const auto n_inherit = static_cast<std::size_t>(
      std::llround(config.inherit_fraction * static_cast<double>(n_clone)));
  const auto n_scaled =
      static_cast<std::size_t>(std::llround(config.scaled_fraction * total));
  if (n_inherit + n_scaled > total)
    throw ConfigError("inherit and scaled quotas exceed the queue count");
  if (n_inherit > 0 && n_inherit == total)
    throw ConfigError("every queue would inherit; no clone source remains");

  for (std::size_t i = 0; i < n_clone; ++i) queues[perm[i]]->cloned = true;
  for (std::size_t i = 0; i < n_inherit; ++i) {
    QueueFleet& q = *queues[perm[i]];
    const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(
        static_cast<int>(n_inherit), static_cast<int>(total) - 1));
    q.declared_policy.kind = DeclaredPolicyKind::StaleCloned;
    q.declared_policy.clone_source = queues[perm[pick]]->id;
  }
  for (std::size_t i = n_inherit; i < n_inherit + n_scaled; ++i) {
    QueueFleet& q = *queues[perm[i]];
    q.declared_policy.kind = DeclaredPolicyKind::Scaled;
    q.declared_policy.scale_factor = rng.uniform(
        config.scaled_factor_range.first, config.scaled_factor_range.second);
  }

  fleet.validate();
  return fleet;
}

namespace {

double expected_model_corepower(const QueueFleet& q,
                                const QueueFleet::ModelGroup& g) {
  const double full = g.profile.full_mark();
  const double mean_response = g.profile.load_response.mean_over(
      q.load_band.first * full, q.load_band.second * full);
  return g.profile.true_corepower_at_full_load * g.profile.era_scaling *
         mean_response;
}

// Job-share-weighted expected corepower under the queue's load band.
double oracle_runtime_corepower(const QueueFleet& q) {
  double weighted = 0.0;
  double share_sum = 0.0;
  for (const auto& g : q.models) {
    weighted += g.job_share * expected_model_corepower(q, g);
    share_sum += g.job_share;
  }
  return weighted / share_sum;
}

class DeclaredResolver {
 public:
  explicit DeclaredResolver(const FleetSpec& fleet) {
    for (const auto& site : fleet.sites)
      for (const auto& q : site.queues) index_[q.id] = &q;
  }

  const QueueFleet& queue(const QueueId& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw ConfigError("clone source not found: " + id.str());
    return *it->second;
  }

  double declared(const QueueId& id) {
    auto memo = memo_.find(id);
    if (memo != memo_.end()) return memo->second;
    if (!visiting_.insert(id).second)
      throw ConfigError("clone cycle involving " + id.str());
    const QueueFleet& q = queue(id);
    double value = 0.0;
    switch (q.declared_policy.kind) {
      case DeclaredPolicyKind::Accurate:
        value = oracle_runtime_corepower(q);
        break;
      case DeclaredPolicyKind::Scaled:
        value = oracle_runtime_corepower(q) * q.declared_policy.scale_factor;
        break;
      case DeclaredPolicyKind::StaleCloned:
        value = declared(q.declared_policy.clone_source);
        break;
    }
    visiting_.erase(id);
    memo_[id] = value;
    return value;
  }

 private:
  std::map<QueueId, const QueueFleet*> index_;
  std::map<QueueId, double> memo_;
  std::set<QueueId> visiting_;
};

std::string policy_label(const QueueFleet& q) {
  switch (q.declared_policy.kind) {
    case DeclaredPolicyKind::Accurate:
      return q.cloned ? "sim:accurate(cloned)" : "sim:accurate";
    case DeclaredPolicyKind::Scaled:
      return "sim:scaled(" + text::format_double(q.declared_policy.scale_factor) +
             ")";
    case DeclaredPolicyKind::StaleCloned:
      return "sim:cloned(" + q.declared_policy.clone_source.str() + ")";
  }
  return "sim:unknown";
}

}  // namespace

std::vector<BenchmarkRecord> simulate_benchmarks(const FleetSpec& fleet,
                                                 double duration_hours,
                                                 double cadence_hours,
                                                 double noise) {
  fleet.validate();
  if (!(cadence_hours > 0.0)) throw ConfigError("cadence must be positive");
  if (duration_hours < cadence_hours)
    throw ConfigError("duration must cover at least one cadence tick");
  if (noise < 0.0) throw ConfigError("noise must be non-negative");

  const auto ticks =
      static_cast<std::int64_t>(duration_hours / cadence_hours + 1e-9);
  std::vector<BenchmarkRecord> records;
  records.reserve(static_cast<std::size_t>(ticks) * fleet.queue_count());

  for (const auto& site : fleet.sites) {
    for (const auto& q : site.queues) {
      Rng rng(derive_seed(fleet.seed, "bench:" + q.id.str()));
      for (std::int64_t k = 1; k <= ticks; ++k) {
        // server sampled by job share, then uniformly inside the group
        const double pick = rng.uniform();
        double cum = 0.0;
        const QueueFleet::ModelGroup* group = &q.models.back();
        for (const auto& g : q.models) {
          cum += g.job_share;
          if (pick < cum) {
            group = &g;
            break;
          }
        }
        (void)rng.uniform_int(0, group->servers - 1);  // server index
        const double utilization =
            rng.uniform(q.load_band.first, q.load_band.second);
        const double load_per_core = utilization * group->profile.full_mark();
        const double eps = noise * rng.normal();

        BenchmarkRecord r;
        r.queue = q.id;
        r.cpu_model = group->profile.model;
        r.timestamp =
            kSimEpoch + static_cast<UtcSeconds>(
                            std::llround(k * cadence_hours * 3600.0));
        r.allocated_cores = kSlotCores;
        r.physical_cores = group->profile.physical_cores;
        r.online_cores = group->profile.smt_enabled
                             ? 2 * group->profile.physical_cores
                             : group->profile.physical_cores;
        r.smt_enabled = group->profile.smt_enabled;
        r.load_avg = load_per_core * group->profile.physical_cores;
        const double score = kSlotCores *
                             group->profile.true_corepower_at_full_load *
                             group->profile.era_scaling *
                             group->profile.load_response.at(load_per_core) *
                             (1.0 + eps);
        r.score = std::max(score, 1e-9);
        r.cpu_freq_mhz = 2600.0 - 150.0 * utilization;
        r.mem_used_gib = 2.0 * kSlotCores * (0.7 + 0.3 * utilization);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::vector<JobRecord> simulate_job_accounting(const FleetSpec& fleet,
                                               double duration_hours) {
  fleet.validate();
  if (!(duration_hours > 0.0)) throw ConfigError("duration must be positive");
  const auto jobs_per_queue = static_cast<std::int64_t>(
      std::max<std::int64_t>(1, std::llround(duration_hours * fleet.jobs_per_hour)));

  std::vector<JobRecord> jobs;
  jobs.reserve(static_cast<std::size_t>(jobs_per_queue) * fleet.queue_count());
  for (const auto& site : fleet.sites) {
    for (const auto& q : site.queues) {
      Rng rng(derive_seed(fleet.seed, "jobs:" + q.id.str()));
      for (std::int64_t i = 0; i < jobs_per_queue; ++i) {
        const double pick = rng.uniform();
        double cum = 0.0;
        const QueueFleet::ModelGroup* group = &q.models.back();
        for (const auto& g : q.models) {
          cum += g.job_share;
          if (pick < cum) {
            group = &g;
            break;
          }
        }
        JobRecord j;
        j.queue = q.id;
        j.cpu_model = group->profile.model;
        j.walltime_s = rng.uniform(1800.0, 43200.0);
        j.cores = kSlotCores;
        jobs.push_back(std::move(j));
      }
    }
  }
  return jobs;
}

std::vector<DeclaredEntry> emit_declared(const FleetSpec& fleet) {
  fleet.validate();
  DeclaredResolver resolver(fleet);
  std::vector<DeclaredEntry> entries;
  for (const auto& site : fleet.sites) {
    for (const auto& q : site.queues) {
      DeclaredEntry e;
      e.queue = q.id;
      e.declared_corepower = resolver.declared(q.id);
      e.source = policy_label(q);
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

std::map<QueueId, OracleEntry> compute_oracle(const FleetSpec& fleet) {
  fleet.validate();
  DeclaredResolver resolver(fleet);
  std::map<QueueId, OracleEntry> oracle;
  for (const auto& site : fleet.sites) {
    for (const auto& q : site.queues) {
      OracleEntry e;
      e.true_runtime_corepower = oracle_runtime_corepower(q);
      e.declared_corepower = resolver.declared(q.id);
      e.true_relative_change =
          e.true_runtime_corepower / e.declared_corepower - 1.0;
      oracle[q.id] = e;
    }
  }
  return oracle;
}

SimOutput simulate(const FleetSpec& fleet, double duration_hours,
                   double cadence_hours, double noise) {
  SimOutput out;
  out.benchmark_records = simulate_benchmarks(fleet, duration_hours,
                                              cadence_hours, noise);
  out.job_records = simulate_job_accounting(fleet, duration_hours);
  out.declared = emit_declared(fleet);
  out.oracle = compute_oracle(fleet);
  return out;
}

std::string oracle_to_json_text(const std::map<QueueId, OracleEntry>& oracle) {
  ordered_json root;
  root["queues"] = ordered_json::array();
  for (const auto& [id, e] : oracle) {
    ordered_json j;
    j["site"] = id.site;
    j["queue"] = id.queue_name;
    j["true_runtime_corepower"] = e.true_runtime_corepower;
    j["declared_corepower"] = e.declared_corepower;
    j["true_relative_change"] = e.true_relative_change;
    root["queues"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

void write_sim_output(const SimOutput& output, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) throw ConfigError(std::string("cannot write file: ") + name);
    return out;
  };
  {
    auto out = open("benchmarks.jsonl");
    ingest::write_benchmark_records(out, output.benchmark_records);
  }
  {
    auto out = open("jobs.jsonl");
    ingest::write_job_records(out, output.job_records);
  }
  {
    auto out = open("declared.csv");
    ingest::write_declared(out, output.declared);
  }
  {
    auto out = open("oracle.json");
    out << oracle_to_json_text(output.oracle);
  }
}

std::string fleet_to_json(const FleetSpec& fleet) {
  ordered_json root;
  root["seed"] = fleet.seed;
  root["noise"] = fleet.noise;
  root["jobs_per_hour"] = fleet.jobs_per_hour;
  root["sites"] = ordered_json::array();
  for (const auto& site : fleet.sites) {
    ordered_json js;
    js["site"] = site.site;
    js["queues"] = ordered_json::array();
    for (const auto& q : site.queues) {
      ordered_json jq;
      jq["queue"] = q.id.queue_name;
      jq["cloned"] = q.cloned;
      jq["load_band"] = {q.load_band.first, q.load_band.second};
      switch (q.declared_policy.kind) {
        case DeclaredPolicyKind::Accurate:
          jq["declared_policy"] = "accurate";
          break;
        case DeclaredPolicyKind::Scaled:
          jq["declared_policy"] = "scaled";
          jq["scale_factor"] = q.declared_policy.scale_factor;
          break;
        case DeclaredPolicyKind::StaleCloned:
          jq["declared_policy"] = "stale_cloned";
          jq["clone_source"] = q.declared_policy.clone_source.str();
          break;
      }
      jq["models"] = ordered_json::array();
      for (const auto& g : q.models) {
        ordered_json jm;
        jm["model"] = g.profile.model.canonical_name;
        jm["true_corepower_at_full_load"] = g.profile.true_corepower_at_full_load;
        jm["physical_cores"] = g.profile.physical_cores;
        jm["smt_enabled"] = g.profile.smt_enabled;
        jm["era_scaling"] = g.profile.era_scaling;
        jm["servers"] = g.servers;
        jm["job_share"] = g.job_share;
        jm["load_response"] = ordered_json::array();
        for (const auto& [x, y] : g.profile.load_response.points)
          jm["load_response"].push_back({x, y});
        jq["models"].push_back(std::move(jm));
      }
      js["queues"].push_back(std::move(jq));
    }
    root["sites"].push_back(std::move(js));
  }
  return root.dump(2);
}

}  // namespace cpaudit::fleetsim
