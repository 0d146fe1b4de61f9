#pragma once

// Shared fixture builders for the test binaries.

#include <string>
#include <vector>

#include "cpaudit/model.hpp"
#include "cpaudit/rng.hpp"

namespace testutil {

inline cpaudit::BenchmarkRecord make_benchmark(
    const cpaudit::QueueId& queue, const std::string& model, double score,
    int allocated = 8, double load_avg = 32.0, int physical = 32,
    bool smt = false) {
  cpaudit::BenchmarkRecord r;
  r.queue = queue;
  r.cpu_model = cpaudit::CpuModelId{model};
  r.timestamp = 1735689600;
  r.score = score;
  r.allocated_cores = allocated;
  r.physical_cores = physical;
  r.online_cores = smt ? 2 * physical : physical;
  r.smt_enabled = smt;
  r.load_avg = load_avg;
  return r;
}

inline cpaudit::JobRecord make_job(const cpaudit::QueueId& queue,
                                   const std::string& model, double walltime_s,
                                   int cores) {
  return cpaudit::JobRecord{queue, cpaudit::CpuModelId{model}, walltime_s,
                            cores};
}

inline cpaudit::BenchmarkRecord random_benchmark(cpaudit::Rng& rng,
                                                 const cpaudit::QueueId& queue,
                                                 const std::string& model) {
  const bool smt = rng.uniform() < 0.5;
  const int physical = 8 << rng.uniform_int(0, 3);
  cpaudit::BenchmarkRecord r;
  r.queue = queue;
  r.cpu_model = cpaudit::CpuModelId{model};
  r.timestamp = 1735689600 + 3600 * rng.uniform_int(0, 10000);
  r.score = rng.uniform(10.0, 400.0);
  r.allocated_cores = 8;
  r.physical_cores = physical;
  r.online_cores = smt ? 2 * physical : physical;
  r.smt_enabled = smt;
  r.load_avg = rng.uniform(0.0, 2.2) * physical;
  if (rng.uniform() < 0.5) r.cpu_freq_mhz = rng.uniform(1800.0, 3600.0);
  if (rng.uniform() < 0.5) r.mem_used_gib = rng.uniform(1.0, 64.0);
  return r;
}

inline cpaudit::JobRecord random_job(cpaudit::Rng& rng,
                                     const cpaudit::QueueId& queue,
                                     const std::string& model) {
  return cpaudit::JobRecord{queue, cpaudit::CpuModelId{model},
                            rng.uniform(60.0, 86400.0),
                            rng.uniform_int(1, 16)};
}

}  // namespace testutil
