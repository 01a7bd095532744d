#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tgs/errors.hpp"
#include "tgs/pipeline.hpp"
#include "tgs/scenario.hpp"

namespace tgs {

struct NamedScenario {
  std::string name;
  MaterializedScenario scenario;
};

/// One row per (strategy, scenario, seed) run. The emitted CSV columns are
/// fixed: strategy,seed,k,jf,j_mean,f_mean,tsg_iou,n_updates.
struct CompareRow {
  std::string strategy;
  std::string scenario;  // sort key, not a CSV column
  std::uint64_t seed = 0;
  std::int64_t k = 0;
  double jf = 0.0;
  double j_mean = 0.0;
  double f_mean = 0.0;
  double tsg_iou = 0.0;
  std::int64_t n_updates = 0;
};

struct StrategySummary {
  std::string strategy;
  std::size_t runs = 0;
  double jf_mean = 0.0;
  double jf_std = 0.0;
  double tsg_iou_mean = 0.0;
  double tsg_iou_std = 0.0;
};

struct CompareResult {
  std::vector<CompareRow> rows;        // sorted by (strategy, scenario, seed)
  std::vector<StrategySummary> summary;  // strategy input order
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  sd = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace detail

/// Runs every (strategy, scenario, seed) combination and aggregates
/// per-strategy mean and standard deviation of J&F and grounding IoU.
///
/// Runs execute on `workers` threads (0 -> hardware concurrency); rows land
/// in preallocated slots and are emitted in a fixed order, so the output is
/// byte-identical regardless of scheduling.
inline CompareResult compare_strategies(const std::vector<NamedScenario>& corpus,
                                        const std::vector<Strategy>& strategies,
                                        const PipelineParams& params,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::size_t workers = 0) {
  if (corpus.empty())
    throw ValidationError("compare_strategies: corpus must be non-empty");
  if (strategies.empty())
    throw ValidationError("compare_strategies: strategy list must be non-empty");
  if (seeds.empty())
    throw ValidationError("compare_strategies: seed list must be non-empty");

  struct Job {
    std::size_t strategy_idx, scenario_idx, seed_idx;
  };
  std::vector<Job> jobs;
  jobs.reserve(strategies.size() * corpus.size() * seeds.size());
  for (std::size_t si = 0; si < strategies.size(); ++si)
    for (std::size_t ci = 0; ci < corpus.size(); ++ci)
      for (std::size_t di = 0; di < seeds.size(); ++di)
        jobs.push_back(Job{si, ci, di});

  std::vector<CompareRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      try {
        const RunResult r =
            run_pipeline(corpus[job.scenario_idx].scenario,
                         strategies[job.strategy_idx], params, seeds[job.seed_idx]);
        CompareRow& row = rows[idx];
        row.strategy = strategy_name(strategies[job.strategy_idx]);
        row.scenario = corpus[job.scenario_idx].name;
        row.seed = seeds[job.seed_idx];
        row.k = params.k;
        row.jf = r.jf.jf;
        row.j_mean = r.jf.j_mean;
        row.f_mean = r.jf.f_mean;
        row.tsg_iou = r.tsg_iou;
        row.n_updates = r.n_updates;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::size_t n_workers = workers != 0 ? workers : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  n_workers = std::min(n_workers, jobs.size());
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  CompareResult result;
  result.rows = std::move(rows);  // job order is already (strategy, scenario, seed)

  for (const Strategy s : strategies) {
    const std::string name = strategy_name(s);
    std::vector<double> jfs;
    std::vector<double> ious;
    for (const CompareRow& row : result.rows) {
      if (row.strategy != name) continue;
      jfs.push_back(row.jf);
      ious.push_back(row.tsg_iou);
    }
    StrategySummary summary;
    summary.strategy = name;
    summary.runs = jfs.size();
    detail::mean_std(jfs, summary.jf_mean, summary.jf_std);
    detail::mean_std(ious, summary.tsg_iou_mean, summary.tsg_iou_std);
    result.summary.push_back(std::move(summary));
  }
  return result;
}

inline std::string to_csv(const CompareResult& result) {
  std::string out = "strategy,seed,k,jf,j_mean,f_mean,tsg_iou,n_updates\n";
  for (const CompareRow& r : result.rows) {
    out += r.strategy;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += detail::format_double(r.jf);
    out += ',';
    out += detail::format_double(r.j_mean);
    out += ',';
    out += detail::format_double(r.f_mean);
    out += ',';
    out += detail::format_double(r.tsg_iou);
    out += ',';
    out += std::to_string(r.n_updates);
    out += '\n';
  }
  return out;
}

inline std::string summary_table(const CompareResult& result) {
  std::string out = "strategy        runs  jf_mean   jf_std    miou_mean miou_std\n";
  char buf[160];
  for (const StrategySummary& s : result.summary) {
    std::snprintf(buf, sizeof(buf), "%-15s %-5zu %-9.4f %-9.4f %-9.4f %-9.4f\n",
                  s.strategy.c_str(), s.runs, s.jf_mean, s.jf_std,
                  s.tsg_iou_mean, s.tsg_iou_std);
    out += buf;
  }
  return out;
}

}  // namespace tgs
