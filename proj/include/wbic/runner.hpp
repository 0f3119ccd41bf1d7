#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wbic/config.hpp"

namespace wbic {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator; 0 for a singleton
};

Summary summarize(std::span<const double> values);

struct ReplicateRecord {
  std::size_t replicate = 0;
  EstimatorId estimator = EstimatorId::Wbic;
  double value = 0.0;
  double mcse = 0.0;
  double rhat_max = 0.0;  // NaN for estimators without MCMC
  std::uint64_t seed = 0;
};

struct EstimatorSummary {
  EstimatorId estimator = EstimatorId::Wbic;
  Summary summary;
  std::vector<double> values;  // by replicate
};

struct Report {
  std::vector<EstimatorSummary> estimators;  // in config order
  std::vector<ReplicateRecord> records;      // replicate-major, config order
  std::uint64_t config_hash = 0;
  std::string software_version;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;

  const EstimatorSummary& get(EstimatorId id) const;
};

struct RunOptions {
  /// 0 = WBIC_WORKERS env var if set, else hardware concurrency.
  std::size_t workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

std::size_t default_worker_count();

/// Runs every requested estimator on every replicate. Fixed-data runs
/// re-run only the sampler; synthetic runs redraw data per replicate from
/// derive_seed(base_seed, r). Output is independent of the worker count.
Report run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// CSV columns: replicate,estimator,value,mcse,rhat_max,seed
void write_report_csv(std::ostream& out, const Report& report);
std::string format_summary_table(const Report& report, const ExperimentConfig& config);

/// Writes <output_path>.csv and <output_path>.txt.
void write_report_files(const Report& report, const ExperimentConfig& config);

}  // namespace wbic
