#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wbic/models.hpp"
#include "wbic/sampler.hpp"

namespace wbic {

enum class EstimatorId { Exact, Wbic, AdjustedWbic, NuHat, Ti, PriorMc };

const char* estimator_name(EstimatorId id);
std::optional<EstimatorId> parse_estimator(std::string_view name);

struct ModelChoice {
  std::string id;  // normal_mean | mixture2 | linreg_m1 | linreg_m2
  double prior_mean = 0.0;   // normal_mean
  double prior_var = 1.0;    // normal_mean
  double mu_prior_var = 10.0;  // mixture2
  LinRegPrior linreg;
};

/// Per-replicate synthetic data: n i.i.d. N(mean, sd^2) draws.
struct SyntheticSpec {
  std::string distribution = "normal";
  double mean = 0.0;
  double sd = 1.0;
  std::size_t n = 50;
  std::uint64_t base_seed = 1;
};

struct ExperimentConfig {
  ModelChoice model;
  std::optional<std::filesystem::path> data_path;
  std::optional<SyntheticSpec> synthetic;
  std::vector<EstimatorId> estimators;
  std::size_t replicates = 1;
  ChainConfig sampler;
  std::size_t prior_mc_draws = 100000;
  std::size_t ti_rungs = 30;
  double ti_power = 5.0;
  std::size_t ti_prior_draws = 100000;
  std::filesystem::path output_path;
  bool dump_draws = false;

  bool wants(EstimatorId id) const;
  /// Every result-affecting field as sorted "key=value" lines; excludes
  /// output_path and dump_draws.
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// INI-style sections: [model] [data] [estimators] [run] [sampler] [output].
/// Relative paths resolve against `base_dir`. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Precondition checks that need no sampling. Config problems throw
/// Error(Config); unreadable or invalid data throws Error(Data).
void validate_config(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace wbic
