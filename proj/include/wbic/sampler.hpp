#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wbic/model.hpp"

namespace wbic {

struct ChainConfig {
  std::size_t n_chains = 4;
  std::size_t warmup = 5000;
  std::size_t keep = 20000;  // post-warmup iterations per chain
  std::size_t thin = 4;
  double init_scale = 1.0;
  double target_accept = 0.3;
  std::uint64_t seed = 0;

  std::size_t retained_per_chain() const { return thin ? keep / thin : 0; }
  /// Throws Error(InvalidArgument) on any violated field constraint.
  void validate() const;
};

/// S retained draws (chain-major) with the per-observation log-likelihood
/// of every draw cached alongside.
class DrawMatrix {
 public:
  DrawMatrix(std::size_t dim, std::size_t n_obs, double t, std::size_t n_chains,
             std::vector<double> draws, std::vector<double> loglik);

  std::size_t size() const { return totals_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t n_obs() const { return n_obs_; }
  std::size_t n_chains() const { return n_chains_; }
  std::size_t draws_per_chain() const { return size() / n_chains_; }
  double t() const { return t_; }

  std::span<const double> draw(std::size_t s) const { return {draws_.data() + s * dim_, dim_}; }
  std::span<const double> loglik_row(std::size_t s) const {
    return {loglik_.data() + s * n_obs_, n_obs_};
  }
  double total_loglik(std::size_t s) const { return totals_[s]; }
  std::span<const double> total_loglik_series() const { return totals_; }

  std::span<const double> raw_draws() const { return draws_; }
  std::span<const double> raw_loglik() const { return loglik_; }

 private:
  std::size_t dim_;
  std::size_t n_obs_;
  double t_;
  std::size_t n_chains_;
  std::vector<double> draws_;
  std::vector<double> loglik_;
  std::vector<double> totals_;
};

struct Diagnostics {
  std::vector<double> accept_rate;  // per chain, post-warmup
  std::vector<double> ess;          // per parameter, summed over chains
  std::vector<double> rhat;         // per parameter, split R-hat
  bool rhat_warning = false;        // some rhat > 1.1

  double rhat_max() const;
};

struct SampleResult {
  DrawMatrix draws;
  Diagnostics diagnostics;
};

enum class Execution { Sequential, Parallel };

/// Adaptive random-walk Metropolis on the unconstrained space of the target.
/// Warmup adapts a diagonal then a full proposal covariance and a
/// Robbins-Monro step scale; retained draws use the frozen kernel.
/// Output is a deterministic function of (target, config).
SampleResult sample_tempered(const TemperedTarget& target, const ChainConfig& config,
                             Execution exec = Execution::Parallel);

/// Multivariate-normal random-walk proposal: step = exp(log_scale) * L z.
struct ProposalKernel {
  std::vector<double> chol;  // d x d lower triangle, row-major
  double log_scale = 0.0;
};

struct ChainState {
  std::vector<double> position;
  double log_density = 0.0;
  std::vector<double> row_loglik;
  ProposalKernel kernel;
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
};

struct ChainDraws {
  std::vector<double> draws;
  std::vector<double> loglik;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
};

/// Private RNG stream for chain `chain_index` of a run seeded with `seed`.
std::mt19937_64 chain_rng(std::uint64_t seed, std::size_t chain_index);

/// Initializes chain `chain_index` and runs its adaptive warmup phase.
ChainState warmup_chain(const TemperedTarget& target, const ChainConfig& config,
                        std::size_t chain_index);

/// Runs `keep` iterations with the state's kernel held fixed, retaining every
/// `thin`-th draw.
ChainDraws run_fixed_kernel(const TemperedTarget& target, ChainState& state, std::size_t keep,
                            std::size_t thin);

}  // namespace wbic
