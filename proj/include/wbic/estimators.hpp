#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wbic/sampler.hpp"

namespace wbic {

struct TemperatureChoice {
  double t = 1.0;    // value to sample at
  double raw = 1.0;  // 1 / log n before clamping
  bool clamped = false;
};

/// t_w = 1 / log n, clamped to 1 when that exceeds 1 (n = 2). n < 2 throws.
TemperatureChoice inverse_temperature_wbic(std::size_t n);

struct EstimateResult {
  std::string estimator_name;
  double value = 0.0;
  double mcse = 0.0;
  double t_used = 0.0;
  std::optional<Diagnostics> diagnostics;
  std::vector<std::string> warnings;
};

/// Posterior mean of the total log-likelihood over draws taken at t_w.
EstimateResult wbic(const DrawMatrix& draws);

/// GL(t) = -E_t[log p(X^n | theta)] / n, so n * GL(t_w) = -WBIC.
double gibbs_training_loss(const DrawMatrix& draws, std::size_t n);

/// (t/2) * sum_i Var_draws[log p(x_i | theta)], with the n-1 (Bessel)
/// variance over the pooled retained draws.
EstimateResult singular_fluctuation_hat(const DrawMatrix& draws);

/// WBIC - nu_hat(t_w).
EstimateResult adjusted_wbic(const DrawMatrix& draws);

/// ts[k-1] = (k / K)^power for k = 1..K.
class TemperatureLadder {
 public:
  TemperatureLadder(std::size_t rungs = 30, double schedule_power = 5.0);

  const std::vector<double>& ts() const { return ts_; }
  double schedule_power() const { return power_; }

 private:
  std::vector<double> ts_;
  double power_;
};

struct ThermodynamicIntegration {
  EstimateResult estimate;
  std::vector<double> ts;     // quadrature nodes, starting at 0
  std::vector<double> means;  // E_t[log p(X^n | theta)] at each node
  std::vector<double> mcse;
  std::vector<double> rhat_max;  // NaN at the prior endpoint
};

/// Trapezoid quadrature of t -> E_t[log p(X^n | theta)] over [0, 1]. The
/// t = 0 node is estimated from `prior_draws` exact prior draws, the other
/// nodes by sample_tempered with a per-rung seed derived from config.seed.
ThermodynamicIntegration thermodynamic_integration(const ModelPtr& model,
                                                   const std::shared_ptr<const Dataset>& data,
                                                   const TemperatureLadder& ladder,
                                                   const ChainConfig& config,
                                                   std::size_t prior_draws = 100000,
                                                   Execution exec = Execution::Parallel);

/// log mean_s p(X^n | theta_s) over exact prior draws, max-shifted.
/// The mcse is the delta-method standard error of the log-mean-exp.
EstimateResult prior_monte_carlo(const ModelSpec& model, const Dataset& data,
                                 std::size_t n_draws, std::uint64_t seed);

}  // namespace wbic
