#pragma once

#include <array>
#include <string>

#include "wbic/model.hpp"

namespace wbic {

/// x ~ N(theta, 1), theta ~ N(prior_mean, prior_var). Regular, lambda = 1/2.
ModelPtr normal_mean_model(double prior_mean, double prior_var);

/// alpha N(mu1, 1) + (1 - alpha) N(mu2, 1) with alpha ~ Unif(0, 1) and
/// mu1, mu2 ~ N(0, mu_prior_var). Singular at N(0, 1) truth, lambda = 3/4.
ModelPtr mixture2_model(double mu_prior_var = 10.0);

/// Normal-gamma prior for y = alpha + beta (x - xbar) + eps, eps ~ N(0, 1/tau):
///   (alpha, beta) | tau ~ N(mean, (tau Q)^-1),  Q = diag(q_diag)
///   tau ~ Gamma(shape a/2, rate b/2)
/// The (a, b) convention is the one under which the closed-form marginal
/// in oracles.hpp holds.
struct LinRegPrior {
  std::array<double, 2> mean{3000.0, 185.0};
  std::array<double, 2> q_diag{0.06, 6.0};
  double a = 6.0;
  double b = 600.0 * 600.0;
};

/// Observations are (covariate, response) rows; the covariate is centered
/// at covariate_mean inside the likelihood. Parameters (alpha, beta, tau).
ModelPtr linreg_model(double covariate_mean, LinRegPrior prior = {},
                      std::string name = "linreg");

enum class RadiataModel { M1, M2 };

/// Column names of the bundled radiata pine fixture.
inline constexpr const char* kRadiataDensity = "density";
inline constexpr const char* kRadiataResinDensity = "resin_density";
inline constexpr const char* kRadiataStrength = "strength";

struct RegressionProblem {
  ModelPtr model;
  std::shared_ptr<const Dataset> data;  // (covariate, response)
};

/// M1 regresses strength on density, M2 on resin-adjusted density.
RegressionProblem radiata_problem(const Dataset& radiata, RadiataModel which,
                                  LinRegPrior prior = {});

}  // namespace wbic
