#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "wbic/models.hpp"

namespace wbic {

/// Tempered posterior N(mean, var) of the conjugate normal-mean model.
struct ConjugateNormalPosterior {
  double mean = 0.0;
  double var = 0.0;
  double t = 0.0;
};

/// var = 1 / (n t + 1/v), mean = var (n t xbar + m / v).
ConjugateNormalPosterior normal_mean_posterior(std::size_t n, double xbar, double t, double m,
                                               double v);

/// Closed-form E_{t_w}[log p(x^n | theta)] for the normal-mean model.
double normal_mean_wbic_analytic(std::span<const double> xs, double m, double v);

/// Closed-form (t/2) sum_i V_t[log p(x_i | theta)] for the normal-mean model,
/// in terms of the sample mean and the (n-1) sample variance sx2.
double normal_mean_nu_hat_closed_form(double t, std::size_t n, double xbar, double sx2, double m,
                                      double v);

/// log of the integral of prod_i N(x_i | theta, 1) N(theta | m, v).
double normal_mean_exact_log_marginal(std::span<const double> xs, double m, double v);

/// Centered two-column design with the normal-gamma prior of LinRegPrior.
struct RegressionDesign {
  std::vector<double> covariate;  // centered
  std::vector<double> response;
  std::array<double, 2> q_diag{};
  std::array<double, 2> prior_mean{};
  double a = 0.0;
  double b = 0.0;

  void validate() const;
};

/// Builds the design from (covariate, response) rows, centering the covariate.
RegressionDesign make_regression_design(const Dataset& regression_rows, const LinRegPrior& prior);

/// Exact log marginal likelihood of the normal-gamma linear regression:
///   -(n/2) log pi + (a/2) log b + lgamma((n+a)/2) - lgamma(a/2)
///   + (1/2) log(det Q / det M) - ((n+a)/2) log(r'Rr + b)
/// with M = X'X + Q, R = I - X M^-1 X', r = y - X mean.
double linreg_exact_log_marginal(const RegressionDesign& design);

}  // namespace wbic
