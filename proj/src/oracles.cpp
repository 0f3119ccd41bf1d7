#include "wbic/oracles.hpp"

#include <cmath>
#include <numbers>

#include "wbic/error.hpp"
#include "wbic/estimators.hpp"

namespace wbic {

ConjugateNormalPosterior normal_mean_posterior(std::size_t n, double xbar, double t, double m,
                                               double v) {
  if (!(v > 0)) throw Error(ErrorKind::InvalidArgument, "prior variance must be positive");
  if (!(t >= 0)) throw Error(ErrorKind::InvalidArgument, "inverse temperature must be >= 0");
  const double nt = static_cast<double>(n) * t;
  ConjugateNormalPosterior p;
  p.var = 1.0 / (nt + 1.0 / v);
  p.mean = p.var * (nt * xbar + m / v);
  p.t = t;
  return p;
}

double normal_mean_wbic_analytic(std::span<const double> xs, double m, double v) {
  const std::size_t n = xs.size();
  const double tw = inverse_temperature_wbic(n).t;
  double sum = 0.0, sum_sq = 0.0;
  for (double x : xs) {
    sum += x;
    sum_sq += x * x;
  }
  const double nd = static_cast<double>(n);
  const double xbar = sum / nd;
  auto post = normal_mean_posterior(n, xbar, tw, m, v);
  return -0.5 * nd * std::log(2.0 * std::numbers::pi) - 0.5 * sum_sq + nd * xbar * post.mean -
         0.5 * nd * (post.var + post.mean * post.mean);
}

double normal_mean_nu_hat_closed_form(double t, std::size_t n, double xbar, double sx2, double m,
                                      double v) {
  const double nd = static_cast<double>(n);
  const double ntv = nd * t * v;
  const double k = ntv + 1.0;
  const double d = m - xbar;
  return (ntv - t * v) / k * sx2 / 2.0 + ntv / (2.0 * k * k * k) * d * d +
         t * nd * v * v / (4.0 * k * k);
}

double normal_mean_exact_log_marginal(std::span<const double> xs, double m, double v) {
  if (xs.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one observation");
  if (!(v > 0)) throw Error(ErrorKind::InvalidArgument, "prior variance must be positive");
  const double nd = static_cast<double>(xs.size());
  double s = 0.0, ss = 0.0;
  for (double x : xs) {
    s += x - m;
    ss += (x - m) * (x - m);
  }
  // x - m 1 ~ N(0, I + v 1 1'); |I + v 1 1'| = 1 + n v.
  return -0.5 * nd * std::log(2.0 * std::numbers::pi) - 0.5 * std::log1p(nd * v) -
         0.5 * (ss - v * s * s / (1.0 + nd * v));
}

void RegressionDesign::validate() const {
  auto bad = [](const char* msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (covariate.size() != response.size()) bad("covariate and response lengths differ");
  if (covariate.empty()) bad("empty design");
  if (!(q_diag[0] > 0 && q_diag[1] > 0)) bad("Q must be positive diagonal");
  if (!(a > 0 && b > 0)) bad("gamma hyperparameters must be positive");
  double mean = 0.0;
  for (double x : covariate) mean += x;
  mean /= static_cast<double>(covariate.size());
  if (std::abs(mean) > 1e-9) bad("covariate column must be centered");
}

RegressionDesign make_regression_design(const Dataset& rows, const LinRegPrior& prior) {
  if (rows.width() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "regression rows must be (covariate, response)");
  }
  RegressionDesign d;
  d.covariate = rows.column(0);
  d.response = rows.column(1);
  double xbar = 0.0;
  for (double x : d.covariate) xbar += x;
  xbar /= static_cast<double>(d.covariate.size());
  for (double& x : d.covariate) x -= xbar;
  d.q_diag = prior.q_diag;
  d.prior_mean = prior.mean;
  d.a = prior.a;
  d.b = prior.b;
  d.validate();
  return d;
}

double linreg_exact_log_marginal(const RegressionDesign& design) {
  design.validate();
  const std::size_t n = design.response.size();
  const double nd = static_cast<double>(n);

  // Sufficient statistics on r = y - X mean, never forming the n x n R.
  double s11 = nd, s12 = 0.0, s22 = 0.0;
  double u1 = 0.0, u2 = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = design.covariate[i];
    const double r = design.response[i] - design.prior_mean[0] - design.prior_mean[1] * x;
    s12 += x;
    s22 += x * x;
    u1 += r;
    u2 += x * r;
    rr += r * r;
  }
  const double m11 = s11 + design.q_diag[0];
  const double m12 = s12;
  const double m22 = s22 + design.q_diag[1];
  const double det_m = m11 * m22 - m12 * m12;
  if (!(det_m > 0) || !std::isfinite(det_m)) {
    throw Error(ErrorKind::Numerical, "M = X'X + Q is singular");
  }
  // u' M^-1 u for symmetric 2 x 2 M.
  const double quad = (m22 * u1 * u1 - 2.0 * m12 * u1 * u2 + m11 * u2 * u2) / det_m;
  const double rrr = std::max(0.0, rr - quad);
  const double det_q = design.q_diag[0] * design.q_diag[1];
  const double a = design.a, b = design.b;

  return -0.5 * nd * std::log(std::numbers::pi) + 0.5 * a * std::log(b) +
         std::lgamma(0.5 * (nd + a)) - std::lgamma(0.5 * a) + 0.5 * std::log(det_q / det_m) -
         0.5 * (nd + a) * std::log(rrr + b);
}

}  // namespace wbic
