#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "wbic/error.hpp"
#include "wbic/estimators.hpp"
#include "wbic/models.hpp"
#include "wbic/oracles.hpp"

using namespace wbic;
using wbic::testing::integrate;
using wbic::testing::normal_log_pdf;
using wbic::testing::normal_sample;

namespace {

double sum_log_lik(const std::vector<double>& xs, double theta) {
  double acc = 0.0;
  for (double x : xs) acc += normal_log_pdf(x, theta, 1.0);
  return acc;
}

double mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_var(const std::vector<double>& xs) {
  double m = mean(xs), acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

// log of the integral over theta of the tempered joint, by quadrature over a
// window around the tempered posterior.
double log_tempered_evidence(const std::vector<double>& xs, double t, double m, double v) {
  const double n = static_cast<double>(xs.size());
  const double prec = n * t + 1.0 / v;
  const double centre = (n * t * mean(xs) + m / v) / prec;
  const double half = 40.0 / std::sqrt(prec);
  auto logf = [&](double th) { return t * sum_log_lik(xs, th) + normal_log_pdf(th, m, v); };
  const double shift = logf(centre);
  double z = integrate([&](double th) { return std::exp(logf(th) - shift); }, centre - half,
                       centre + half, 1e-13);
  return std::log(z) + shift;
}

// Exact log marginal with the n x n residual operator formed explicitly.
double linreg_explicit(const RegressionDesign& d) {
  const Eigen::Index n = static_cast<Eigen::Index>(d.response.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = d.covariate[static_cast<std::size_t>(i)];
    y(i) = d.response[static_cast<std::size_t>(i)];
  }
  Eigen::Vector2d mu(d.prior_mean[0], d.prior_mean[1]);
  Eigen::Matrix2d Q = Eigen::Vector2d(d.q_diag[0], d.q_diag[1]).asDiagonal();
  Eigen::Matrix2d M = X.transpose() * X + Q;
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n) - X * M.inverse() * X.transpose();
  Eigen::VectorXd r = y - X * mu;
  const double nd = static_cast<double>(n);
  double yry = r.dot(R * r);
  return -0.5 * nd * std::log(std::numbers::pi) + 0.5 * d.a * std::log(d.b) +
         std::lgamma(0.5 * (nd + d.a)) - std::lgamma(0.5 * d.a) +
         0.5 * std::log(Q.determinant() / M.determinant()) - 0.5 * (nd + d.a) * std::log(yry + d.b);
}

RegressionDesign small_design() {
  RegressionDesign d;
  d.covariate = {-2.0, -1.0, 0.0, 1.0, 2.0};
  d.response = {1.2, 1.9, 3.1, 3.9, 5.2};
  d.q_diag = {0.5, 0.8};
  d.prior_mean = {2.5, 0.7};
  d.a = 4.0;
  d.b = 2.0;
  return d;
}

}  // namespace

TEST_CASE("normal-mean posterior examples") {
  auto p0 = normal_mean_posterior(50, 0.7, 0.0, -1.0, 3.0);
  CHECK(p0.mean == doctest::Approx(-1.0));
  CHECK(p0.var == doctest::Approx(3.0));
  auto p1 = normal_mean_posterior(100, 0.0, 1.0, 0.0, 1.0);
  CHECK(p1.mean == 0.0);
  CHECK(p1.var == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  CHECK_THROWS_AS(normal_mean_posterior(10, 0.0, 1.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(normal_mean_posterior(10, 0.0, 1.0, 0.0, -1.0), Error);
  CHECK_THROWS_AS(normal_mean_posterior(10, 0.0, -0.5, 0.0, 1.0), Error);
  // Prior recovery is continuous as t -> 0.
  auto tiny = normal_mean_posterior(50, 0.7, 1e-12, -1.0, 3.0);
  CHECK(tiny.mean == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(tiny.var == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("normal-mean posterior agrees with quadrature of the tempered density") {
  auto xs = normal_sample(50, 17);
  const double shift = 0.3 - mean(xs);
  for (auto& x : xs) x += shift;
  const double xbar = mean(xs);
  CHECK(xbar == doctest::Approx(0.3).epsilon(1e-12));
  const double t = inverse_temperature_wbic(50).t, m = 1.0, v = 2.0;
  auto post = normal_mean_posterior(50, xbar, t, m, v);

  auto logf = [&](double th) { return t * sum_log_lik(xs, th) + normal_log_pdf(th, m, v); };
  const double s = logf(post.mean);
  auto w = [&](double th) { return std::exp(logf(th) - s); };
  const double lo = -10.0, hi = 10.0;
  double z = integrate(w, lo, hi);
  double m1 = integrate([&](double th) { return th * w(th); }, lo, hi) / z;
  double m2 = integrate([&](double th) { return (th - m1) * (th - m1) * w(th); }, lo, hi) / z;
  CHECK(post.mean == doctest::Approx(m1).epsilon(1e-10));
  CHECK(post.var == doctest::Approx(m2).epsilon(1e-10));
}

TEST_CASE("analytic WBIC equals the tempered posterior mean of the log-likelihood") {
  auto xs = normal_sample(30, 4, 0.5);
  const double t = inverse_temperature_wbic(30).t;
  auto logf = [&](double th) { return t * sum_log_lik(xs, th) + normal_log_pdf(th, 0.0, 1.0); };
  const double s = logf(mean(xs));
  auto w = [&](double th) { return std::exp(logf(th) - s); };
  double z = integrate(w, -10.0, 10.0);
  double e = integrate([&](double th) { return sum_log_lik(xs, th) * w(th); }, -10.0, 10.0) / z;
  CHECK(normal_mean_wbic_analytic(xs, 0.0, 1.0) == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("analytic WBIC: replicate average of the log n correction is one half") {
  const std::size_t n = 2000;
  const int reps = 2000;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = z(rng);
    acc += normal_mean_wbic_analytic(xs, 0.0, 1.0) - sum_log_lik(xs, 0.0) +
           0.5 * std::log(static_cast<double>(n));
  }
  CHECK(acc / reps == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("analytic WBIC survives a very diffuse prior") {
  std::vector<double> xs{0.0, 0.0};
  double w = normal_mean_wbic_analytic(xs, 0.0, 1e6);
  CHECK(std::isfinite(w));
}

TEST_CASE("nu_hat closed form equals the direct variance sum under the exact posterior") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::size_t n = 2 + rng() % 60;
    auto xs = normal_sample(n, rng(), 0.4, 1.3);
    const double t = u(rng), m = 2.0 * u(rng) - 1.0, v = 5.0 * u(rng);
    const double xbar = mean(xs);
    auto post = normal_mean_posterior(n, xbar, t, m, v);
    // Var of -(x - theta)^2 / 2 for theta ~ N(m_t, v_t).
    double direct = 0.0;
    for (double x : xs) {
      const double mu = post.mean - x;
      direct += post.var * post.var / 2.0 + mu * mu * post.var;
    }
    direct *= t / 2.0;
    double closed = normal_mean_nu_hat_closed_form(t, n, xbar, sample_var(xs), m, v);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-12));
    CHECK(closed >= 0.0);
  }
  CHECK(normal_mean_nu_hat_closed_form(0.0, 20, 0.3, 1.1, 0.0, 1.0) == 0.0);
}

TEST_CASE("nu_hat closed form: replicate average is one half") {
  const std::size_t n = 1000;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (double t : {0.2, 0.5, 1.0}) {
    double acc = 0.0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
      std::vector<double> xs(n);
      for (auto& x : xs) x = z(rng);
      acc += normal_mean_nu_hat_closed_form(t, n, mean(xs), sample_var(xs), 0.0, 1.0);
    }
    CHECK(std::abs(acc / reps - 0.5) < 0.02);
  }
}

TEST_CASE("exact normal-mean marginal") {
  std::vector<double> zero{0.0};
  CHECK(normal_mean_exact_log_marginal(zero, 0.0, 1.0) ==
        doctest::Approx(-0.5 * std::log(4.0 * std::numbers::pi)).epsilon(1e-15));
  auto xs = normal_sample(10, 101, 0.2);
  CHECK(std::abs(normal_mean_exact_log_marginal(xs, 0.0, 1.0) - log_tempered_evidence(xs, 1.0, 0.0, 1.0)) <=
        1e-8);
  CHECK_THROWS_AS(normal_mean_exact_log_marginal(std::vector<double>{}, 0.0, 1.0), Error);
  CHECK_THROWS_AS(normal_mean_exact_log_marginal(xs, 0.0, 0.0), Error);
}

TEST_CASE("property: exact normal-mean marginal equals F(1) by quadrature") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::size_t n = 1 + rng() % 20;
    const double m = 4.0 * u(rng) - 2.0, v = 0.05 + 10.0 * u(rng);
    auto xs = normal_sample(n, rng(), 3.0 * u(rng) - 1.5, 1.0);
    double exact = normal_mean_exact_log_marginal(xs, m, v);
    double quad = log_tempered_evidence(xs, 1.0, m, v);
    CHECK(std::abs(exact - quad) <= 1e-8);
  }
}

TEST_CASE("exact normal-mean marginal: diffuse prior scale consistency") {
  // The shift away from -log(10^6)/2 is log(101/100)/2 plus a term in
  // n xbar^2 of about 0.005 n xbar^2, so the 0.01 bound needs xbar near 0.
  auto xs = normal_sample(100, 3);
  double diff = normal_mean_exact_log_marginal(xs, 0.0, 1e6) - normal_mean_exact_log_marginal(xs, 0.0, 1.0);
  double sum = 0.0;
  for (double x : xs) sum += x;
  double expected = -0.5 * std::log((1.0 + 100.0 * 1e6) / 101.0) +
                    0.5 * sum * sum * (1e6 / (1.0 + 100.0 * 1e6) - 1.0 / 101.0);
  CHECK(diff == doctest::Approx(expected).epsilon(1e-10));

  const double xbar = mean(xs);
  for (auto& x : xs) x -= xbar;
  double centred = normal_mean_exact_log_marginal(xs, 0.0, 1e6) - normal_mean_exact_log_marginal(xs, 0.0, 1.0);
  CHECK(std::abs(centred + 0.5 * std::log(1e6)) <= 0.01);
}

TEST_CASE("linreg marginal: sufficient statistics agree with the explicit residual operator") {
  auto d = small_design();
  CHECK(linreg_exact_log_marginal(d) == doctest::Approx(linreg_explicit(d)).epsilon(1e-12));
  auto radiata = read_csv(std::string(WBIC_DATA_DIR) + "/radiata.csv");
  for (auto which : {RadiataModel::M1, RadiataModel::M2}) {
    auto p = radiata_problem(radiata, which);
    auto rd = make_regression_design(*p.data, LinRegPrior{});
    CHECK(linreg_exact_log_marginal(rd) == doctest::Approx(linreg_explicit(rd)).epsilon(1e-10));
  }
}

TEST_CASE("linreg marginal agrees with 3-d quadrature on a small design") {
  auto d = small_design();
  const std::size_t n = d.response.size();
  double sxx = 0.0, sxy = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += d.covariate[i] * d.covariate[i];
    sxy += d.covariate[i] * d.response[i];
    sy += d.response[i];
  }
  const double m11 = static_cast<double>(n) + d.q_diag[0], m22 = sxx + d.q_diag[1];
  // Conditional posterior centres, used only to place the integration windows.
  const double ca = (sy + d.q_diag[0] * d.prior_mean[0]) / m11;
  const double cb = (sxy + d.q_diag[1] * d.prior_mean[1]) / m22;

  boost::math::gamma_distribution<double> gam(d.a / 2.0, 2.0 / d.b);
  auto log_joint = [&](double alpha, double beta, double tau) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += normal_log_pdf(d.response[i], alpha + beta * d.covariate[i], 1.0 / tau);
    }
    acc += normal_log_pdf(alpha, d.prior_mean[0], 1.0 / (tau * d.q_diag[0]));
    acc += normal_log_pdf(beta, d.prior_mean[1], 1.0 / (tau * d.q_diag[1]));
    return acc + std::log(boost::math::pdf(gam, tau));
  };
  const double shift = log_joint(ca, cb, 1.0);
  auto over_beta = [&](double alpha, double tau) {
    const double h = 14.0 / std::sqrt(tau * m22);
    return integrate([&](double beta) { return std::exp(log_joint(alpha, beta, tau) - shift); },
                     cb - h, cb + h, 1e-11);
  };
  auto over_alpha = [&](double tau) {
    const double h = 14.0 / std::sqrt(tau * m11);
    return integrate([&](double alpha) { return over_beta(alpha, tau); }, ca - h, ca + h, 1e-10);
  };
  // tau = exp(s), dtau = tau ds.
  double z = integrate([&](double s) { return over_alpha(std::exp(s)) * std::exp(s); }, -12.0, 6.0, 1e-9);
  CHECK(std::abs(std::log(z) + shift - linreg_exact_log_marginal(d)) <= 1e-4);
}

TEST_CASE("property: the residual quadratic form is non-negative") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng() % 30);
    Eigen::MatrixXd X(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = 5.0 * z(rng);
    }
    X.col(1).array() -= X.col(1).mean();
    Eigen::Matrix2d Q = Eigen::Vector2d(u(rng), u(rng)).asDiagonal();
    Eigen::Matrix2d M = X.transpose() * X + Q;
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n) - X * M.inverse() * X.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    for (int j = 0; j < 10; ++j) {
      Eigen::VectorXd y(n);
      for (Eigen::Index i = 0; i < n; ++i) y(i) = 100.0 * z(rng);
      CHECK(y.dot(R * y) >= -1e-8 * y.squaredNorm());
    }
  }
}

TEST_CASE("linreg marginal error paths") {
  RegressionDesign d = small_design();
  d.covariate = {1e200, -1e200, 0.0, 0.0, 0.0};
  try {
    linreg_exact_log_marginal(d);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
  }
  auto bad = small_design();
  bad.covariate[0] += 1.0;
  CHECK_THROWS_AS(linreg_exact_log_marginal(bad), Error);
  bad = small_design();
  bad.q_diag[1] = 0.0;
  CHECK_THROWS_AS(linreg_exact_log_marginal(bad), Error);
  bad = small_design();
  bad.a = -1.0;
  CHECK_THROWS_AS(linreg_exact_log_marginal(bad), Error);
  bad = small_design();
  bad.response.pop_back();
  CHECK_THROWS_AS(linreg_exact_log_marginal(bad), Error);
}

TEST_CASE("closed forms are deterministic") {
  auto xs = normal_sample(25, 5);
  auto d = small_design();
  for (int k = 0; k < 5; ++k) {
    CHECK(normal_mean_exact_log_marginal(xs, 0.1, 2.0) == normal_mean_exact_log_marginal(xs, 0.1, 2.0));
    CHECK(normal_mean_wbic_analytic(xs, 0.1, 2.0) == normal_mean_wbic_analytic(xs, 0.1, 2.0));
    CHECK(linreg_exact_log_marginal(d) == linreg_exact_log_marginal(d));
  }
}
