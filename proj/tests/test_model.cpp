#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "wbic/dataset.hpp"
#include "wbic/error.hpp"
#include "wbic/models.hpp"

using namespace wbic;
using wbic::testing::normal_log_pdf;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Dataset radiata() { return read_csv(std::string(WBIC_DATA_DIR) + "/radiata.csv"); }

}  // namespace

TEST_CASE("log_lik_row examples") {
  auto nm = normal_mean_model(0.0, 1.0);
  std::vector<double> x0{0.0};
  CHECK(log_lik_row(*nm, nm->from_native(std::vector<double>{0.0}), x0) ==
        doctest::Approx(-kHalfLog2Pi).epsilon(1e-15));

  auto mix = mixture2_model();
  auto theta = mix->from_native(std::vector<double>{0.5, 0.0, 0.0});
  CHECK(log_lik_row(*mix, theta, x0) == doctest::Approx(-kHalfLog2Pi).epsilon(1e-14));

  // Radiata M1 row against a scalar normal density with the centered covariate.
  auto data = radiata();
  auto p = radiata_problem(data, RadiataModel::M1);
  auto xs = p.data->column(0);
  double xbar = 0.0;
  for (double x : xs) xbar += x;
  xbar /= 42.0;
  const double tau = 1e-6;
  auto th = p.model->from_native(std::vector<double>{3000.0, 185.0, tau});
  for (std::size_t i : {0u, 6u, 41u}) {
    auto row = p.data->row(i);
    double mean = 3000.0 + 185.0 * (row[0] - xbar);
    double expect = normal_log_pdf(row[1], mean, 1.0 / tau);
    CHECK(log_lik_row(*p.model, th, row) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("log_prior examples") {
  auto nm = normal_mean_model(0.0, 1.0);
  CHECK(log_prior(*nm, ParamVector({0.0})) == doctest::Approx(-kHalfLog2Pi));

  // Uniform(0,1) density is 1; the logit Jacobian at 0 is 1/4.
  auto mix = mixture2_model();
  double expect = std::log(0.25) + 2.0 * normal_log_pdf(0.0, 0.0, 10.0);
  CHECK(log_prior(*mix, ParamVector({0.0, 0.0, 0.0})) == doctest::Approx(expect).epsilon(1e-14));

  // Normal-gamma at the prior mean: Gaussian quadratic term is zero.
  LinRegPrior pr;
  auto lin = linreg_model(0.0, pr);
  const double tau = pr.a / pr.b;
  boost::math::gamma_distribution<double> gam(pr.a / 2.0, 2.0 / pr.b);
  double gauss = std::log(tau) + 0.5 * std::log(pr.q_diag[0] * pr.q_diag[1]) -
                 std::log(2.0 * std::numbers::pi);
  double jac = std::log(tau);
  double want = gauss + std::log(boost::math::pdf(gam, tau)) + jac;
  auto th = lin->from_native(std::vector<double>{3000.0, 185.0, tau});
  CHECK(log_prior(*lin, th) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("tempered_log_density examples") {
  auto nm = normal_mean_model(0.0, 1.0);
  auto data = wbic::testing::column_data({0.3, -1.2, 2.0});
  ParamVector th({0.4});
  CHECK(tempered_log_density(*nm, data->rows(), 0.0, th) == log_prior(*nm, th));

  // n = 1 via a one-row view.
  double x = 0.0;
  RowView one(&x, 1, 1);
  CHECK(tempered_log_density(*nm, one, 1.0, ParamVector({0.0})) ==
        doctest::Approx(-std::log(2.0 * std::numbers::pi)));

  auto mix = mixture2_model();
  auto five = wbic::testing::column_data({-1.0, 0.5, 0.0, 2.2, -0.3});
  ParamVector mth({0.7, -0.4, 1.1});
  double ll = 0.0;
  for (std::size_t i = 0; i < 5; ++i) ll += log_lik_row(*mix, mth, five->row(i));
  TemperedTarget target(mix, five, 0.5);
  CHECK(tempered_log_density(target, mth) ==
        doctest::Approx(0.5 * ll + log_prior(*mix, mth)).epsilon(1e-14));
}

TEST_CASE("tempered target rejects temperatures outside (0, 1]") {
  auto nm = normal_mean_model(0.0, 1.0);
  auto data = wbic::testing::column_data({0.0, 1.0});
  CHECK_THROWS_AS(TemperedTarget(nm, data, 0.0), Error);
  CHECK_THROWS_AS(TemperedTarget(nm, data, 1.5), Error);
  CHECK_NOTHROW(TemperedTarget(nm, data, 1.0));
  CHECK_THROWS_AS(tempered_log_density(*nm, data->rows(), -0.1, ParamVector({0.0})), Error);
}

TEST_CASE("structured errors for bad inputs") {
  auto mix = mixture2_model();
  std::vector<double> row{0.0};
  CHECK_THROWS_AS(ParamVector({0.0, std::numeric_limits<double>::quiet_NaN(), 1.0}), Error);
  try {
    log_lik_row(*mix, ParamVector({0.0, 1.0}), row);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  std::vector<double> wide{0.0, 1.0};
  CHECK_THROWS_AS(log_lik_row(*mix, ParamVector({0.0, 0.0, 0.0}), wide), Error);
  auto nm = normal_mean_model(0.0, 1.0);
  auto two_col = std::make_shared<const Dataset>(Dataset({"a", "b"}, {1, 2, 3, 4}));
  CHECK_THROWS_AS(TemperedTarget(nm, two_col, 0.5), Error);
}

TEST_CASE("built-in model metadata") {
  auto nm = normal_mean_model(0, 1);
  auto mix = mixture2_model();
  auto lin = linreg_model(0.0);
  CHECK(nm->dim() == 1);
  CHECK(mix->dim() == 3);
  CHECK(lin->dim() == 3);
  CHECK(nm->obs_width() == 1);
  CHECK(mix->obs_width() == 1);
  CHECK(lin->obs_width() == 2);
  CHECK(nm->rlct()->lambda == 0.5);
  CHECK(mix->rlct()->lambda == 0.75);
  CHECK(lin->rlct()->lambda == 1.5);
  for (const auto& m : {nm, mix, lin}) {
    CHECK(m->params().size() == m->dim());
    CHECK(m->rlct()->multiplicity == 1);
  }
  CHECK(mix->params()[0].support == Support::UnitInterval);
  CHECK(lin->params()[2].support == Support::Positive);
  CHECK_THROWS_AS(normal_mean_model(0.0, 0.0), Error);
}

TEST_CASE("property: densities are never NaN over fuzzed parameters") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  auto data = radiata();
  auto lin = radiata_problem(data, RadiataModel::M1);
  auto xs = wbic::testing::column_data(wbic::testing::normal_sample(20, 3));
  struct Case {
    ModelPtr model;
    std::shared_ptr<const Dataset> data;
  };
  std::vector<Case> cases{{normal_mean_model(0, 1), xs}, {mixture2_model(), xs}, {lin.model, lin.data}};
  for (const auto& c : cases) {
    for (int k = 0; k < 10000 / 3 + 1; ++k) {
      std::vector<double> v(c.model->dim());
      for (auto& x : v) x = u(rng);
      ParamVector th(v);
      double lp = log_prior(*c.model, th);
      REQUIRE_FALSE(std::isnan(lp));
      REQUIRE(lp < std::numeric_limits<double>::infinity());
      for (std::size_t i = 0; i < c.data->n(); i += 7) {
        double ll = log_lik_row(*c.model, th, c.data->row(i));
        REQUIRE_FALSE(std::isnan(ll));
        REQUIRE(ll < std::numeric_limits<double>::infinity());
      }
    }
  }
}

TEST_CASE("property: t = 1 minus t = 0 is the total log-likelihood") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(0.0, 2.0);
  auto data = radiata();
  auto lin = radiata_problem(data, RadiataModel::M2);
  auto xs = wbic::testing::column_data(wbic::testing::normal_sample(30, 9));
  std::vector<std::pair<ModelPtr, std::shared_ptr<const Dataset>>> cases{
      {normal_mean_model(1, 2), xs}, {mixture2_model(), xs}, {lin.model, lin.data}};
  for (auto& [model, d] : cases) {
    for (int k = 0; k < 50; ++k) {
      std::vector<double> v(model->dim());
      for (auto& x : v) x = z(rng);
      if (model->dim() == 3 && model->obs_width() == 2) {
        v = {3000 + 100 * z(rng), 185 + 10 * z(rng), -12 + z(rng)};
      }
      ParamVector th(v);
      double diff = tempered_log_density(*model, d->rows(), 1.0, th) -
                    tempered_log_density(*model, d->rows(), 0.0, th);
      double total = log_lik_total(*model, th, d->rows());
      CHECK(std::abs(diff - total) <= 1e-10 * std::max(1.0, std::abs(total)));
    }
  }
}

TEST_CASE("property: mixture likelihood is invariant under component swap") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.01, 0.99);
  std::normal_distribution<double> m(0.0, 3.0);
  auto mix = mixture2_model();
  auto d = wbic::testing::column_data(wbic::testing::normal_sample(200, 5));
  for (int k = 0; k < 200; ++k) {
    double alpha = a(rng), mu1 = m(rng), mu2 = m(rng);
    auto th = mix->from_native(std::vector<double>{alpha, mu1, mu2});
    auto sw = mix->from_native(std::vector<double>{1.0 - alpha, mu2, mu1});
    double l1 = log_lik_total(*mix, th, d->rows());
    double l2 = log_lik_total(*mix, sw, d->rows());
    CHECK(std::abs(l1 - l2) <= 1e-12 * std::max(1.0, std::abs(l1)));
  }
}

TEST_CASE("property: transform round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
  std::uniform_real_distribution<double> logpos(-20.0, 20.0);
  for (int k = 0; k < 10000; ++k) {
    double p = std::exp(logpos(rng));
    CHECK(std::abs(to_native(Support::Positive, to_unconstrained(Support::Positive, p)) - p) <=
          1e-12 * std::max(1.0, p));
    double a = unit(rng);
    CHECK(std::abs(to_native(Support::UnitInterval, to_unconstrained(Support::UnitInterval, a)) - a) <=
          1e-12);
    double r = logpos(rng);
    CHECK(to_native(Support::Real, to_unconstrained(Support::Real, r)) == r);
  }
}

TEST_CASE("unit-interval Jacobian matches a finite difference") {
  for (double u : {-8.0, -1.0, 0.0, 0.3, 5.0}) {
    const double h = 1e-6;
    double fd = (to_native(Support::UnitInterval, u + h) - to_native(Support::UnitInterval, u - h)) / (2 * h);
    CHECK(log_abs_jacobian(Support::UnitInterval, u) == doctest::Approx(std::log(fd)).epsilon(1e-8));
    double fdp = (std::exp(u + h) - std::exp(u - h)) / (2 * h);
    CHECK(log_abs_jacobian(Support::Positive, u) == doctest::Approx(std::log(fdp)).epsilon(1e-8));
  }
}

TEST_CASE("property: log-sum-exp mixture density equals the direct density") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  std::normal_distribution<double> m(0.0, 2.0);
  auto mix = mixture2_model();
  for (int k = 0; k < 2000; ++k) {
    double alpha = a(rng), mu1 = m(rng), mu2 = m(rng), x = m(rng);
    double direct = alpha * std::exp(-0.5 * (x - mu1) * (x - mu1)) / std::sqrt(2 * std::numbers::pi) +
                    (1 - alpha) * std::exp(-0.5 * (x - mu2) * (x - mu2)) / std::sqrt(2 * std::numbers::pi);
    if (direct < 1e-300) continue;
    std::vector<double> row{x};
    double lse = mix->log_lik_native(std::vector<double>{alpha, mu1, mu2}, row);
    CHECK(std::abs(lse - std::log(direct)) <= 1e-10);
  }
  // Far tail: the direct form underflows, log-sum-exp stays finite.
  std::vector<double> far{60.0};
  double ll = mix->log_lik_native(std::vector<double>{0.5, 0.0, 0.0}, far);
  CHECK(std::isfinite(ll));
  CHECK(ll == doctest::Approx(-kHalfLog2Pi - 1800.0));
}

TEST_CASE("prior sampling matches the prior moments") {
  std::mt19937_64 rng(1);
  auto lin = linreg_model(0.0);
  std::vector<double> th(3);
  double tau_sum = 0.0;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) {
    lin->sample_prior_native(rng, th);
    tau_sum += th[2];
  }
  // Gamma(shape a/2, rate b/2) has mean a/b.
  CHECK(tau_sum / draws == doctest::Approx(6.0 / 360000.0).epsilon(0.01));
}
