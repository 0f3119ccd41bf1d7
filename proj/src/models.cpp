#include "wbic/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wbic/error.hpp"

namespace wbic {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_logpdf(double x, double mean, double var) {
  double z = x - mean;
  return -kHalfLog2Pi - 0.5 * std::log(var) - 0.5 * z * z / var;
}

class NormalMean final : public ModelSpec {
 public:
  NormalMean(double m, double v)
      : ModelSpec("normal_mean", {{"theta", Support::Real}}, 1, RlctInfo{0.5, 1}),
        m_(m),
        v_(v) {
    if (!(v > 0) || !std::isfinite(m) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "normal_mean: need finite m and v > 0");
    }
  }

  double log_lik_native(std::span<const double> th, std::span<const double> row) const override {
    double z = row[0] - th[0];
    return -kHalfLog2Pi - 0.5 * z * z;
  }

  void log_lik_rows_native(std::span<const double> th, RowView rows,
                           std::span<double> out) const override {
    const double mu = th[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double z = rows[i][0] - mu;
      out[i] = -kHalfLog2Pi - 0.5 * z * z;
    }
  }

  double log_prior_native(std::span<const double> th) const override {
    return normal_logpdf(th[0], m_, v_);
  }

  void sample_prior_native(std::mt19937_64& rng, std::span<double> th) const override {
    th[0] = std::normal_distribution<double>(m_, std::sqrt(v_))(rng);
  }

 private:
  double m_;
  double v_;
};

class Mixture2 final : public ModelSpec {
 public:
  explicit Mixture2(double mu_var)
      : ModelSpec("mixture2",
                  {{"alpha", Support::UnitInterval}, {"mu1", Support::Real}, {"mu2", Support::Real}},
                  1, RlctInfo{0.75, 1}),
        mu_var_(mu_var) {
    if (!(mu_var > 0)) throw Error(ErrorKind::InvalidArgument, "mixture2: prior variance must be positive");
  }

  double log_lik_native(std::span<const double> th, std::span<const double> row) const override {
    double la = std::log(th[0]);
    double lb = std::log1p(-th[0]);
    double z1 = row[0] - th[1];
    double z2 = row[0] - th[2];
    return log_sum_exp(la - 0.5 * z1 * z1, lb - 0.5 * z2 * z2) - kHalfLog2Pi;
  }

  void log_lik_rows_native(std::span<const double> th, RowView rows,
                           std::span<double> out) const override {
    const double la = std::log(th[0]);
    const double lb = std::log1p(-th[0]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double z1 = rows[i][0] - th[1];
      double z2 = rows[i][0] - th[2];
      out[i] = log_sum_exp(la - 0.5 * z1 * z1, lb - 0.5 * z2 * z2) - kHalfLog2Pi;
    }
  }

  double log_prior_native(std::span<const double> th) const override {
    if (!(th[0] >= 0.0 && th[0] <= 1.0)) return kNegInf;
    return normal_logpdf(th[1], 0.0, mu_var_) + normal_logpdf(th[2], 0.0, mu_var_);
  }

  void sample_prior_native(std::mt19937_64& rng, std::span<double> th) const override {
    std::normal_distribution<double> mu(0.0, std::sqrt(mu_var_));
    th[0] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    th[1] = mu(rng);
    th[2] = mu(rng);
  }

 private:
  double mu_var_;
};

class LinReg final : public ModelSpec {
 public:
  LinReg(double xbar, LinRegPrior prior, std::string name)
      : ModelSpec(std::move(name),
                  {{"alpha", Support::Real}, {"beta", Support::Real}, {"tau", Support::Positive}}, 2,
                  RlctInfo{1.5, 1}),
        xbar_(xbar),
        prior_(prior) {
    if (!(prior.q_diag[0] > 0 && prior.q_diag[1] > 0 && prior.a > 0 && prior.b > 0)) {
      throw Error(ErrorKind::InvalidArgument, "linreg: need Q > 0, a > 0, b > 0");
    }
    shape_ = 0.5 * prior.a;
    rate_ = 0.5 * prior.b;
    gamma_norm_ = shape_ * std::log(rate_) - std::lgamma(shape_);
    half_log_det_q_ = 0.5 * std::log(prior.q_diag[0] * prior.q_diag[1]);
  }

  double log_lik_native(std::span<const double> th, std::span<const double> row) const override {
    const double tau = th[2];
    if (!(tau > 0) || !std::isfinite(tau)) return kNegInf;
    double r = row[1] - th[0] - th[1] * (row[0] - xbar_);
    return 0.5 * std::log(tau) - kHalfLog2Pi - 0.5 * tau * r * r;
  }

  void log_lik_rows_native(std::span<const double> th, RowView rows,
                           std::span<double> out) const override {
    const double tau = th[2];
    if (!(tau > 0) || !std::isfinite(tau)) {
      for (auto& o : out) o = kNegInf;
      return;
    }
    const double c = 0.5 * std::log(tau) - kHalfLog2Pi;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double r = rows[i][1] - th[0] - th[1] * (rows[i][0] - xbar_);
      out[i] = c - 0.5 * tau * r * r;
    }
  }

  double log_prior_native(std::span<const double> th) const override {
    const double tau = th[2];
    if (!(tau > 0) || !std::isfinite(tau)) return kNegInf;
    const double log_tau = std::log(tau);
    double da = th[0] - prior_.mean[0];
    double db = th[1] - prior_.mean[1];
    double quad = prior_.q_diag[0] * da * da + prior_.q_diag[1] * db * db;
    double coef = log_tau + half_log_det_q_ - 2.0 * kHalfLog2Pi - 0.5 * tau * quad;
    double prec = gamma_norm_ + (shape_ - 1.0) * log_tau - rate_ * tau;
    return coef + prec;
  }

  void sample_prior_native(std::mt19937_64& rng, std::span<double> th) const override {
    double tau = std::gamma_distribution<double>(shape_, 1.0 / rate_)(rng);
    std::normal_distribution<double> z(0.0, 1.0);
    th[0] = prior_.mean[0] + z(rng) / std::sqrt(tau * prior_.q_diag[0]);
    th[1] = prior_.mean[1] + z(rng) / std::sqrt(tau * prior_.q_diag[1]);
    th[2] = tau;
  }

 private:
  double xbar_;
  LinRegPrior prior_;
  double shape_ = 0;
  double rate_ = 0;
  double gamma_norm_ = 0;
  double half_log_det_q_ = 0;
};

}  // namespace

ModelPtr normal_mean_model(double prior_mean, double prior_var) {
  return std::make_shared<NormalMean>(prior_mean, prior_var);
}

ModelPtr mixture2_model(double mu_prior_var) { return std::make_shared<Mixture2>(mu_prior_var); }

ModelPtr linreg_model(double covariate_mean, LinRegPrior prior, std::string name) {
  return std::make_shared<LinReg>(covariate_mean, prior, std::move(name));
}

RegressionProblem radiata_problem(const Dataset& radiata, RadiataModel which, LinRegPrior prior) {
  const char* covariate = which == RadiataModel::M1 ? kRadiataDensity : kRadiataResinDensity;
  auto data = std::make_shared<const Dataset>(radiata.select({covariate, kRadiataStrength}));
  auto xs = data->column(0);
  double xbar = 0.0;
  for (double x : xs) xbar += x;
  xbar /= static_cast<double>(xs.size());
  std::string name = which == RadiataModel::M1 ? "linreg_m1" : "linreg_m2";
  return {linreg_model(xbar, prior, name), std::move(data)};
}

}  // namespace wbic
