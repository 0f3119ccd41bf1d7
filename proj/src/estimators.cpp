#include "wbic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wbic/diagnostics.hpp"
#include "wbic/error.hpp"
#include "wbic/seeding.hpp"

namespace wbic {

TemperatureChoice inverse_temperature_wbic(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "t_w = 1/log n needs n >= 2");
  TemperatureChoice out;
  out.raw = 1.0 / std::log(static_cast<double>(n));
  out.clamped = out.raw > 1.0;
  out.t = out.clamped ? 1.0 : out.raw;
  return out;
}

namespace {

double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double v : xs) acc += v;
  return acc / static_cast<double>(xs.size());
}

/// Standard error of the mean of a per-draw series, deflated by the ESS
/// summed over chains.
double series_mcse(const DrawMatrix& draws, std::span<const double> series) {
  const std::size_t s = series.size();
  if (s < 2) return 0.0;
  const double mu = mean_of(series);
  double ss = 0.0;
  for (double v : series) ss += (v - mu) * (v - mu);
  const double var = ss / static_cast<double>(s - 1);
  if (var == 0.0) return 0.0;

  double ess = 0.0;
  const std::size_t per = draws.draws_per_chain();
  if (per >= 100) {
    for (std::size_t c = 0; c < draws.n_chains(); ++c) {
      ess += effective_sample_size(series.subspan(c * per, per)).value;
    }
  } else if (s >= 100) {
    ess = effective_sample_size(series).value;
  } else {
    ess = static_cast<double>(s);
  }
  return std::sqrt(var / ess);
}

void check_wbic_temperature(const DrawMatrix& draws) {
  const double tw = inverse_temperature_wbic(draws.n_obs()).t;
  if (std::abs(draws.t() - tw) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument,
                "draws were sampled at t = " + std::to_string(draws.t()) +
                    ", WBIC needs t_w = " + std::to_string(tw));
  }
}

/// Per-draw g_s = (t/2) sum_i (l_si - mean_i)^2; nu_hat = S/(S-1) mean(g).
std::vector<double> fluctuation_series(const DrawMatrix& draws) {
  const std::size_t s = draws.size();
  const std::size_t n = draws.n_obs();
  std::vector<double> col_mean(n, 0.0);
  for (std::size_t k = 0; k < s; ++k) {
    auto row = draws.loglik_row(k);
    for (std::size_t i = 0; i < n; ++i) col_mean[i] += row[i];
  }
  for (auto& m : col_mean) m /= static_cast<double>(s);

  std::vector<double> g(s);
  const double half_t = 0.5 * draws.t();
  for (std::size_t k = 0; k < s; ++k) {
    auto row = draws.loglik_row(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dv = row[i] - col_mean[i];
      acc += dv * dv;
    }
    g[k] = half_t * acc;
  }
  return g;
}

void require_finite_loglik(const DrawMatrix& draws) {
  for (double v : draws.total_loglik_series()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numerical, "non-finite log-likelihood in draws");
  }
}

}  // namespace

EstimateResult wbic(const DrawMatrix& draws) {
  check_wbic_temperature(draws);
  require_finite_loglik(draws);
  auto series = draws.total_loglik_series();
  EstimateResult r;
  r.estimator_name = "wbic";
  r.value = mean_of(series);
  r.mcse = series_mcse(draws, series);
  r.t_used = draws.t();
  if (inverse_temperature_wbic(draws.n_obs()).clamped) {
    r.warnings.push_back("1/log n exceeds 1 for n = 2; sampled at t = 1");
  }
  return r;
}

double gibbs_training_loss(const DrawMatrix& draws, std::size_t n) {
  if (n != draws.n_obs()) {
    throw Error(ErrorKind::DimensionMismatch, "sample size does not match the draws' observations");
  }
  return -wbic(draws).value / static_cast<double>(n);
}

EstimateResult singular_fluctuation_hat(const DrawMatrix& draws) {
  const std::size_t s = draws.size();
  if (s < 2) throw Error(ErrorKind::InvalidArgument, "nu_hat needs at least 2 draws");
  require_finite_loglik(draws);
  auto g = fluctuation_series(draws);
  const double bessel = static_cast<double>(s) / static_cast<double>(s - 1);
  EstimateResult r;
  r.estimator_name = "nu_hat";
  r.value = bessel * mean_of(g);
  r.mcse = bessel * series_mcse(draws, g);
  r.t_used = draws.t();
  return r;
}

EstimateResult adjusted_wbic(const DrawMatrix& draws) {
  EstimateResult w = wbic(draws);
  EstimateResult nu = singular_fluctuation_hat(draws);

  const std::size_t s = draws.size();
  const double bessel = static_cast<double>(s) / static_cast<double>(s - 1);
  auto g = fluctuation_series(draws);
  auto totals = draws.total_loglik_series();
  std::vector<double> h(s);
  for (std::size_t k = 0; k < s; ++k) h[k] = totals[k] - bessel * g[k];

  EstimateResult r;
  r.estimator_name = "adjusted_wbic";
  r.value = w.value - nu.value;
  r.mcse = series_mcse(draws, h);
  r.t_used = draws.t();
  return r;
}

TemperatureLadder::TemperatureLadder(std::size_t rungs, double schedule_power)
    : power_(schedule_power) {
  if (rungs == 0) throw Error(ErrorKind::InvalidArgument, "ladder needs at least one rung");
  if (!(schedule_power > 0) || !std::isfinite(schedule_power)) {
    throw Error(ErrorKind::InvalidArgument, "schedule power must be positive");
  }
  for (std::size_t k = 1; k <= rungs; ++k) {
    ts_.push_back(std::pow(static_cast<double>(k) / static_cast<double>(rungs), schedule_power));
  }
  ts_.back() = 1.0;
  for (std::size_t k = 1; k < ts_.size(); ++k) {
    if (!(ts_[k] > ts_[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "ladder temperatures must be strictly increasing");
    }
  }
  if (!(ts_.front() > 0)) throw Error(ErrorKind::InvalidArgument, "ladder temperatures must be > 0");
}

ThermodynamicIntegration thermodynamic_integration(const ModelPtr& model,
                                                   const std::shared_ptr<const Dataset>& data,
                                                   const TemperatureLadder& ladder,
                                                   const ChainConfig& config,
                                                   std::size_t prior_draws, Execution exec) {
  config.validate();
  if (prior_draws < 2) throw Error(ErrorKind::InvalidArgument, "TI needs >= 2 prior draws");
  if (data->width() != model->obs_width()) {
    throw Error(ErrorKind::DimensionMismatch, model->name() + ": dataset width mismatch");
  }

  ThermodynamicIntegration out;
  out.estimate.estimator_name = "ti";
  out.estimate.t_used = 1.0;

  // t = 0 node: exact prior draws.
  {
    auto rng = stream_rng(derive_seed(config.seed, 0x7105ULL), 0);
    std::vector<double> native(model->dim());
    std::vector<double> ll(data->n());
    double mu = 0.0, m2 = 0.0;
    for (std::size_t k = 1; k <= prior_draws; ++k) {
      model->sample_prior_native(rng, native);
      model->log_lik_rows_native(native, data->rows(), ll);
      double tot = 0.0;
      for (double v : ll) tot += v;
      if (!std::isfinite(tot)) {
        throw Error(ErrorKind::Numerical, "non-finite log-likelihood at a prior draw");
      }
      double delta = tot - mu;
      mu += delta / static_cast<double>(k);
      m2 += delta * (tot - mu);
    }
    out.ts.push_back(0.0);
    out.means.push_back(mu);
    out.mcse.push_back(std::sqrt(m2 / static_cast<double>(prior_draws - 1) /
                                 static_cast<double>(prior_draws)));
    out.rhat_max.push_back(std::numeric_limits<double>::quiet_NaN());
  }

  for (std::size_t k = 0; k < ladder.ts().size(); ++k) {
    ChainConfig rung = config;
    rung.seed = derive_seed(config.seed, k + 1);
    TemperedTarget target(model, data, ladder.ts()[k]);
    auto res = sample_tempered(target, rung, exec);
    auto series = res.draws.total_loglik_series();
    out.ts.push_back(ladder.ts()[k]);
    out.means.push_back(mean_of(series));
    out.mcse.push_back(series_mcse(res.draws, series));
    out.rhat_max.push_back(res.diagnostics.rhat_max());
    if (res.diagnostics.rhat_warning) {
      out.estimate.warnings.push_back("rung t = " + std::to_string(ladder.ts()[k]) +
                                      " has rhat > 1.1");
    }
  }
  if (ladder.ts().size() == 1) {
    out.estimate.warnings.push_back("single-rung ladder: quadrature is strongly biased");
  }

  double value = 0.0;
  std::vector<double> weight(out.ts.size(), 0.0);
  for (std::size_t k = 1; k < out.ts.size(); ++k) {
    double h = out.ts[k] - out.ts[k - 1];
    value += 0.5 * h * (out.means[k] + out.means[k - 1]);
    weight[k] += 0.5 * h;
    weight[k - 1] += 0.5 * h;
  }
  double var = 0.0;
  for (std::size_t k = 0; k < out.ts.size(); ++k) var += weight[k] * weight[k] * out.mcse[k] * out.mcse[k];
  out.estimate.value = value;
  out.estimate.mcse = std::sqrt(var);
  return out;
}

EstimateResult prior_monte_carlo(const ModelSpec& model, const Dataset& data,
                                 std::size_t n_draws, std::uint64_t seed) {
  if (n_draws == 0) throw Error(ErrorKind::InvalidArgument, "prior MC needs n_draws >= 1");
  if (data.width() != model.obs_width()) {
    throw Error(ErrorKind::DimensionMismatch, model.name() + ": dataset width mismatch");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto rng = stream_rng(seed, 0);
  std::vector<double> native(model.dim());
  std::vector<double> ll(data.n());

  // Streaming log-sum-exp: s1 = sum exp(l - hi), s2 = sum exp(2 (l - hi)).
  double hi = kNegInf, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n_draws; ++k) {
    model.sample_prior_native(rng, native);
    model.log_lik_rows_native(native, data.rows(), ll);
    double tot = 0.0;
    for (double v : ll) tot += v;
    if (std::isnan(tot) || tot == kNegInf) continue;
    if (tot > hi) {
      double f = hi == kNegInf ? 0.0 : std::exp(hi - tot);
      s1 *= f;
      s2 *= f * f;
      hi = tot;
    }
    double w = std::exp(tot - hi);
    s1 += w;
    s2 += w * w;
  }
  if (hi == kNegInf || !(s1 > 0)) {
    throw Error(ErrorKind::Numerical, "prior MC: every draw has zero likelihood");
  }
  const double nd = static_cast<double>(n_draws);
  EstimateResult r;
  r.estimator_name = "prior_mc";
  r.value = hi + std::log(s1 / nd);
  r.t_used = 1.0;
  if (n_draws > 1) {
    double wbar = s1 / nd;
    double var_w = std::max(0.0, (s2 / nd - wbar * wbar)) * nd / (nd - 1.0);
    r.mcse = std::sqrt(var_w / nd) / wbar;
  }
  return r;
}

}  // namespace wbic
