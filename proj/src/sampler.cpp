#include "wbic/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "wbic/diagnostics.hpp"
#include "wbic/error.hpp"
#include "wbic/seeding.hpp"

namespace wbic {

void ChainConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (n_chains == 0) bad("n_chains must be positive");
  if (warmup == 0) bad("warmup must be positive");
  if (keep == 0) bad("keep must be positive");
  if (thin == 0) bad("thin must be positive");
  if (!(init_scale > 0) || !std::isfinite(init_scale)) bad("init_scale must be positive");
  if (!(target_accept > 0.1 && target_accept < 0.6)) bad("target_accept must lie in (0.1, 0.6)");
  if (keep / thin < 100) bad("keep / thin must be >= 100 retained draws per chain");
}

DrawMatrix::DrawMatrix(std::size_t dim, std::size_t n_obs, double t, std::size_t n_chains,
                       std::vector<double> draws, std::vector<double> loglik)
    : dim_(dim),
      n_obs_(n_obs),
      t_(t),
      n_chains_(n_chains),
      draws_(std::move(draws)),
      loglik_(std::move(loglik)) {
  if (dim_ == 0 || n_obs_ == 0 || n_chains_ == 0) {
    throw Error(ErrorKind::InvalidArgument, "draw matrix needs positive dim, n_obs and chains");
  }
  if (draws_.size() % dim_ != 0) throw Error(ErrorKind::DimensionMismatch, "draw buffer size");
  const std::size_t s = draws_.size() / dim_;
  if (loglik_.size() != s * n_obs_) {
    throw Error(ErrorKind::DimensionMismatch, "loglik buffer does not match draw count");
  }
  if (s == 0 || s % n_chains_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "draw count must be a positive multiple of chains");
  }
  totals_.resize(s);
  for (std::size_t k = 0; k < s; ++k) {
    double acc = 0.0;
    for (double v : loglik_row(k)) acc += v;
    totals_[k] = acc;
  }
}

double Diagnostics::rhat_max() const {
  double hi = 1.0;
  for (double r : rhat) {
    if (std::isnan(r)) continue;
    hi = std::max(hi, r);
  }
  return hi;
}

std::mt19937_64 chain_rng(std::uint64_t seed, std::size_t chain_index) {
  return stream_rng(seed, chain_index);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Unconstrained-space tempered log density with reusable buffers.
class Evaluator {
 public:
  explicit Evaluator(const TemperedTarget& target)
      : model_(target.model()), rows_(target.data().rows()), t_(target.t()),
        native_(model_.dim()) {}

  double operator()(std::span<const double> u, std::span<double> row_out) {
    model_.to_native(u, native_);
    double lp = model_.log_prior_native(native_);
    if (!(lp > kNegInf)) return kNegInf;
    lp += model_.log_jacobian(u);
    model_.log_lik_rows_native(native_, rows_, row_out);
    double ll = 0.0;
    for (double v : row_out) ll += v;
    double out = t_ * ll + lp;
    return std::isnan(out) ? kNegInf : out;
  }

 private:
  const ModelSpec& model_;
  RowView rows_;
  double t_;
  std::vector<double> native_;
};

/// Running mean and covariance (Welford).
class CovAccumulator {
 public:
  explicit CovAccumulator(std::size_t d) : d_(d), mean_(d, 0.0), m2_(d * d, 0.0) {}

  void reset() {
    count_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

  void add(std::span<const double> x) {
    ++count_;
    std::vector<double> delta(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      delta[i] = x[i] - mean_[i];
      mean_[i] += delta[i] / static_cast<double>(count_);
    }
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) m2_[i * d_ + j] += delta[i] * (x[j] - mean_[j]);
    }
  }

  std::size_t count() const { return count_; }

  Eigen::MatrixXd covariance() const {
    Eigen::MatrixXd c(d_, d_);
    const double denom = static_cast<double>(count_ > 1 ? count_ - 1 : 1);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) c(i, j) = m2_[i * d_ + j] / denom;
    }
    return 0.5 * (c + c.transpose());
  }

 private:
  std::size_t d_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Sets the kernel's Cholesky factor from a covariance; keeps the old factor
/// when the estimate is not positive definite.
void set_kernel_covariance(ProposalKernel& kernel, Eigen::MatrixXd cov, bool diagonal_only) {
  const auto d = cov.rows();
  if (diagonal_only) cov = Eigen::MatrixXd(cov.diagonal().asDiagonal());
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(cov(i, i) > 0) || !std::isfinite(cov(i, i))) return;
    cov(i, i) *= 1.0 + 1e-8;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return;
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.allFinite()) return;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) kernel.chol[i * d + j] = j <= i ? l(i, j) : 0.0;
  }
}

void propose(const ChainState& s, std::span<const double> z, std::span<double> out) {
  const std::size_t d = s.position.size();
  const double scale = std::exp(s.kernel.log_scale);
  for (std::size_t i = 0; i < d; ++i) {
    double step = 0.0;
    for (std::size_t j = 0; j <= i; ++j) step += s.kernel.chol[i * d + j] * z[j];
    out[i] = s.position[i] + scale * step;
  }
}

struct StepResult {
  double accept_prob;
  bool accepted;
};

StepResult metropolis_step(ChainState& s, Evaluator& eval, std::vector<double>& z,
                       std::vector<double>& cand, std::vector<double>& cand_rows) {
  for (auto& v : z) v = s.normal(s.rng);
  propose(s, z, cand);
  double ld = eval(cand, cand_rows);
  double log_ratio = ld - s.log_density;
  double accept_prob = log_ratio >= 0 ? 1.0 : std::exp(log_ratio);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(s.rng);
  bool accepted = ld > kNegInf && std::log(u) < log_ratio;
  if (accepted) {
    s.position.swap(cand);
    s.row_loglik.swap(cand_rows);
    s.log_density = ld;
  }
  return {std::isnan(accept_prob) ? 0.0 : accept_prob, accepted};
}

}  // namespace

ChainState warmup_chain(const TemperedTarget& target, const ChainConfig& config,
                        std::size_t chain_index) {
  config.validate();
  const ModelSpec& model = target.model();
  const std::size_t d = model.dim();
  const std::size_t n = target.data().n();
  Evaluator eval(target);

  ChainState s;
  s.rng = chain_rng(config.seed, chain_index);
  s.row_loglik.assign(n, 0.0);
  s.kernel.chol.assign(d * d, 0.0);

  // Start from an exact prior draw; the initial proposal covariance is
  // init_scale^2 times the prior covariance in unconstrained space.
  bool started = false;
  for (int attempt = 0; attempt < 100 && !started; ++attempt) {
    ParamVector p;
    try {
      p = sample_prior(model, s.rng);
    } catch (const Error&) {
      continue;
    }
    s.position.assign(p.values().begin(), p.values().end());
    s.log_density = eval(s.position, s.row_loglik);
    started = std::isfinite(s.log_density);
  }
  if (!started) {
    throw Error(ErrorKind::Sampler,
                model.name() + ": non-finite log density at initialization after 100 retries");
  }

  CovAccumulator prior_cov(d);
  std::mt19937_64 prior_rng = stream_rng(derive_seed(config.seed, 0x70c0ULL), chain_index);
  for (int k = 0; k < 200; ++k) {
    try {
      prior_cov.add(sample_prior(model, prior_rng).values());
    } catch (const Error&) {
    }
  }
  for (std::size_t i = 0; i < d; ++i) s.kernel.chol[i * d + i] = 1.0;
  if (prior_cov.count() > 2) set_kernel_covariance(s.kernel, prior_cov.covariance(), true);
  s.kernel.log_scale = std::log(config.init_scale * 2.38 / std::sqrt(static_cast<double>(d)));

  std::vector<double> z(d), cand(d), cand_rows(n);
  CovAccumulator acc(d);
  const std::size_t w = config.warmup;
  const std::size_t collect_from = w / 10;
  const std::size_t full_from = w / 2;

  for (std::size_t k = 1; k <= w; ++k) {
    double a = metropolis_step(s, eval, z, cand, cand_rows).accept_prob;
    s.kernel.log_scale += std::pow(static_cast<double>(k), -0.6) * (a - config.target_accept);

    if (k < collect_from) continue;
    acc.add(s.position);
    if (k < full_from) {
      if (acc.count() >= 20 && k % 50 == 0) set_kernel_covariance(s.kernel, acc.covariance(), true);
    } else if (k == full_from) {
      if (acc.count() > 2 * d + 10) set_kernel_covariance(s.kernel, acc.covariance(), false);
      acc.reset();
    } else if (acc.count() >= std::max<std::size_t>(2 * d + 10, 50) && k % 100 == 0) {
      set_kernel_covariance(s.kernel, acc.covariance(), false);
    }
  }
  return s;
}

ChainDraws run_fixed_kernel(const TemperedTarget& target, ChainState& state, std::size_t keep,
                            std::size_t thin) {
  if (thin == 0) throw Error(ErrorKind::InvalidArgument, "thin must be positive");
  const std::size_t d = target.model().dim();
  const std::size_t n = target.data().n();
  if (state.position.size() != d || state.row_loglik.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "chain state does not match target");
  }
  Evaluator eval(target);
  std::vector<double> z(d), cand(d), cand_rows(n);

  ChainDraws out;
  out.draws.reserve(keep / thin * d);
  out.loglik.reserve(keep / thin * n);
  for (std::size_t k = 1; k <= keep; ++k) {
    if (metropolis_step(state, eval, z, cand, cand_rows).accepted) ++out.accepted;
    ++out.proposed;
    if (k % thin == 0) {
      out.draws.insert(out.draws.end(), state.position.begin(), state.position.end());
      out.loglik.insert(out.loglik.end(), state.row_loglik.begin(), state.row_loglik.end());
    }
  }
  return out;
}

SampleResult sample_tempered(const TemperedTarget& target, const ChainConfig& config,
                             Execution exec) {
  config.validate();
  const std::size_t d = target.model().dim();
  const std::size_t n = target.data().n();

  auto run_one = [&](std::size_t c) {
    ChainState s = warmup_chain(target, config, c);
    return run_fixed_kernel(target, s, config.keep, config.thin);
  };

  std::vector<ChainDraws> chains(config.n_chains);
  if (exec == Execution::Parallel && config.n_chains > 1) {
    std::vector<std::future<ChainDraws>> futs;
    for (std::size_t c = 0; c < config.n_chains; ++c) {
      futs.push_back(std::async(std::launch::async, run_one, c));
    }
    for (std::size_t c = 0; c < config.n_chains; ++c) chains[c] = futs[c].get();
  } else {
    for (std::size_t c = 0; c < config.n_chains; ++c) chains[c] = run_one(c);
  }

  std::vector<double> draws, loglik;
  Diagnostics diag;
  for (auto& ch : chains) {
    draws.insert(draws.end(), ch.draws.begin(), ch.draws.end());
    loglik.insert(loglik.end(), ch.loglik.begin(), ch.loglik.end());
    diag.accept_rate.push_back(static_cast<double>(ch.accepted) /
                               static_cast<double>(std::max<std::size_t>(ch.proposed, 1)));
  }
  DrawMatrix dm(d, n, target.t(), config.n_chains, std::move(draws), std::move(loglik));

  const std::size_t per = dm.draws_per_chain();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::vector<double>> series(config.n_chains, std::vector<double>(per));
    for (std::size_t c = 0; c < config.n_chains; ++c) {
      for (std::size_t k = 0; k < per; ++k) series[c][k] = dm.draw(c * per + k)[j];
    }
    double ess = 0.0;
    for (const auto& s : series) ess += effective_sample_size(s).value;
    diag.ess.push_back(ess);

    std::vector<std::span<const double>> views;
    if (config.n_chains >= 2) {
      for (const auto& s : series) views.emplace_back(s);
    } else if (per >= 200) {
      std::span<const double> all(series[0]);
      views = {all.subspan(0, per / 2), all.subspan(per - per / 2)};
    }
    double rhat = views.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : potential_scale_reduction(views).value;
    diag.rhat.push_back(rhat);
    if (rhat > 1.1) diag.rhat_warning = true;
  }
  return {std::move(dm), std::move(diag)};
}

}  // namespace wbic
