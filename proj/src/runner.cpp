#include "wbic/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "wbic/draw_io.hpp"
#include "wbic/error.hpp"
#include "wbic/estimators.hpp"
#include "wbic/oracles.hpp"
#include "wbic/seeding.hpp"

#ifndef WBIC_VERSION
#define WBIC_VERSION "dev"
#endif

namespace wbic {

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "summarize needs a nonempty list");
  // Shifted by the first value: a constant column summarizes to exactly
  // (value, 0).
  Summary s;
  const double origin = values.front();
  double shifted = 0.0;
  for (double v : values) shifted += v - origin;
  s.mean = origin + shifted / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

const EstimatorSummary& Report::get(EstimatorId id) const {
  for (const auto& e : estimators) {
    if (e.estimator == id) return e;
  }
  throw Error(ErrorKind::InvalidArgument, std::string("report has no estimator ") + estimator_name(id));
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("WBIC_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Problem {
  ModelPtr model;
  std::shared_ptr<const Dataset> data;
};

Problem build_problem(const ExperimentConfig& c, const std::shared_ptr<const Dataset>& file_data,
                      std::size_t replicate) {
  std::shared_ptr<const Dataset> data = file_data;
  if (c.synthetic) {
    auto rng = stream_rng(derive_seed(c.synthetic->base_seed, replicate), 0);
    std::normal_distribution<double> dist(c.synthetic->mean, c.synthetic->sd);
    std::vector<double> xs(c.synthetic->n);
    for (auto& x : xs) x = dist(rng);
    data = std::make_shared<const Dataset>(single_column("x", std::move(xs)));
  }
  const auto& id = c.model.id;
  if (id == "normal_mean") return {normal_mean_model(c.model.prior_mean, c.model.prior_var), data};
  if (id == "mixture2") return {mixture2_model(c.model.mu_prior_var), data};
  auto which = id == "linreg_m1" ? RadiataModel::M1 : RadiataModel::M2;
  auto rp = radiata_problem(*data, which, c.model.linreg);
  return {rp.model, rp.data};
}

double exact_value(const ExperimentConfig& c, const Problem& p) {
  if (c.model.id == "normal_mean") {
    auto xs = p.data->column(0);
    return normal_mean_exact_log_marginal(xs, c.model.prior_mean, c.model.prior_var);
  }
  return linreg_exact_log_marginal(make_regression_design(*p.data, c.model.linreg));
}

std::vector<ReplicateRecord> run_replicate(const ExperimentConfig& c,
                                           const std::shared_ptr<const Dataset>& file_data,
                                           std::size_t r, std::vector<std::string>& notes) {
  const Problem p = build_problem(c, file_data, r);
  const std::uint64_t seed_r = derive_seed(c.sampler.seed, r);
  std::vector<ReplicateRecord> out;
  auto record = [&](EstimatorId id, double value, double mcse, double rhat, std::uint64_t seed) {
    out.push_back({r, id, value, mcse, rhat, seed});
  };

  std::optional<SampleResult> tw_draws;
  const std::uint64_t tw_seed = derive_seed(seed_r, 1);
  auto need_tw = [&]() -> const SampleResult& {
    if (!tw_draws) {
      auto tw = inverse_temperature_wbic(p.data->n());
      if (tw.clamped) notes.push_back("t_w clamped to 1 (n <= 2)");
      ChainConfig cfg = c.sampler;
      cfg.seed = tw_seed;
      TemperedTarget target(p.model, p.data, tw.t);
      tw_draws = sample_tempered(target, cfg, Execution::Sequential);
      if (c.dump_draws && !c.output_path.empty()) {
        std::ofstream f(c.output_path.string() + ".draws.r" + std::to_string(r) + ".tsv");
        write_draws(f, tw_draws->draws);
      }
    }
    return *tw_draws;
  };

  for (EstimatorId id : c.estimators) {
    switch (id) {
      case EstimatorId::Exact:
        record(id, exact_value(c, p), 0.0, kNaN, 0);
        break;
      case EstimatorId::Wbic: {
        const auto& s = need_tw();
        auto e = wbic(s.draws);
        record(id, e.value, e.mcse, s.diagnostics.rhat_max(), tw_seed);
        break;
      }
      case EstimatorId::AdjustedWbic: {
        const auto& s = need_tw();
        auto e = adjusted_wbic(s.draws);
        record(id, e.value, e.mcse, s.diagnostics.rhat_max(), tw_seed);
        break;
      }
      case EstimatorId::NuHat: {
        const auto& s = need_tw();
        auto e = singular_fluctuation_hat(s.draws);
        record(id, e.value, e.mcse, s.diagnostics.rhat_max(), tw_seed);
        break;
      }
      case EstimatorId::Ti: {
        ChainConfig cfg = c.sampler;
        cfg.seed = derive_seed(seed_r, 2);
        auto ti = thermodynamic_integration(p.model, p.data, TemperatureLadder(c.ti_rungs, c.ti_power),
                                            cfg, c.ti_prior_draws, Execution::Sequential);
        double rmax = 1.0;
        for (double v : ti.rhat_max) {
          if (!std::isnan(v)) rmax = std::max(rmax, v);
        }
        record(id, ti.estimate.value, ti.estimate.mcse, rmax, cfg.seed);
        break;
      }
      case EstimatorId::PriorMc: {
        auto seed = derive_seed(seed_r, 3);
        auto e = prior_monte_carlo(*p.model, *p.data, c.prior_mc_draws, seed);
        record(id, e.value, e.mcse, kNaN, seed);
        break;
      }
    }
  }
  return out;
}

}  // namespace

Report run_experiment(const ExperimentConfig& c, const RunOptions& options) {
  validate_config(c);
  const auto start = std::chrono::steady_clock::now();

  std::shared_ptr<const Dataset> file_data;
  if (c.data_path) {
    try {
      file_data = std::make_shared<const Dataset>(read_csv(*c.data_path));
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, e.what());
    }
  }

  const std::size_t workers =
      std::min(c.replicates, options.workers ? options.workers : default_worker_count());
  std::vector<std::vector<ReplicateRecord>> per_rep(c.replicates);
  std::vector<std::vector<std::string>> per_rep_notes(c.replicates);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::mutex progress_mu;

  auto work = [&] {
    while (true) {
      std::size_t r = next.fetch_add(1);
      if (r >= c.replicates) return;
      {
        std::lock_guard lock(err_mu);
        if (first_error) return;
      }
      try {
        per_rep[r] = run_replicate(c, file_data, r, per_rep_notes[r]);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mu);
        options.progress(d, c.replicates);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  Report report;
  report.config_hash = c.hash();
  report.software_version = WBIC_VERSION;
  for (auto id : c.estimators) report.estimators.push_back({id, {}, {}});
  for (std::size_t r = 0; r < c.replicates; ++r) {
    for (const auto& rec : per_rep[r]) {
      report.records.push_back(rec);
      for (auto& e : report.estimators) {
        if (e.estimator == rec.estimator) e.values.push_back(rec.value);
      }
    }
    for (auto& n : per_rep_notes[r]) {
      if (std::find(report.notes.begin(), report.notes.end(), n) == report.notes.end()) {
        report.notes.push_back(n);
      }
    }
  }
  for (auto& e : report.estimators) e.summary = summarize(e.values);
  if (c.wants(EstimatorId::PriorMc) && c.prior_mc_draws < 10000000) {
    report.notes.push_back("prior MC uses " + std::to_string(c.prior_mc_draws) +
                           " draws per replicate (reference protocol: 10^7)");
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(std::ostream& out, const Report& report) {
  out << "replicate,estimator,value,mcse,rhat_max,seed\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "NA";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const auto& r : report.records) {
    out << r.replicate << ',' << estimator_name(r.estimator) << ',' << num(r.value) << ','
        << num(r.mcse) << ',' << num(r.rhat_max) << ',' << r.seed << '\n';
  }
}

std::string format_summary_table(const Report& report, const ExperimentConfig& config) {
  auto label = [](EstimatorId id) -> std::string {
    switch (id) {
      case EstimatorId::Exact: return "Exact evaluation";
      case EstimatorId::Wbic: return "WBIC";
      case EstimatorId::AdjustedWbic: return "WBIC - nu_hat(t_w)";
      case EstimatorId::NuHat: return "nu_hat(t_w)";
      case EstimatorId::Ti: return "Thermodynamic integration";
      case EstimatorId::PriorMc: return "Prior Monte Carlo";
    }
    return "?";
  };
  std::ostringstream os;
  char line[160];
  os << "model: " << config.model.id << "   replicates: " << config.replicates
     << "   config hash: " << std::hex << report.config_hash << std::dec << "\n";
  std::snprintf(line, sizeof line, "%-28s %14s %12s\n", "Method", "mean", "s.d.");
  os << line << std::string(56, '-') << "\n";
  for (const auto& e : report.estimators) {
    bool constant = e.summary.sd == 0.0;
    char sd[32];
    if (constant && e.estimator == EstimatorId::Exact) {
      std::snprintf(sd, sizeof sd, "-");
    } else {
      std::snprintf(sd, sizeof sd, "(%.4f)", e.summary.sd);
    }
    std::snprintf(line, sizeof line, "%-28s %14.3f %12s\n", label(e.estimator).c_str(),
                  e.summary.mean, sd);
    os << line;
  }
  for (const auto& n : report.notes) os << "note: " << n << "\n";
  std::snprintf(line, sizeof line, "version %s, wall time %.1f s\n", report.software_version.c_str(),
                report.wall_seconds);
  os << line;
  return os.str();
}

void write_report_files(const Report& report, const ExperimentConfig& config) {
  if (config.output_path.empty()) throw Error(ErrorKind::Config, "[output] path is not set");
  if (config.output_path.has_parent_path()) {
    std::filesystem::create_directories(config.output_path.parent_path());
  }
  std::ofstream csv(config.output_path.string() + ".csv");
  std::ofstream txt(config.output_path.string() + ".txt");
  if (!csv || !txt) throw Error(ErrorKind::Data, "cannot write report to " + config.output_path.string());
  write_report_csv(csv, report);
  txt << format_summary_table(report, config);
}

}  // namespace wbic
