// Command-line front end: run / validate experiment configs, print oracles.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "wbic/config.hpp"
#include "wbic/error.hpp"
#include "wbic/estimators.hpp"
#include "wbic/models.hpp"
#include "wbic/oracles.hpp"
#include "wbic/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kSamplerError = 3 };

int exit_code_for(const wbic::Error& e) {
  switch (e.kind()) {
    case wbic::ErrorKind::Config:
    case wbic::ErrorKind::InvalidArgument:
      return kConfigError;
    case wbic::ErrorKind::Data:
    case wbic::ErrorKind::Parse:
    case wbic::ErrorKind::NonFinite:
    case wbic::ErrorKind::DimensionMismatch:
      return kDataError;
    case wbic::ErrorKind::Sampler:
    case wbic::ErrorKind::Numerical:
      return kSamplerError;
  }
  return kSamplerError;
}

int print_oracle(const std::string& model, const std::string& data_path, double prior_m,
                 double prior_v) {
  auto data = wbic::read_csv(data_path);
  if (model == "linreg_m1" || model == "linreg_m2") {
    auto which = model == "linreg_m1" ? wbic::RadiataModel::M1 : wbic::RadiataModel::M2;
    auto problem = wbic::radiata_problem(data, which);
    auto design = wbic::make_regression_design(*problem.data, {});
    std::printf("model\t%s\nn\t%zu\nexact_log_marginal\t%.6f\n", model.c_str(), problem.data->n(),
                wbic::linreg_exact_log_marginal(design));
    return kOk;
  }
  if (model == "normal_mean") {
    if (data.width() != 1) throw wbic::Error(wbic::ErrorKind::Data, "normal_mean needs one column");
    auto xs = data.column(0);
    const std::size_t n = xs.size();
    double xbar = 0.0;
    for (double x : xs) xbar += x;
    xbar /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - xbar) * (x - xbar);
    auto tw = wbic::inverse_temperature_wbic(n);
    std::printf("model\tnormal_mean\nn\t%zu\nt_w\t%.10f\n", n, tw.t);
    std::printf("exact_log_marginal\t%.6f\n", wbic::normal_mean_exact_log_marginal(xs, prior_m, prior_v));
    std::printf("wbic_analytic\t%.6f\n", wbic::normal_mean_wbic_analytic(xs, prior_m, prior_v));
    std::printf("nu_hat_closed_form\t%.6f\n",
                wbic::normal_mean_nu_hat_closed_form(tw.t, n, xbar, ss / static_cast<double>(n - 1),
                                                     prior_m, prior_v));
    return kOk;
  }
  throw wbic::Error(wbic::ErrorKind::Config, "no closed-form oracle for model '" + model + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WBIC and singular-fluctuation-adjusted WBIC marginal likelihood estimation"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a replicated experiment from a config file");
  run->add_option("config", config_path, "Experiment config (INI)")->required();
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* validate = app.add_subcommand("validate", "Parse a config and check preconditions");
  validate->add_option("config", config_path, "Experiment config (INI)")->required();

  std::string model, data_path;
  double prior_m = 0.0, prior_v = 1.0;
  auto* oracle = app.add_subcommand("oracle", "Print closed-form reference values");
  oracle->add_option("model", model, "linreg_m1 | linreg_m2 | normal_mean")->required();
  oracle->add_option("data", data_path, "CSV data file")->required();
  oracle->add_option("--prior-mean", prior_m, "normal_mean prior mean");
  oracle->add_option("--prior-var", prior_v, "normal_mean prior variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate) {
      auto cfg = wbic::load_config(config_path);
      wbic::validate_config(cfg);
      std::printf("ok\tconfig hash %016llx\n", static_cast<unsigned long long>(cfg.hash()));
      return kOk;
    }
    if (*run) {
      auto cfg = wbic::load_config(config_path);
      wbic::RunOptions opts;
      if (!quiet) {
        opts.progress = [](std::size_t done, std::size_t total) {
          std::fprintf(stderr, "\rreplicate %zu/%zu", done, total);
          if (done == total) std::fputc('\n', stderr);
        };
      }
      auto report = wbic::run_experiment(cfg, opts);
      if (!cfg.output_path.empty()) wbic::write_report_files(report, cfg);
      std::cout << wbic::format_summary_table(report, cfg);
      return kOk;
    }
    if (*oracle) return print_oracle(model, data_path, prior_m, prior_v);
  } catch (const wbic::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSamplerError;
  }
  return kOk;
}
