#include "wbic/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wbic/dataset.hpp"
#include "wbic/error.hpp"

namespace wbic {

namespace pt = boost::property_tree;

namespace {

constexpr std::pair<EstimatorId, const char*> kEstimatorNames[] = {
    {EstimatorId::Exact, "exact"},       {EstimatorId::Wbic, "wbic"},
    {EstimatorId::AdjustedWbic, "adjusted_wbic"}, {EstimatorId::NuHat, "nu_hat"},
    {EstimatorId::Ti, "ti"},             {EstimatorId::PriorMc, "prior_mc"},
};

const std::set<std::string> kModels = {"normal_mean", "mixture2", "linreg_m1", "linreg_m2"};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

/// A ';' or '#' preceded by whitespace starts a trailing comment.
std::string strip_inline_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == ';' || s[i] == '#') && std::isspace(static_cast<unsigned char>(s[i - 1]))) {
      return s.substr(0, i);
    }
  }
  return s;
}

/// Reads typed values out of one section and remembers which keys were used.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> str(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(strip_inline_comment(*v));
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    auto s = str(key);
    if (!s) return;
    T v{};
    const char* b = s->data();
    const char* e = b + s->size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
      config_error("[" + name_ + "] " + key + ": cannot parse '" + *s + "'");
    }
    out = v;
  }

  void get_bool(const std::string& key, bool& out) {
    auto s = str(key);
    if (!s) return;
    if (*s == "true" || *s == "1" || *s == "yes") {
      out = true;
    } else if (*s == "false" || *s == "0" || *s == "no") {
      out = false;
    } else {
      config_error("[" + name_ + "] " + key + ": expected a boolean");
    }
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [k, v] : *tree_) {
      if (!used_.count(k)) config_error("unknown key [" + name_ + "] " + k);
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* estimator_name(EstimatorId id) {
  for (const auto& [k, name] : kEstimatorNames) {
    if (k == id) return name;
  }
  return "?";
}

std::optional<EstimatorId> parse_estimator(std::string_view name) {
  for (const auto& [k, nm] : kEstimatorNames) {
    if (name == nm) return k;
  }
  return std::nullopt;
}

bool ExperimentConfig::wants(EstimatorId id) const {
  return std::find(estimators.begin(), estimators.end(), id) != estimators.end();
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["model.id"] = model.id;
  if (model.id == "normal_mean") {
    kv["model.prior_mean"] = fmt(model.prior_mean);
    kv["model.prior_var"] = fmt(model.prior_var);
  } else if (model.id == "mixture2") {
    kv["model.mu_prior_var"] = fmt(model.mu_prior_var);
  } else {
    kv["model.mean_alpha"] = fmt(model.linreg.mean[0]);
    kv["model.mean_beta"] = fmt(model.linreg.mean[1]);
    kv["model.q11"] = fmt(model.linreg.q_diag[0]);
    kv["model.q22"] = fmt(model.linreg.q_diag[1]);
    kv["model.a"] = fmt(model.linreg.a);
    kv["model.b"] = fmt(model.linreg.b);
  }
  if (data_path) kv["data.path"] = data_path->string();
  if (synthetic) {
    kv["data.synthetic"] = synthetic->distribution;
    kv["data.mean"] = fmt(synthetic->mean);
    kv["data.sd"] = fmt(synthetic->sd);
    kv["data.n"] = std::to_string(synthetic->n);
    kv["data.base_seed"] = std::to_string(synthetic->base_seed);
  }
  std::vector<std::string> names;
  for (auto e : estimators) names.emplace_back(estimator_name(e));
  std::sort(names.begin(), names.end());
  std::string joined;
  for (const auto& nm : names) joined += (joined.empty() ? "" : ",") + nm;
  kv["estimators.list"] = joined;
  kv["run.replicates"] = std::to_string(replicates);
  kv["run.prior_mc_draws"] = std::to_string(prior_mc_draws);
  kv["run.ti_rungs"] = std::to_string(ti_rungs);
  kv["run.ti_power"] = fmt(ti_power);
  kv["run.ti_prior_draws"] = std::to_string(ti_prior_draws);
  kv["sampler.n_chains"] = std::to_string(sampler.n_chains);
  kv["sampler.warmup"] = std::to_string(sampler.warmup);
  kv["sampler.keep"] = std::to_string(sampler.keep);
  kv["sampler.thin"] = std::to_string(sampler.thin);
  kv["sampler.init_scale"] = fmt(sampler.init_scale);
  kv["sampler.target_accept"] = fmt(sampler.target_accept);
  kv["sampler.seed"] = std::to_string(sampler.seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  const std::set<std::string> known = {"model", "data", "estimators", "run", "sampler", "output"};
  for (const auto& [k, v] : tree) {
    if (!known.count(k)) config_error("unknown section [" + k + "]");
  }
  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  ExperimentConfig c;

  auto model = section("model");
  auto id = model.str("id");
  if (!id) config_error("[model] id is required");
  c.model.id = *id;
  model.get("prior_mean", c.model.prior_mean);
  model.get("prior_var", c.model.prior_var);
  model.get("mu_prior_var", c.model.mu_prior_var);
  model.get("mean_alpha", c.model.linreg.mean[0]);
  model.get("mean_beta", c.model.linreg.mean[1]);
  model.get("q11", c.model.linreg.q_diag[0]);
  model.get("q22", c.model.linreg.q_diag[1]);
  model.get("a", c.model.linreg.a);
  model.get("b", c.model.linreg.b);
  model.reject_unknown();

  auto data = section("data");
  if (auto p = data.str("path")) {
    std::filesystem::path path(*p);
    c.data_path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  }
  if (auto s = data.str("synthetic")) {
    SyntheticSpec spec;
    spec.distribution = *s;
    data.get("mean", spec.mean);
    data.get("sd", spec.sd);
    data.get("n", spec.n);
    data.get("base_seed", spec.base_seed);
    c.synthetic = spec;
  } else {
    for (const char* k : {"mean", "sd", "n", "base_seed"}) {
      if (data.str(k)) config_error(std::string("[data] ") + k + " needs synthetic = normal");
    }
  }
  data.reject_unknown();

  auto est = section("estimators");
  if (auto list = est.str("list")) {
    std::stringstream ss(*list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      auto e = parse_estimator(tok);
      if (!e) config_error("unknown estimator '" + tok + "'");
      if (!c.wants(*e)) c.estimators.push_back(*e);
    }
  }
  est.reject_unknown();

  auto run = section("run");
  run.get("replicates", c.replicates);
  run.get("prior_mc_draws", c.prior_mc_draws);
  run.get("ti_rungs", c.ti_rungs);
  run.get("ti_power", c.ti_power);
  run.get("ti_prior_draws", c.ti_prior_draws);
  run.reject_unknown();

  auto smp = section("sampler");
  smp.get("n_chains", c.sampler.n_chains);
  smp.get("warmup", c.sampler.warmup);
  smp.get("keep", c.sampler.keep);
  smp.get("thin", c.sampler.thin);
  smp.get("init_scale", c.sampler.init_scale);
  smp.get("target_accept", c.sampler.target_accept);
  smp.get("seed", c.sampler.seed);
  smp.reject_unknown();

  auto out = section("output");
  if (auto p = out.str("path")) {
    std::filesystem::path path(*p);
    c.output_path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  }
  out.get_bool("dump_draws", c.dump_draws);
  out.reject_unknown();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  if (!kModels.count(c.model.id)) config_error("unknown model id '" + c.model.id + "'");
  if (c.estimators.empty()) config_error("[estimators] list must name at least one estimator");
  if (c.replicates == 0) config_error("replicates must be positive");
  if (c.data_path.has_value() == c.synthetic.has_value()) {
    config_error("[data] needs exactly one of path or synthetic");
  }
  const bool linreg = c.model.id == "linreg_m1" || c.model.id == "linreg_m2";
  if (linreg && !c.data_path) config_error(c.model.id + " needs a data path");
  if (c.wants(EstimatorId::Exact) && c.model.id == "mixture2") {
    config_error("exact is unavailable for mixture2 (no closed form)");
  }
  if (c.synthetic) {
    if (c.synthetic->distribution != "normal") {
      config_error("unsupported synthetic distribution '" + c.synthetic->distribution + "'");
    }
    if (c.synthetic->n < 2) config_error("synthetic n must be >= 2");
    if (!(c.synthetic->sd > 0)) config_error("synthetic sd must be positive");
  }
  if (c.wants(EstimatorId::PriorMc) && c.prior_mc_draws == 0) {
    config_error("prior_mc_draws must be positive");
  }
  if (c.wants(EstimatorId::Ti) && (c.ti_rungs == 0 || !(c.ti_power > 0) || c.ti_prior_draws < 2)) {
    config_error("invalid TI ladder settings");
  }
  if (c.model.id == "normal_mean" && !(c.model.prior_var > 0)) config_error("prior_var must be positive");
  if (c.model.id == "mixture2" && !(c.model.mu_prior_var > 0)) config_error("mu_prior_var must be positive");
  try {
    c.sampler.validate();
  } catch (const Error& e) {
    config_error(std::string("[sampler] ") + e.what());
  }

  if (c.data_path) {
    Dataset d = [&] {
      try {
        return read_csv(*c.data_path);
      } catch (const Error& e) {
        throw Error(ErrorKind::Data, e.what());
      }
    }();
    if (linreg) {
      for (const char* col : {kRadiataDensity, kRadiataResinDensity, kRadiataStrength}) {
        try {
          d.column_index(col);
        } catch (const Error&) {
          throw Error(ErrorKind::Data, "data file lacks column '" + std::string(col) + "'");
        }
      }
    } else if (d.width() != 1) {
      throw Error(ErrorKind::Data, c.model.id + " needs single-column data");
    }
  }
}

}  // namespace wbic
