#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wbic/dataset.hpp"
#include "wbic/transforms.hpp"

namespace wbic {

struct ParamDescriptor {
  std::string name;
  Support support = Support::Real;
};

/// Real log canonical threshold and its multiplicity, stored as metadata.
struct RlctInfo {
  double lambda = 0.0;
  int multiplicity = 1;
};

/// Point in the unconstrained sampling space. Entries are always finite.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// A Bayesian model: per-observation likelihood, prior and parameter
/// supports. Instances are immutable and shared across threads.
///
/// Subclasses implement the densities in native parameter space; the
/// unconstrained embedding and its Jacobian live here.
class ModelSpec {
 public:
  virtual ~ModelSpec() = default;

  const std::string& name() const { return name_; }
  std::size_t dim() const { return params_.size(); }
  std::size_t obs_width() const { return obs_width_; }
  const std::optional<RlctInfo>& rlct() const { return rlct_; }
  const std::vector<ParamDescriptor>& params() const { return params_; }

  void to_native(std::span<const double> u, std::span<double> native) const;
  std::vector<double> to_native(const ParamVector& theta) const;
  ParamVector from_native(std::span<const double> native) const;
  double log_jacobian(std::span<const double> u) const;

  virtual double log_lik_native(std::span<const double> native,
                                std::span<const double> row) const = 0;
  /// Fills out[i] = log p(rows[i] | native). Override for tighter loops.
  virtual void log_lik_rows_native(std::span<const double> native, RowView rows,
                                   std::span<double> out) const;
  virtual double log_prior_native(std::span<const double> native) const = 0;
  /// One exact draw from the prior, in native space.
  virtual void sample_prior_native(std::mt19937_64& rng,
                                   std::span<double> native) const = 0;

 protected:
  ModelSpec(std::string name, std::vector<ParamDescriptor> params,
            std::size_t obs_width, std::optional<RlctInfo> rlct);

 private:
  std::string name_;
  std::vector<ParamDescriptor> params_;
  std::size_t obs_width_;
  std::optional<RlctInfo> rlct_;
};

using ModelPtr = std::shared_ptr<const ModelSpec>;

double log_lik_row(const ModelSpec& model, const ParamVector& theta,
                   std::span<const double> row);
double log_lik_total(const ModelSpec& model, const ParamVector& theta, RowView rows);

/// Prior density of the unconstrained point: log phi(native) + log |J|.
double log_prior(const ModelSpec& model, const ParamVector& theta);

ParamVector sample_prior(const ModelSpec& model, std::mt19937_64& rng);

/// (model, data, t) with 0 < t <= 1.
class TemperedTarget {
 public:
  TemperedTarget(ModelPtr model, std::shared_ptr<const Dataset> data, double t);

  const ModelSpec& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const Dataset& data() const { return *data_; }
  const std::shared_ptr<const Dataset>& data_ptr() const { return data_; }
  double t() const { return t_; }

 private:
  ModelPtr model_;
  std::shared_ptr<const Dataset> data_;
  double t_;
};

/// t * sum_i log p(x_i | theta) + log prior. Here t = 0 is accepted, which
/// reduces to the prior.
double tempered_log_density(const ModelSpec& model, RowView rows, double t,
                            const ParamVector& theta);
double tempered_log_density(const TemperedTarget& target, const ParamVector& theta);

}  // namespace wbic
