#include "wbic/model.hpp"

#include <cmath>

#include "wbic/error.hpp"

namespace wbic {

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "parameter vector entries must be finite");
    }
  }
}

ModelSpec::ModelSpec(std::string name, std::vector<ParamDescriptor> params,
                     std::size_t obs_width, std::optional<RlctInfo> rlct)
    : name_(std::move(name)),
      params_(std::move(params)),
      obs_width_(obs_width),
      rlct_(rlct) {
  if (params_.empty()) throw Error(ErrorKind::InvalidArgument, "model needs d >= 1");
  if (obs_width_ == 0) throw Error(ErrorKind::InvalidArgument, "observation width must be positive");
  if (rlct_ && (!(rlct_->lambda > 0) || rlct_->multiplicity < 1)) {
    throw Error(ErrorKind::InvalidArgument, "rlct needs lambda > 0 and multiplicity >= 1");
  }
}

void ModelSpec::to_native(std::span<const double> u, std::span<double> native) const {
  for (std::size_t j = 0; j < params_.size(); ++j) {
    native[j] = wbic::to_native(params_[j].support, u[j]);
  }
}

std::vector<double> ModelSpec::to_native(const ParamVector& theta) const {
  if (theta.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, name_ + ": parameter dimension mismatch");
  }
  std::vector<double> native(dim());
  to_native(theta.values(), native);
  return native;
}

ParamVector ModelSpec::from_native(std::span<const double> native) const {
  if (native.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, name_ + ": parameter dimension mismatch");
  }
  std::vector<double> u(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    u[j] = to_unconstrained(params_[j].support, native[j]);
  }
  return ParamVector(std::move(u));
}

double ModelSpec::log_jacobian(std::span<const double> u) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < params_.size(); ++j) {
    acc += log_abs_jacobian(params_[j].support, u[j]);
  }
  return acc;
}

void ModelSpec::log_lik_rows_native(std::span<const double> native, RowView rows,
                                    std::span<double> out) const {
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = log_lik_native(native, rows[i]);
}

double log_lik_row(const ModelSpec& model, const ParamVector& theta,
                   std::span<const double> row) {
  if (row.size() != model.obs_width()) {
    throw Error(ErrorKind::DimensionMismatch, model.name() + ": observation width mismatch");
  }
  auto native = model.to_native(theta);
  return model.log_lik_native(native, row);
}

double log_lik_total(const ModelSpec& model, const ParamVector& theta, RowView rows) {
  if (rows.width() != model.obs_width()) {
    throw Error(ErrorKind::DimensionMismatch, model.name() + ": observation width mismatch");
  }
  auto native = model.to_native(theta);
  std::vector<double> ll(rows.size());
  model.log_lik_rows_native(native, rows, ll);
  double acc = 0.0;
  for (double v : ll) acc += v;
  return acc;
}

double log_prior(const ModelSpec& model, const ParamVector& theta) {
  auto native = model.to_native(theta);
  return model.log_prior_native(native) + model.log_jacobian(theta.values());
}

ParamVector sample_prior(const ModelSpec& model, std::mt19937_64& rng) {
  std::vector<double> native(model.dim());
  model.sample_prior_native(rng, native);
  return model.from_native(native);
}

TemperedTarget::TemperedTarget(ModelPtr model, std::shared_ptr<const Dataset> data, double t)
    : model_(std::move(model)), data_(std::move(data)), t_(t) {
  if (!model_ || !data_) throw Error(ErrorKind::InvalidArgument, "target needs model and data");
  if (!(t_ > 0.0 && t_ <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "inverse temperature must lie in (0, 1]");
  }
  if (data_->width() != model_->obs_width()) {
    throw Error(ErrorKind::DimensionMismatch, model_->name() + ": dataset width mismatch");
  }
}

double tempered_log_density(const ModelSpec& model, RowView rows, double t,
                            const ParamVector& theta) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "inverse temperature must lie in [0, 1]");
  }
  double lp = log_prior(model, theta);
  if (t == 0.0) return lp;
  return t * log_lik_total(model, theta, rows) + lp;
}

double tempered_log_density(const TemperedTarget& target, const ParamVector& theta) {
  return tempered_log_density(target.model(), target.data().rows(), target.t(), theta);
}

}  // namespace wbic
