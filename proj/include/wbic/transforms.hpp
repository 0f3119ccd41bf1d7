#pragma once

namespace wbic {

/// Native support of a model parameter. Sampling happens in an unconstrained
/// embedding: identity, log and logit respectively.
enum class Support { Real, Positive, UnitInterval };

double to_unconstrained(Support support, double native);
double to_native(Support support, double unconstrained);

/// log |d native / d unconstrained| at the unconstrained point.
double log_abs_jacobian(Support support, double unconstrained);

double log_sum_exp(double a, double b);

}  // namespace wbic
