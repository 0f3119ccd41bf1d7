#include "wbic/transforms.hpp"

#include <cmath>
#include <limits>

namespace wbic {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

double to_unconstrained(Support support, double native) {
  switch (support) {
    case Support::Real:
      return native;
    case Support::Positive:
      return std::log(native);
    case Support::UnitInterval:
      return std::log(native) - std::log1p(-native);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double to_native(Support support, double u) {
  switch (support) {
    case Support::Real:
      return u;
    case Support::Positive:
      return std::exp(u);
    case Support::UnitInterval:
      if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
      return std::exp(u) / (1.0 + std::exp(u));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double log_abs_jacobian(Support support, double u) {
  switch (support) {
    case Support::Real:
      return 0.0;
    case Support::Positive:
      return u;
    case Support::UnitInterval:
      // sigma(u) (1 - sigma(u))
      return -softplus(-u) - softplus(u);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double log_sum_exp(double a, double b) {
  double hi = a > b ? a : b;
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace wbic
