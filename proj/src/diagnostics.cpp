#include "wbic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wbic/error.hpp"

namespace wbic {

EssResult effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 100) throw Error(ErrorKind::InvalidArgument, "ESS needs a series of length >= 100");
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "ESS input contains a non-finite value");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(n);
  };

  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return {static_cast<double>(n), true};

  // Sum of pairs rho(2m) + rho(2m+1), truncated at the first non-positive
  // pair and forced monotone non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  double ess = static_cast<double>(n) / std::max(tau, 1e-12);
  return {std::min(ess, static_cast<double>(n)), false};
}

RhatResult potential_scale_reduction(const std::vector<std::span<const double>>& chains) {
  if (chains.size() < 2) throw Error(ErrorKind::InvalidArgument, "R-hat needs at least 2 chains");
  const std::size_t len = chains.front().size();
  if (len < 100) throw Error(ErrorKind::InvalidArgument, "R-hat needs chains of length >= 100");
  for (const auto& c : chains) {
    if (c.size() != len) throw Error(ErrorKind::InvalidArgument, "R-hat needs equal-length chains");
    for (double v : c)
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "R-hat input contains a non-finite value");
  }

  const std::size_t half = len / 2;
  std::vector<std::span<const double>> split;
  for (const auto& c : chains) {
    split.push_back(c.subspan(0, half));
    split.push_back(c.subspan(len - half, half));
  }

  const double m = static_cast<double>(split.size());
  const double nh = static_cast<double>(half);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& s : split) {
    double mu = 0.0;
    for (double v : s) mu += v;
    mu /= nh;
    double ss = 0.0;
    for (double v : s) ss += (v - mu) * (v - mu);
    within += ss / (nh - 1.0);
    means.push_back(mu);
  }
  within /= m;

  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double between_over_n = 0.0;
  for (double mu : means) between_over_n += (mu - grand) * (mu - grand);
  between_over_n /= (m - 1.0);

  if (within == 0.0) {
    if (between_over_n == 0.0) return {1.0, true};
    return {std::numeric_limits<double>::infinity(), false};
  }
  double var_plus = (nh - 1.0) / nh * within + between_over_n;
  return {std::sqrt(var_plus / within), false};
}

}  // namespace wbic
