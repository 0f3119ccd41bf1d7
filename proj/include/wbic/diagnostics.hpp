#pragma once

#include <span>
#include <vector>

namespace wbic {

struct EssResult {
  double value = 0.0;
  bool constant = false;  // zero-variance input; value set to the length
};

/// Geyer initial-monotone-sequence ESS of one series (length >= 100).
/// Result lies in (0, length].
EssResult effective_sample_size(std::span<const double> series);

struct RhatResult {
  double value = 1.0;
  bool constant = false;  // all chains constant at one value; value set to 1
};

/// Split-R-hat over >= 2 equal-length chains of length >= 100.
RhatResult potential_scale_reduction(const std::vector<std::span<const double>>& chains);

}  // namespace wbic
