#pragma once

#include <iosfwd>

#include "wbic/sampler.hpp"

namespace wbic {

/// Plain-text draw dump: one retained draw per line, tab-separated, 17
/// significant digits. Columns are the d unconstrained parameters followed
/// by the n per-observation log-likelihoods.
void write_draws(std::ostream& out, const DrawMatrix& draws);

/// Inverse of write_draws. Dimension, temperature and chain count are not
/// stored in the file and must be supplied.
DrawMatrix read_draws(std::istream& in, std::size_t dim, double t, std::size_t n_chains);

}  // namespace wbic
