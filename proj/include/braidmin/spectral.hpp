#pragma once

#include <vector>

#include "braidmin/polynomial.hpp"
#include "braidmin/transmatrix.hpp"

namespace braidmin {

/// Certified enclosure of the spectral radius of a nonnegative matrix, which
/// is the largest real root of its characteristic polynomial.
RootEnclosure spectral_radius(const TransMatrix& m, double tol);

/// Positive Perron eigenvector normalized to coordinate sum 1, with
/// max |Mv - lambda v| <= residual_tol. Throws DomainError for non-PF input.
std::vector<double> pf_eigenvector(const TransMatrix& m, double residual_tol = 1e-9);

/// Exact check of lambda^n >= |M| - n + 1 for a PF matrix of dimension n.
bool lemma31_check(const TransMatrix& m);

}  // namespace braidmin
