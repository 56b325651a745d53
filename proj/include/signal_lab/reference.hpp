#pragma once

#include "signal_lab/types.hpp"

namespace signal_lab::reference {

// Literal O(n^2 p) / pair-enumeration implementations of the estimators.
// They share no code with the fast paths and exist to pin them down: the
// verify command and the test suites require agreement to 1e-10 relative.

// beta_j^2 via the explicit double sum over unordered pairs.
Vector beta_sq_pairwise(const Matrix& w);

// tau^2 via the explicit double sum of W_i1' W_i2 over unordered pairs.
double tau_sq_pairwise(const Matrix& w);

// Numerator of the coefficient estimate via the ordered-pair double sum,
// already scaled by 2/(n(n-1)).
double c_hat_numerator_pairwise(const Matrix& w, const Vector& g_values);

// g_S(x) by explicit enumeration of index pairs within the subset.
double g_pair_enumeration(const Eigen::Ref<const Vector>& row,
                          const IndexSet& subset);

// Two-pass textbook sample variance.
double sample_variance_two_pass(const Eigen::Ref<const Vector>& y);

}  // namespace signal_lab::reference
