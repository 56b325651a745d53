#pragma once

#include <optional>
#include <string>

#include "signal_lab/covmodel.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

// W_ij = X_ij * Y_i with cached per-column sums S_j and squared sums Q_j;
// every estimator below is a function of these.
struct WMatrix {
  Matrix w;
  Vector column_sums;     // S_j
  Vector column_sq_sums;  // Q_j
  Index n() const { return w.rows(); }
  Index p() const { return w.cols(); }
};

WMatrix build_w(const LabeledSample& sample);

namespace detail {
// Kahan-compensated column sums, used by build_w once n*p > 1e6.
Vector compensated_column_sums(const Matrix& m);
}  // namespace detail

// Unbiased estimate of beta_j^2 per column: (S_j^2 - Q_j) / (n(n-1)),
// identical to the average of W_{i1,j} W_{i2,j} over unordered pairs.
Vector beta_sq_hat(const WMatrix& w);

// Signal-level estimate: sum_j beta_sq_hat_j, computed in O(np) from the
// column sums. Pair enumeration gives the same value (see reference.hpp).
double tau_sq_naive(const WMatrix& w);

// Standard unbiased sample variance of the response.
double sigma_y_sq_hat(const Eigen::Ref<const Vector>& y);

// Noise level: plain difference, may be negative in finite samples (kept
// unbiased; use nonneg clamping only for presentation).
inline double sigma_sq_hat(double sigma_y_sq, double tau_sq) {
  return sigma_y_sq - tau_sq;
}

// Exact finite-sample variance of the signal estimator evaluated from
// population moments:
//   Var = 4(n-2)/(n(n-1)) * zeta1 + 2/(n(n-1)) * zeta2,
//   zeta1 = beta'A beta - |beta|^4,  zeta2 = |A|_F^2 - |beta|^4.
struct VarTauResult {
  double value = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  bool negative = false;  // set when inputs are not consistent moments
};

VarTauResult var_tau_naive(const MomentSet& moments, Index n);

// Exact finite-sample variance of the noise estimator; requires mu4, pi and
// wy in addition to the signal-variance inputs. Decomposed terms returned
// for diagnostics.
struct VarSigmaResult {
  double value = 0.0;
  double var_sigma_y_term = 0.0;
  double var_tau_term = 0.0;
  double cov_cross_term = 0.0;  // -(4/n)(pi'beta - tau^2 sigma_Y^2)
  double wy_term = 0.0;
};

VarSigmaResult var_sigma_hat(const MomentSet& moments, Index n);

// One estimation run. tau_sq_hat is always the naive estimate; zero-estimator
// output, when present, lives in extras.
struct ZeroExtras {
  IndexSet subset;
  double z_bar = 0.0;
  double var_g = 0.0;
  double coefficient = 0.0;
  CoefficientKind coefficient_kind = CoefficientKind::UStat;
  double improved = 0.0;
  bool no_zero_estimator = false;  // |subset| < 2; improved == tau_sq_hat
};

struct EstimateBundle {
  double tau_sq_hat = 0.0;
  double sigma_y_sq_hat = 0.0;
  double sigma_sq_hat = 0.0;  // sigma_y_sq_hat - tau_sq_hat, exactly
  Vector beta_sq;
  std::string method;
  std::optional<ZeroExtras> extras;

  // Best available signal estimate: improved when extras carry one.
  double tau_sq_final() const {
    return extras ? extras->improved : tau_sq_hat;
  }
  double sigma_sq_final() const { return sigma_y_sq_hat - tau_sq_final(); }
  double sigma_sq_nonneg() const { return sigma_sq_hat < 0.0 ? 0.0 : sigma_sq_hat; }
};

// Naive bundle (no zero-estimator correction).
EstimateBundle estimate_naive(const LabeledSample& sample);

}  // namespace signal_lab
