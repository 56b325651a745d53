#pragma once

#include "signal_lab/covmodel.hpp"
#include "signal_lab/select.hpp"
#include "signal_lab/types.hpp"
#include "signal_lab/ustat.hpp"

namespace signal_lab {

// Zero-mean statistic over a covariate subset S:
//   z_i = g_S(x_i) = sum_{j<j' in S} x_ij x_ij',  Z = mean(z_i).
// E[g_S(X)] = 0 under the whitened model, so subtracting c*Z from any
// unbiased estimate keeps it unbiased for every fixed c.
struct ZeroStat {
  IndexSet subset;
  Vector z_values;
  double z_bar = 0.0;
  double var_g = 0.0;  // known Var[g_S(X)], not estimated from the sample
};

// z_i computed in O(|S|) per row via ((sum x)^2 - sum x^2)/2.
ZeroStat zero_stat(const LabeledSample& sample, IndexSet subset, double var_g);

struct Coefficient {
  double value = 0.0;
  CoefficientKind kind = CoefficientKind::UStat;
};

// U-statistic estimate of the variance-minimizing coefficient:
//   c_hat = [2/(n(n-1))] sum_{i1 != i2} W_i1' W_i2 g(x_i2) / Var[g(X)].
// The kernel is asymmetric (g attaches to the second index only), hence the
// ordered-pair sum. Computed in O(np) via
//   sum_{i1 != i2} W_i1'W_i2 g_i2 = sum_j [S_j (W'g)_j] - g'(row squared norms).
Coefficient c_hat(const WMatrix& w, const ZeroStat& zstat);

// Population coefficient 2 beta' theta_S / Var[g_S(X)]; needs theta_S in the
// moment set.
Coefficient c_oracle(const MomentSet& moments, const IndexSet& subset,
                     double var_g);

// tau_hat - c * Z
inline double improve(double tau_naive, const Coefficient& c,
                      const ZeroStat& zstat) {
  return tau_naive - c.value * zstat.z_bar;
}

// Full selection-based pipeline: naive estimates, subset from the selector,
// coefficient from c_hat, corrected estimate in extras. A selection with
// fewer than two indices falls back to the naive estimate with
// no_zero_estimator set (a replicated study must not abort on a degenerate
// selection). Selecting all p covariates reproduces the whole-vector
// zero-estimator exactly.
EstimateBundle algorithm1(const LabeledSample& sample, const Selector& selector,
                          const CovariateModel& model);

}  // namespace signal_lab
