#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "signal_lab/covmodel.hpp"
#include "signal_lab/select.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

// Any procedure producing a signal-level estimate from a sample. Must be
// deterministic given the sample and reentrant (bootstrap replicates may
// evaluate it concurrently).
struct PluginEstimator {
  std::string name;
  std::function<double(const LabeledSample&)> eval;
};

struct BootstrapResult {
  double estimate = 0.0;       // base_estimate - c_tilde * z_bar
  double c_tilde = 0.0;
  Index m_requested = 0;
  Index m_used = 0;            // successful bootstrap replicates
  Index m_failed = 0;
  double cov_hat = 0.0;        // empirical Cov(estimate*, Z*) across replicates
  IndexSet subset;
  double base_estimate = 0.0;  // plug-in on the original sample
  double z_bar = 0.0;          // zero-estimator on the original sample
  bool no_zero_estimator = false;
};

// Bootstrap approximation of the optimal coefficient for an arbitrary
// plug-in estimator:
//   1. select the subset ONCE on the original sample;
//   2. evaluate the plug-in and the zero-estimator on the original sample;
//   3. resample n rows with replacement M times, re-evaluating both
//      (the subset stays fixed, so resampled z-values are lookups);
//   4. c_tilde = Cov_hat(estimate*, Z*) / (Var[g_S(X)] / n) -- the
//      denominator is the known model quantity, not a bootstrap estimate;
//   5. return the original-sample estimate corrected by c_tilde * Z.
// Cov_hat centers at the bootstrap means with 1/(M-1) normalization.
// Replicates where the plug-in throws are skipped and counted; more than
// M/2 failures raise DataError. Deterministic given (sample, seed, M).
BootstrapResult algorithm2(const LabeledSample& sample,
                           const PluginEstimator& estimator,
                           const Selector& selector,
                           const CovariateModel& model, Index m,
                           std::uint64_t seed, int threads = 0);

// Built-in plug-ins: "naive", "naive_tg" (whole-vector zero-estimator
// correction), "naive_th" (gap-selected correction). Throws ConfigError for
// unknown names, listing the registry.
PluginEstimator make_plugin(const std::string& name, const CovariateModel& model);

std::vector<std::string> plugin_names();

}  // namespace signal_lab
