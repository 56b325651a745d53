#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "signal_lab/boot.hpp"
#include "signal_lab/covmodel.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

// One simulation configuration of the benchmark model
//   Y_i = gamma_L sum_{j in Theta} phi(X_ij) + gamma_S sum_{j not in Theta} phi(X_ij) + noise_sd * xi_i
// with phi(x) = x + sin(x) - E[sin X] (centered so E[Y] = 0; the intercept
// carries no signal and would only inflate estimator variance),
//   gamma_L = sqrt(eta tau^2 / K) / (1 + E[X sin X]),
//   gamma_S = sqrt(tau^2 (1-eta) / (p-K)) / (1 + E[X sin X]).
// By construction beta_j^2 = eta tau^2 / K on theta_set and
// tau^2(1-eta)/(p-K) elsewhere, so the signal level is exactly tau_sq and
// eta is the fraction of it carried by theta_set.
struct Scenario {
  Index n = 300;
  Index p = 300;
  Index k = 6;
  double tau_sq = 1.0;
  double eta = 0.5;
  Index reps = 100;
  std::uint64_t base_seed = 1;
  Marginal covariates = Marginal::CenteredExponential;
  double noise_sd = 1.0;
  IndexSet theta_set;  // defaults to {0, ..., k-1}

  IndexSet theta() const;
  void validate() const;  // throws ConfigError
};

// E[X sin X] for the supported marginals: sin(1)/2 for Exp(1)-1 and
// exp(-1/2) for the standard normal. Closed forms; the test suite pins them
// against numerical quadrature.
double x_sin_x_moment(Marginal marginal);

// E[sin X]: (cos 1 - sin 1)/2 for Exp(1)-1, 0 for the standard normal.
double sin_x_moment(Marginal marginal);

double gamma_large(const Scenario& s);
double gamma_small(const Scenario& s);

// Deterministic given (base_seed, rep_index): covariates drawn row-major,
// then the noise vector.
LabeledSample gen_dataset(const Scenario& s, Index rep_index);

// The scenario's conditional law of Y given a covariate row, for the moment
// oracle.
ResponseLaw scenario_response_law(const Scenario& s);

// The scenario's covariate model (independent standardized coordinates).
CovariateModel scenario_covariate_model(const Scenario& s);

// Per-estimator summary over the replicates of one scenario.
struct MetricsRow {
  std::string estimator;
  double bias = 0.0;
  double se = 0.0;    // sample sd of the estimates, 1/(R-1)
  double rmse = 0.0;
  double pct_change = 0.0;       // vs the first (reference) estimator
  double sigma_rmse_hat = 0.0;   // delta method: sd of squared errors / (2 RMSE sqrt(R))
  Index reps = 0;
};

struct SuiteEstimator {
  std::string name;
  // rep_seed: stream id for any internal randomness (bootstrap draws).
  std::function<double(const LabeledSample&, const Scenario&,
                       std::uint64_t rep_seed)>
      eval;
};

// Registered estimator names:
//   naive    pairwise U-statistic
//   tg       zero-estimator correction over all p covariates
//   th       correction over the scenario's theta_set (reference results)
//   th_gap   correction over the largest-gap selection
//   tg_boot  bootstrap-coefficient correction, all covariates
//   th_boot  bootstrap-coefficient correction, theta_set
std::vector<std::string> suite_estimator_names();

struct SuiteOptions {
  std::string selector = "theta";   // th/th_boot subset: theta | gap | all
  Index bootstrap_m = 100;
  std::string bootstrap_plugin = "naive";
};

std::vector<SuiteEstimator> make_suite(const std::vector<std::string>& names,
                                       const SuiteOptions& options = {});

// Applies every estimator to the same R generated datasets (paired
// comparison) and aggregates. An estimator failure aborts the study with the
// replicate index and seed in the message.
std::vector<MetricsRow> run_study(const Scenario& scenario,
                                  const std::vector<SuiteEstimator>& suite,
                                  int threads = 0);

// Raw per-replicate estimates, column per estimator; run_study's input.
Matrix run_replicates(const Scenario& scenario,
                      const std::vector<SuiteEstimator>& suite,
                      int threads = 0);

std::vector<MetricsRow> summarize(const Scenario& scenario,
                                  const std::vector<SuiteEstimator>& suite,
                                  const Matrix& estimates);

// MetricsRow with its grid cell, the unit of CSV output.
struct TableRow {
  double eta = 0.0;
  double tau_sq = 0.0;
  MetricsRow row;
};

// Fraction of replicates whose selection equals the modal selected subset;
// a replicate-level stability diagnostic for data-driven selectors.
double selection_agreement(const Scenario& scenario, const Selector& selector,
                           Index reps, int threads = 0);

}  // namespace signal_lab
