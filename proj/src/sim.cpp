#include "signal_lab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "signal_lab/parallel.hpp"
#include "signal_lab/rng.hpp"
#include "signal_lab/select.hpp"
#include "signal_lab/ustat.hpp"
#include "signal_lab/zeroest.hpp"

namespace signal_lab {

IndexSet Scenario::theta() const {
  if (!theta_set.empty()) return theta_set;
  IndexSet t(static_cast<std::size_t>(k));
  std::iota(t.begin(), t.end(), Index{0});
  return t;
}

void Scenario::validate() const {
  if (n < 2) throw ConfigError("scenario needs n >= 2");
  if (p < 2) throw ConfigError("scenario needs p >= 2");
  if (k < 1 || k > p) throw ConfigError("scenario needs 1 <= K <= p");
  if (!(tau_sq >= 0.0)) throw ConfigError("tau_sq must be non-negative");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  if (p == k && eta < 1.0) {
    throw ConfigError("p == K leaves no covariates for the off-set signal; needs eta = 1");
  }
  if (reps < 1) throw ConfigError("scenario needs reps >= 1");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
  const IndexSet t = theta();
  if (static_cast<Index>(t.size()) != k) {
    throw ConfigError("theta_set must have exactly K indices");
  }
  try {
    validate_index_set(t, p);
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  }
}

double x_sin_x_moment(Marginal marginal) {
  switch (marginal) {
    case Marginal::CenteredExponential:
      return std::sin(1.0) / 2.0;  // int_0^inf (t-1) sin(t-1) e^-t dt
    case Marginal::StandardNormal:
      return std::exp(-0.5);  // Stein: E[X sin X] = E[cos X]
  }
  throw Error("unknown marginal");
}

double sin_x_moment(Marginal marginal) {
  switch (marginal) {
    case Marginal::CenteredExponential:
      return (std::cos(1.0) - std::sin(1.0)) / 2.0;
    case Marginal::StandardNormal:
      return 0.0;
  }
  throw Error("unknown marginal");
}

double gamma_large(const Scenario& s) {
  const double c = 1.0 + x_sin_x_moment(s.covariates);
  return std::sqrt(s.eta * s.tau_sq / static_cast<double>(s.k)) / c;
}

double gamma_small(const Scenario& s) {
  if (s.p == s.k) return 0.0;
  const double c = 1.0 + x_sin_x_moment(s.covariates);
  return std::sqrt(s.tau_sq * (1.0 - s.eta) / static_cast<double>(s.p - s.k)) / c;
}

LabeledSample gen_dataset(const Scenario& s, Index rep_index) {
  s.validate();
  if (rep_index < 0) throw ConfigError("rep_index must be non-negative");
  Rng rng = Rng::stream(s.base_seed, static_cast<std::uint64_t>(rep_index));
  const double g_large = gamma_large(s);
  const double g_small = gamma_small(s);
  const double shift = sin_x_moment(s.covariates);
  std::vector<char> in_theta(static_cast<std::size_t>(s.p), 0);
  for (const Index j : s.theta()) in_theta[static_cast<std::size_t>(j)] = 1;

  LabeledSample out;
  out.x.resize(s.n, s.p);
  out.y.resize(s.n);
  for (Index i = 0; i < s.n; ++i) {
    double sum_large = 0.0, sum_small = 0.0;
    for (Index j = 0; j < s.p; ++j) {
      const double x = draw_marginal(s.covariates, rng);
      out.x(i, j) = x;
      const double phi = x + std::sin(x) - shift;
      if (in_theta[static_cast<std::size_t>(j)]) {
        sum_large += phi;
      } else {
        sum_small += phi;
      }
    }
    out.y[i] = g_large * sum_large + g_small * sum_small;
  }
  for (Index i = 0; i < s.n; ++i) out.y[i] += s.noise_sd * rng.normal();
  return out;
}

ResponseLaw scenario_response_law(const Scenario& s) {
  s.validate();
  const double g_large = gamma_large(s);
  const double g_small = gamma_small(s);
  const double shift = sin_x_moment(s.covariates);
  const double noise_sd = s.noise_sd;
  std::vector<char> in_theta(static_cast<std::size_t>(s.p), 0);
  for (const Index j : s.theta()) in_theta[static_cast<std::size_t>(j)] = 1;
  return [g_large, g_small, shift, noise_sd, in_theta](
             const Eigen::Ref<const Vector>& row, Rng& rng) {
    double sum_large = 0.0, sum_small = 0.0;
    for (Index j = 0; j < row.size(); ++j) {
      const double phi = row[j] + std::sin(row[j]) - shift;
      if (in_theta[static_cast<std::size_t>(j)]) {
        sum_large += phi;
      } else {
        sum_small += phi;
      }
    }
    return g_large * sum_large + g_small * sum_small + noise_sd * rng.normal();
  };
}

CovariateModel scenario_covariate_model(const Scenario& s) {
  return CovariateModel::independent(s.p, s.covariates);
}

std::vector<std::string> suite_estimator_names() {
  return {"naive", "tg", "th", "th_gap", "tg_boot", "th_boot"};
}

namespace {

Selector suite_selector(const std::string& which, const Scenario& s) {
  if (which == "theta") return make_fixed_selector(s.theta());
  if (which == "gap") return make_gap_selector();
  if (which == "all") return make_all_selector();
  throw ConfigError("unknown selector '" + which + "' (available: theta, gap, all)");
}

}  // namespace

std::vector<SuiteEstimator> make_suite(const std::vector<std::string>& names,
                                       const SuiteOptions& options) {
  if (names.empty()) throw ConfigError("estimator suite must not be empty");
  std::vector<SuiteEstimator> suite;
  suite.reserve(names.size());
  for (const auto& name : names) {
    if (name == "naive") {
      suite.push_back({name, [](const LabeledSample& s, const Scenario&,
                                std::uint64_t) { return tau_sq_naive(build_w(s)); }});
    } else if (name == "tg") {
      suite.push_back({name, [](const LabeledSample& sample, const Scenario& sc,
                                std::uint64_t) {
                         return algorithm1(sample, make_all_selector(),
                                           scenario_covariate_model(sc))
                             .tau_sq_final();
                       }});
    } else if (name == "th") {
      const std::string which = options.selector;
      suite.push_back({name, [which](const LabeledSample& sample,
                                     const Scenario& sc, std::uint64_t) {
                         return algorithm1(sample, suite_selector(which, sc),
                                           scenario_covariate_model(sc))
                             .tau_sq_final();
                       }});
    } else if (name == "th_gap") {
      suite.push_back({name, [](const LabeledSample& sample, const Scenario& sc,
                                std::uint64_t) {
                         return algorithm1(sample, make_gap_selector(),
                                           scenario_covariate_model(sc))
                             .tau_sq_final();
                       }});
    } else if (name == "tg_boot" || name == "th_boot") {
      const bool all = name == "tg_boot";
      const Index m = options.bootstrap_m;
      const std::string plugin = options.bootstrap_plugin;
      const std::string which = options.selector;
      suite.push_back(
          {name, [all, m, plugin, which](const LabeledSample& sample,
                                         const Scenario& sc, std::uint64_t seed) {
             const CovariateModel model = scenario_covariate_model(sc);
             const Selector sel =
                 all ? make_all_selector() : suite_selector(which, sc);
             return algorithm2(sample, make_plugin(plugin, model), sel, model, m,
                               seed)
                 .estimate;
           }});
    } else {
      std::string known;
      for (const auto& k : suite_estimator_names())
        known += (known.empty() ? "" : ", ") + k;
      throw ConfigError("unknown estimator '" + name + "' (available: " + known +
                        ")");
    }
  }
  return suite;
}

Matrix run_replicates(const Scenario& scenario,
                      const std::vector<SuiteEstimator>& suite, int threads) {
  scenario.validate();
  if (suite.empty()) throw ConfigError("estimator suite must not be empty");
  Matrix estimates(scenario.reps, static_cast<Index>(suite.size()));
  parallel_for(
      scenario.reps,
      [&](Index r) {
        const LabeledSample sample = gen_dataset(scenario, r);
        const std::uint64_t rep_seed = splitmix64(
            splitmix64(scenario.base_seed ^ 0x626F6F74ULL) ^
            static_cast<std::uint64_t>(r + 1));
        for (std::size_t e = 0; e < suite.size(); ++e) {
          try {
            estimates(r, static_cast<Index>(e)) =
                suite[e].eval(sample, scenario, rep_seed);
          } catch (const std::exception& ex) {
            throw DataError("estimator '" + suite[e].name + "' failed on replicate " +
                            std::to_string(r) + " (base_seed " +
                            std::to_string(scenario.base_seed) + "): " + ex.what());
          }
        }
      },
      threads);
  return estimates;
}

std::vector<MetricsRow> summarize(const Scenario& scenario,
                                  const std::vector<SuiteEstimator>& suite,
                                  const Matrix& estimates) {
  const Index reps = estimates.rows();
  if (reps != scenario.reps ||
      estimates.cols() != static_cast<Index>(suite.size())) {
    throw ShapeError("estimate matrix does not match scenario/suite");
  }
  std::vector<MetricsRow> rows;
  rows.reserve(suite.size());
  const double r = static_cast<double>(reps);
  double rmse_ref = 0.0;
  for (std::size_t e = 0; e < suite.size(); ++e) {
    const Vector est = estimates.col(static_cast<Index>(e));
    const Vector err = est.array() - scenario.tau_sq;
    MetricsRow row;
    row.estimator = suite[e].name;
    row.reps = reps;
    row.bias = err.mean();
    const double mean_est = est.mean();
    row.se = reps > 1
                 ? std::sqrt((est.array() - mean_est).square().sum() / (r - 1.0))
                 : 0.0;
    const Vector sq_err = err.array().square();
    const double mse = sq_err.mean();
    row.rmse = std::sqrt(mse);
    if (row.rmse > 0.0 && reps > 1) {
      const double var_sq_err =
          (sq_err.array() - mse).square().sum() / (r - 1.0);
      row.sigma_rmse_hat = std::sqrt(var_sq_err / r) / (2.0 * row.rmse);
    }
    if (e == 0) {
      rmse_ref = row.rmse;
      row.pct_change = 0.0;
    } else {
      row.pct_change =
          rmse_ref > 0.0 ? 100.0 * (row.rmse - rmse_ref) / rmse_ref : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricsRow> run_study(const Scenario& scenario,
                                  const std::vector<SuiteEstimator>& suite,
                                  int threads) {
  return summarize(scenario, suite, run_replicates(scenario, suite, threads));
}

double selection_agreement(const Scenario& scenario, const Selector& selector,
                           Index reps, int threads) {
  scenario.validate();
  if (reps < 1) throw ConfigError("selection_agreement needs reps >= 1");
  std::vector<IndexSet> picks(static_cast<std::size_t>(reps));
  parallel_for(
      reps,
      [&](Index r) {
        const LabeledSample sample = gen_dataset(scenario, r);
        const WMatrix w = build_w(sample);
        picks[static_cast<std::size_t>(r)] =
            selector(sample, beta_sq_hat(w)).indices;
      },
      threads);
  std::map<IndexSet, Index> counts;
  for (const auto& s : picks) ++counts[s];
  Index best = 0;
  for (const auto& [subset, count] : counts) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(reps);
}

}  // namespace signal_lab
