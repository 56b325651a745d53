#include "signal_lab/boot.hpp"

#include <cmath>

#include "signal_lab/parallel.hpp"
#include "signal_lab/rng.hpp"
#include "signal_lab/ustat.hpp"
#include "signal_lab/zeroest.hpp"

namespace signal_lab {

BootstrapResult algorithm2(const LabeledSample& sample,
                           const PluginEstimator& estimator,
                           const Selector& selector,
                           const CovariateModel& model, Index m,
                           std::uint64_t seed, int threads) {
  validate_sample(sample);
  if (m < 2) throw ConfigError("bootstrap needs at least 2 replicates");
  if (!estimator.eval) throw ConfigError("plug-in estimator has no eval");
  if (!model.whitened()) {
    throw WhiteningError("zero-estimator pipeline expects a whitened model");
  }
  const Index n = sample.n();

  BootstrapResult result;
  result.m_requested = m;

  // Subset fixed once, from the original sample.
  const WMatrix w = build_w(sample);
  const Selection sel = selector(sample, beta_sq_hat(w));
  result.subset = sel.indices;
  result.base_estimate = estimator.eval(sample);

  if (sel.indices.size() < 2) {
    result.no_zero_estimator = true;
    result.estimate = result.base_estimate;
    return result;
  }
  const VarG vg = var_g(model, sel.indices);
  const ZeroStat z = zero_stat(sample, sel.indices, vg.value);
  result.z_bar = z.z_bar;

  std::vector<double> boot_estimate(static_cast<std::size_t>(m), 0.0);
  std::vector<double> boot_z(static_cast<std::size_t>(m), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(m), 0);
  parallel_for(
      m,
      [&](Index r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        std::vector<Index> picks(static_cast<std::size_t>(n));
        double zsum = 0.0;
        for (Index i = 0; i < n; ++i) {
          const Index pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
          picks[static_cast<std::size_t>(i)] = pick;
          zsum += z.z_values[pick];  // same h, resampled rows
        }
        LabeledSample bs;
        bs.x = sample.x(picks, Eigen::all);
        bs.y = sample.y(picks);
        try {
          boot_estimate[static_cast<std::size_t>(r)] = estimator.eval(bs);
          boot_z[static_cast<std::size_t>(r)] = zsum / static_cast<double>(n);
          ok[static_cast<std::size_t>(r)] = 1;
        } catch (const std::exception&) {
          ok[static_cast<std::size_t>(r)] = 0;  // skipped, counted below
        }
      },
      threads);

  Index used = 0;
  double mean_est = 0.0, mean_z = 0.0;
  for (Index r = 0; r < m; ++r) {
    if (!ok[static_cast<std::size_t>(r)]) continue;
    ++used;
    mean_est += boot_estimate[static_cast<std::size_t>(r)];
    mean_z += boot_z[static_cast<std::size_t>(r)];
  }
  result.m_used = used;
  result.m_failed = m - used;
  if (result.m_failed * 2 > m) {
    throw DataError("more than half of the bootstrap replicates failed (" +
                    std::to_string(result.m_failed) + " of " + std::to_string(m) +
                    ")");
  }
  if (used < 2) throw DataError("fewer than 2 usable bootstrap replicates");
  mean_est /= static_cast<double>(used);
  mean_z /= static_cast<double>(used);
  double cov = 0.0;
  for (Index r = 0; r < m; ++r) {
    if (!ok[static_cast<std::size_t>(r)]) continue;
    cov += (boot_estimate[static_cast<std::size_t>(r)] - mean_est) *
           (boot_z[static_cast<std::size_t>(r)] - mean_z);
  }
  cov /= static_cast<double>(used - 1);
  result.cov_hat = cov;
  // Known Var(Z) = Var[g_S(X)]/n in the denominator, not a bootstrap estimate.
  result.c_tilde = cov / (vg.value / static_cast<double>(n));
  result.estimate = result.base_estimate - result.c_tilde * result.z_bar;
  return result;
}

PluginEstimator make_plugin(const std::string& name, const CovariateModel& model) {
  if (name == "naive") {
    return PluginEstimator{
        name, [](const LabeledSample& s) { return tau_sq_naive(build_w(s)); }};
  }
  if (name == "naive_tg") {
    return PluginEstimator{name, [model](const LabeledSample& s) {
                             return algorithm1(s, make_all_selector(), model)
                                 .tau_sq_final();
                           }};
  }
  if (name == "naive_th") {
    return PluginEstimator{name, [model](const LabeledSample& s) {
                             return algorithm1(s, make_gap_selector(), model)
                                 .tau_sq_final();
                           }};
  }
  std::string known;
  for (const auto& k : plugin_names()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("unknown plug-in estimator '" + name + "' (available: " +
                    known + ")");
}

std::vector<std::string> plugin_names() {
  return {"naive", "naive_tg", "naive_th"};
}

}  // namespace signal_lab
