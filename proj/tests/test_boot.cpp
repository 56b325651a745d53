#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "signal_lab/boot.hpp"
#include "signal_lab/rng.hpp"
#include "signal_lab/sim.hpp"
#include "signal_lab/ustat.hpp"
#include "signal_lab/zeroest.hpp"

using namespace signal_lab;

namespace {

LabeledSample small_benchmark_sample(std::uint64_t seed = 3) {
  Scenario s;
  s.n = 50;
  s.p = 20;
  s.k = 4;
  s.tau_sq = 1.0;
  s.eta = 0.8;
  s.base_seed = seed;
  return gen_dataset(s, 0);
}

}  // namespace

TEST_CASE("algorithm2: data-blind plug-in yields zero coefficient exactly") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  const PluginEstimator constant{"const",
                                 [](const LabeledSample&) { return 42.0; }};
  const BootstrapResult r = algorithm2(sample, constant, make_all_selector(),
                                       model, 50, 7);
  CHECK(r.cov_hat == 0.0);
  CHECK(r.c_tilde == 0.0);
  CHECK(r.estimate == 42.0);
  CHECK(r.base_estimate == 42.0);
  CHECK(r.m_used == 50);
}

TEST_CASE("algorithm2: deterministic and consistent with its own fields") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  const PluginEstimator naive = make_plugin("naive", model);
  const BootstrapResult a =
      algorithm2(sample, naive, make_gap_selector(), model, 64, 99);
  const BootstrapResult b =
      algorithm2(sample, naive, make_gap_selector(), model, 64, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.c_tilde == b.c_tilde);
  CHECK(a.cov_hat == b.cov_hat);
  CHECK(a.subset == b.subset);
  CHECK(a.estimate == a.base_estimate - a.c_tilde * a.z_bar);

  // different seed, different draws
  const BootstrapResult c =
      algorithm2(sample, naive, make_gap_selector(), model, 64, 100);
  CHECK(a.c_tilde != c.c_tilde);
}

TEST_CASE("algorithm2: resampling protocol matches the documented stream layout") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  // plug-in returning the first response of the (bootstrap) sample, so each
  // replicate value exposes which row was drawn first
  const PluginEstimator probe{
      "probe", [](const LabeledSample& s) { return s.y[0]; }};
  const std::uint64_t seed = 1234;
  const BootstrapResult r =
      algorithm2(sample, probe, make_all_selector(), model, 2, seed);

  // replay the documented layout: replicate m uses Rng::stream(seed, m) and
  // picks n row indices via rng.index(n)
  const double vg = var_g(model, select_all(20).indices).value;
  const ZeroStat z = zero_stat(sample, select_all(20).indices, vg);
  const Index n = sample.n();
  double est[2], zbar[2];
  for (Index rep = 0; rep < 2; ++rep) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(rep));
    double zsum = 0.0;
    Index first = 0;
    for (Index i = 0; i < n; ++i) {
      const Index pick =
          static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
      if (i == 0) first = pick;
      zsum += z.z_values[pick];
    }
    est[rep] = sample.y[first];
    zbar[rep] = zsum / static_cast<double>(n);
  }
  const double mean_est = (est[0] + est[1]) / 2.0;
  const double mean_z = (zbar[0] + zbar[1]) / 2.0;
  const double cov = (est[0] - mean_est) * (zbar[0] - mean_z) +
                     (est[1] - mean_est) * (zbar[1] - mean_z);  // 1/(M-1), M=2
  const double c_tilde = cov / (vg / static_cast<double>(n));
  CHECK(r.base_estimate == sample.y[0]);
  CHECK(r.cov_hat == cov);
  CHECK(r.c_tilde == c_tilde);
  CHECK(r.estimate == sample.y[0] - c_tilde * z.z_bar);
}

TEST_CASE("algorithm2: failed replicates are skipped and counted") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  const double base_mean = sample.y.mean();
  // succeeds on the original sample, fails whenever resampling shifts the
  // response mean upward
  const PluginEstimator flaky{"flaky", [base_mean](const LabeledSample& s) {
                                if (s.y.mean() > base_mean + 1e-12) {
                                  throw std::runtime_error("resample rejected");
                                }
                                return s.y.sum();
                              }};
  bool threw_data_error = false;
  Index failed = 0, used = 0;
  try {
    const BootstrapResult r =
        algorithm2(sample, flaky, make_all_selector(), model, 40, 11);
    failed = r.m_failed;
    used = r.m_used;
  } catch (const DataError&) {
    threw_data_error = true;  // > half failed
  }
  if (!threw_data_error) {
    CHECK(failed > 0);
    CHECK(used + failed == 40);
  }

  const PluginEstimator always_fails{
      "always", [base_mean](const LabeledSample& s) -> double {
        if (std::abs(s.y.mean() - base_mean) > 1e-15) {
          throw std::runtime_error("not the original sample");
        }
        return 0.0;
      }};
  CHECK_THROWS_AS(
      algorithm2(sample, always_fails, make_all_selector(), model, 20, 12),
      DataError);
}

TEST_CASE("algorithm2: degenerate selection falls back to the base estimate") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  const PluginEstimator naive = make_plugin("naive", model);
  const BootstrapResult r =
      algorithm2(sample, naive, make_fixed_selector({5}), model, 16, 13);
  CHECK(r.no_zero_estimator);
  CHECK(r.estimate == r.base_estimate);
  CHECK(r.c_tilde == 0.0);
}

TEST_CASE("algorithm2: rejects bad inputs") {
  const LabeledSample sample = small_benchmark_sample();
  const CovariateModel model = CovariateModel::independent(20);
  const PluginEstimator naive = make_plugin("naive", model);
  CHECK_THROWS_AS(algorithm2(sample, naive, make_all_selector(), model, 1, 1),
                  ConfigError);
}

TEST_CASE("plug-in registry") {
  const CovariateModel model = CovariateModel::independent(20);
  CHECK(make_plugin("naive", model).name == "naive");
  CHECK(make_plugin("naive_tg", model).name == "naive_tg");
  CHECK(make_plugin("naive_th", model).name == "naive_th");
  CHECK_THROWS_AS(make_plugin("eigenprism", model), ConfigError);
  try {
    make_plugin("eigenprism", model);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("naive_tg") != std::string::npos);  // lists the registry
  }

  const LabeledSample sample = small_benchmark_sample();
  // the plug-ins actually run and produce the matching library results
  CHECK(make_plugin("naive", model).eval(sample) ==
        tau_sq_naive(build_w(sample)));
}
