#include <doctest.h>

#include <cmath>
#include <functional>

#include "signal_lab/rng.hpp"
#include "signal_lab/sim.hpp"
#include "signal_lab/ustat.hpp"

using namespace signal_lab;

namespace {

// Adaptive Simpson quadrature; the independent oracle for the hard-coded
// model constants.
double simpson(const std::function<double(double)>& f, double a, double b,
               int depth, double fa, double fb, double fm, double whole) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 1e-12) {
    return left + right;
  }
  return simpson(f, a, m, depth - 1, fa, fm, flm, left) +
         simpson(f, m, b, depth - 1, fm, fb, frm, right);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, 48, fa, fb, fm, whole);
}

double sample_variance(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("model constants pinned by quadrature") {
  // E[X sin X] for X = Exp(1) - 1
  const double exp_moment = integrate(
      [](double t) { return (t - 1.0) * std::sin(t - 1.0) * std::exp(-t); },
      0.0, 60.0);
  CHECK(x_sin_x_moment(Marginal::CenteredExponential) ==
        doctest::Approx(exp_moment).epsilon(1e-9));

  // E[sin X] for X = Exp(1) - 1
  const double exp_sin = integrate(
      [](double t) { return std::sin(t - 1.0) * std::exp(-t); }, 0.0, 60.0);
  CHECK(sin_x_moment(Marginal::CenteredExponential) ==
        doctest::Approx(exp_sin).epsilon(1e-9));

  // E[X sin X] for the standard normal
  const double inv_sqrt_2pi = 0.3989422804014327;
  const double normal_moment = integrate(
      [inv_sqrt_2pi](double t) {
        return t * std::sin(t) * inv_sqrt_2pi * std::exp(-0.5 * t * t);
      },
      -12.0, 12.0);
  CHECK(x_sin_x_moment(Marginal::StandardNormal) ==
        doctest::Approx(normal_moment).epsilon(1e-9));
  CHECK(sin_x_moment(Marginal::StandardNormal) == 0.0);
}

TEST_CASE("gen_dataset: zero signal leaves pure noise") {
  Scenario s;
  s.n = 2000;
  s.p = 4;
  s.k = 2;
  s.tau_sq = 0.0;
  s.eta = 0.5;
  s.base_seed = 5;
  CHECK(gamma_large(s) == 0.0);
  CHECK(gamma_small(s) == 0.0);
  const LabeledSample d = gen_dataset(s, 0);
  // Y ~ N(0, 1) independent of X
  CHECK(std::abs(d.y.mean()) < 4.0 / std::sqrt(2000.0));
  CHECK(std::abs(sample_variance(d.y) - 1.0) < 0.15);

  s.noise_sd = 0.0;
  const LabeledSample quiet = gen_dataset(s, 0);
  CHECK(quiet.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gen_dataset: deterministic per (seed, rep), distinct across reps") {
  Scenario s;
  s.n = 25;
  s.p = 12;
  s.k = 3;
  s.tau_sq = 1.0;
  s.eta = 0.6;
  s.base_seed = 77;
  const LabeledSample a = gen_dataset(s, 4);
  const LabeledSample b = gen_dataset(s, 4);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  const LabeledSample c = gen_dataset(s, 5);
  CHECK(a.x != c.x);

  Scenario other = s;
  other.base_seed = 78;
  const LabeledSample d = gen_dataset(other, 4);
  CHECK(a.x != d.x);
}

TEST_CASE("gen_dataset: response has zero mean and the configured signal split") {
  Scenario s;
  s.n = 40'000;
  s.p = 10;
  s.k = 3;
  s.tau_sq = 1.0;
  s.eta = 0.5;
  s.base_seed = 9;
  const LabeledSample d = gen_dataset(s, 0);
  const double sd_y = std::sqrt(sample_variance(d.y));
  CHECK(std::abs(d.y.mean()) < 4.0 * sd_y / std::sqrt(40'000.0));

  // per-covariate projection: E[X_j Y] = gamma_j (1 + E[X sin X])
  const double c = 1.0 + x_sin_x_moment(s.covariates);
  for (Index j = 0; j < s.p; ++j) {
    const double beta_hat = d.x.col(j).dot(d.y) / 40'000.0;
    const double gamma = j < s.k ? gamma_large(s) : gamma_small(s);
    CHECK(std::abs(beta_hat - gamma * c) < 0.05);
  }
}

TEST_CASE("gen_dataset: variance decomposition matches the quadrature oracle") {
  // Var(Y) = tau^2 Var(phi)/(1+c)^2 + noise^2 with phi = x + sin x - E sin x.
  Scenario s;
  s.n = 60'000;
  s.p = 6;
  s.k = 2;
  s.tau_sq = 2.0;
  s.eta = 0.7;
  s.base_seed = 21;
  const double c = x_sin_x_moment(s.covariates);
  const double s1 = sin_x_moment(s.covariates);
  const double sin_sq = integrate(
      [](double t) {
        const double u = std::sin(t - 1.0);
        return u * u * std::exp(-t);
      },
      0.0, 60.0);
  const double var_phi = 1.0 + 2.0 * c + sin_sq - s1 * s1;
  const double expected = s.tau_sq * var_phi / ((1.0 + c) * (1.0 + c)) + 1.0;
  const LabeledSample d = gen_dataset(s, 0);
  CHECK(std::abs(sample_variance(d.y) - expected) < 0.1);
}

TEST_CASE("scenario validation") {
  Scenario s;
  s.n = 50;
  s.p = 10;
  s.k = 3;
  s.tau_sq = 1.0;
  s.eta = 0.5;
  CHECK_NOTHROW(s.validate());
  Scenario bad = s;
  bad.eta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.eta = 1.2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.tau_sq = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.k = 20;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.k = 10;  // p == k needs eta == 1
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.eta = 1.0;
  CHECK_NOTHROW(bad.validate());
  bad = s;
  bad.theta_set = {0, 1};  // wrong size
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.theta_set = {2, 5, 9};
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("run_study: constant estimator has zero bias, SE and RMSE") {
  Scenario s;
  s.n = 20;
  s.p = 6;
  s.k = 2;
  s.tau_sq = 1.5;
  s.eta = 0.5;
  s.reps = 10;
  std::vector<SuiteEstimator> suite;
  suite.push_back({"exact", [](const LabeledSample&, const Scenario& sc,
                               std::uint64_t) { return sc.tau_sq; }});
  suite.push_back({"off_by_one", [](const LabeledSample&, const Scenario& sc,
                                    std::uint64_t) { return sc.tau_sq + 1.0; }});
  const auto rows = run_study(s, suite);
  CHECK(rows[0].bias == 0.0);
  CHECK(rows[0].se == 0.0);
  CHECK(rows[0].rmse == 0.0);
  CHECK(rows[0].pct_change == 0.0);  // reference row, exactly
  CHECK(rows[0].sigma_rmse_hat == 0.0);
  CHECK(rows[1].bias == doctest::Approx(1.0));
  CHECK(rows[1].rmse == doctest::Approx(1.0));
}

TEST_CASE("run_study: summary identity RMSE^2 = bias^2 + SE^2 (R-1)/R") {
  Scenario s;
  s.n = 40;
  s.p = 15;
  s.k = 3;
  s.tau_sq = 1.0;
  s.eta = 0.6;
  s.reps = 60;
  s.base_seed = 3;
  const auto rows = run_study(s, make_suite({"naive", "tg", "th"}));
  for (const auto& row : rows) {
    const double r = static_cast<double>(row.reps);
    const double lhs = row.rmse * row.rmse;
    const double rhs = row.bias * row.bias + row.se * row.se * (r - 1.0) / r;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("run_replicates: schedule-independent across thread counts") {
  Scenario s;
  s.n = 30;
  s.p = 12;
  s.k = 3;
  s.tau_sq = 1.0;
  s.eta = 0.8;
  s.reps = 16;
  s.base_seed = 11;
  const auto suite = make_suite({"naive", "th", "tg_boot"});
  const Matrix a = run_replicates(s, suite, 1);
  const Matrix b = run_replicates(s, suite, 4);
  CHECK(a == b);
}

TEST_CASE("run_study: estimator failures abort with the replicate identified") {
  Scenario s;
  s.n = 20;
  s.p = 6;
  s.k = 2;
  s.tau_sq = 1.0;
  s.eta = 0.5;
  s.reps = 8;
  std::vector<SuiteEstimator> suite;
  suite.push_back({"boom", [](const LabeledSample&, const Scenario&,
                              std::uint64_t) -> double {
                     throw std::runtime_error("kaboom");
                   }});
  CHECK_THROWS_AS(run_study(s, suite), DataError);
  try {
    run_study(s, suite);
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("boom") != std::string::npos);
    CHECK(msg.find("replicate") != std::string::npos);
  }
}

TEST_CASE("make_suite: unknown estimator is rejected with the registry listed") {
  CHECK_THROWS_AS(make_suite({"eigenprism"}), ConfigError);
  try {
    make_suite({"eigenprism"});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("th_boot") != std::string::npos);
  }
  CHECK_THROWS_AS(make_suite({}), ConfigError);
}

TEST_CASE("estimator consistency: RMSE shrinks as n = p grows") {
  // fixed signal level, growing sample; naive RMSE must be non-increasing
  // within Monte-Carlo error (tested on a deterministic seed)
  double prev = 1e300;
  for (const Index n : {Index{100}, Index{300}, Index{900}}) {
    Scenario s;
    s.n = n;
    s.p = n;
    s.k = 6;
    s.tau_sq = 1.0;
    s.eta = 0.5;
    s.reps = 150;
    s.base_seed = 1000 + static_cast<std::uint64_t>(n);
    const auto rows = run_study(s, make_suite({"naive"}));
    CHECK(rows[0].rmse < prev * 1.02);  // small slack for MC noise
    prev = rows[0].rmse;
  }
}

TEST_CASE("selection agreement diagnostic") {
  Scenario s;
  s.n = 60;
  s.p = 20;
  s.k = 4;
  s.tau_sq = 1.0;
  s.eta = 0.9;
  s.base_seed = 8;
  // a fixed selector trivially agrees with itself on every replicate
  CHECK(selection_agreement(s, make_fixed_selector(s.theta()), 20) == 1.0);
  const double gap_rate = selection_agreement(s, make_gap_selector(), 20);
  CHECK(gap_rate >= 0.0);
  CHECK(gap_rate <= 1.0);
}
