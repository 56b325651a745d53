#include "signal_lab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "signal_lab/covmodel.hpp"
#include "signal_lab/io.hpp"
#include "signal_lab/reference.hpp"
#include "signal_lab/rng.hpp"
#include "signal_lab/select.hpp"
#include "signal_lab/sim.hpp"
#include "signal_lab/ustat.hpp"
#include "signal_lab/zeroest.hpp"

namespace signal_lab {

namespace {

constexpr double kRelTol = 1e-10;

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

struct Reporter {
  std::ostream& out;
  int failures = 0;

  void check(const char* name, bool ok, const std::string& detail = "") {
    out << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << "\n";
    if (!ok) ++failures;
  }
};

LabeledSample random_sample(Rng& rng, Index n, Index p) {
  LabeledSample s;
  s.x.resize(n, p);
  s.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) s.x(i, j) = rng.normal();
    s.y[i] = rng.normal();
  }
  return s;
}

}  // namespace

int run_verification(bool quick, std::ostream& out) {
  Reporter rep{out};
  const int instances = quick ? 25 : 100;
  const Index mc_draws = quick ? 20'000 : 100'000;

  // Fast paths against pair-enumeration references on random instances.
  {
    Rng rng(0xACCE55);
    double worst_tau = 0.0, worst_beta = 0.0, worst_chat = 0.0, worst_g = 0.0;
    for (int t = 0; t < instances; ++t) {
      const Index n = 2 + static_cast<Index>(rng.index(29));
      const Index p = 2 + static_cast<Index>(rng.index(7));
      const LabeledSample s = random_sample(rng, n, p);
      const WMatrix w = build_w(s);
      worst_tau = std::max(
          worst_tau, rel_diff(tau_sq_naive(w), reference::tau_sq_pairwise(w.w)));
      const Vector fast_beta = beta_sq_hat(w);
      const Vector slow_beta = reference::beta_sq_pairwise(w.w);
      for (Index j = 0; j < p; ++j) {
        worst_beta = std::max(worst_beta, rel_diff(fast_beta[j], slow_beta[j]));
      }
      IndexSet subset;
      for (Index j = 0; j < p; ++j) {
        if (j < 2 || rng.uniform() < 0.5) subset.push_back(j);
      }
      const double vg = static_cast<double>(subset.size()) *
                        static_cast<double>(subset.size() - 1) / 2.0;
      const ZeroStat z = zero_stat(s, subset, vg);
      for (Index i = 0; i < n; ++i) {
        worst_g = std::max(
            worst_g,
            rel_diff(z.z_values[i],
                     reference::g_pair_enumeration(s.x.row(i), subset)));
      }
      const double fast_num = c_hat(w, z).value * vg;
      const double slow_num =
          reference::c_hat_numerator_pairwise(w.w, z.z_values);
      worst_chat = std::max(worst_chat, rel_diff(fast_num, slow_num));
    }
    rep.check("tau_sq fast path == pairwise reference", worst_tau <= kRelTol,
              "max rel " + std::to_string(worst_tau));
    rep.check("beta_sq fast path == pairwise reference", worst_beta <= kRelTol,
              "max rel " + std::to_string(worst_beta));
    rep.check("c_hat fast path == ordered-pair reference", worst_chat <= kRelTol,
              "max rel " + std::to_string(worst_chat));
    rep.check("g values == pair enumeration", worst_g <= kRelTol,
              "max rel " + std::to_string(worst_g));
  }

  // Moment-difference form of the per-column estimate.
  {
    Rng rng(0xD0A1);
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
      const Index n = 2 + static_cast<Index>(rng.index(29));
      const LabeledSample s = random_sample(rng, n, 3);
      const WMatrix w = build_w(s);
      const Vector fast = beta_sq_hat(w);
      for (Index j = 0; j < 3; ++j) {
        const Vector col = w.w.col(j);
        const double moment_form =
            col.squaredNorm() / static_cast<double>(n) -
            reference::sample_variance_two_pass(col);
        worst = std::max(worst, rel_diff(fast[j], moment_form));
      }
    }
    rep.check("beta_sq dual form (moments - variance)", worst <= kRelTol,
              "max rel " + std::to_string(worst));
  }

  // Whitening round trip on random SPD covariances.
  {
    Rng rng(0x57A7);
    double worst = 0.0;
    for (int t = 0; t < (quick ? 4 : 10); ++t) {
      const Index p = 2 + static_cast<Index>(rng.index(6));
      Matrix b(p, p);
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) b(i, j) = rng.normal();
      const Matrix cov = b * b.transpose() + 0.5 * Matrix::Identity(p, p);
      Vector mu(p);
      for (Index j = 0; j < p; ++j) mu[j] = rng.normal();
      const LabeledSample s = random_sample(rng, 8, p);
      const WhitenTransform t1 = whitening_transform(mu, cov);
      const LabeledSample back = t1.invert(t1.apply(s));
      worst = std::max(worst, (back.x - s.x).cwiseAbs().maxCoeff() /
                                  std::max(1.0, s.x.cwiseAbs().maxCoeff()));
    }
    rep.check("whiten o unwhiten == identity", worst <= 1e-10,
              "max rel " + std::to_string(worst));
  }

  // Zero-mean property of the zero-estimator under whitened models.
  {
    bool ok = true;
    std::string detail;
    for (const Marginal marginal :
         {Marginal::StandardNormal, Marginal::CenteredExponential}) {
      const CovariateModel model = CovariateModel::independent(6, marginal);
      const IndexSet subset{0, 1, 2, 3};
      const VarG vg = var_g(model, subset);
      Rng rng(0x6EA0);
      Vector row(6);
      double sum = 0.0;
      for (Index i = 0; i < mc_draws; ++i) {
        model.draw_row(rng, row);
        sum += reference::g_pair_enumeration(row, subset);
      }
      const double mean = sum / static_cast<double>(mc_draws);
      const double band =
          4.0 * std::sqrt(vg.value / static_cast<double>(mc_draws));
      if (std::abs(mean) > band) {
        ok = false;
        detail = "mean " + std::to_string(mean) + " exceeds " + std::to_string(band);
      }
    }
    rep.check("E[g(X)] == 0 under whitened models", ok, detail);
  }

  // Known Var[g] versus Monte Carlo for the centered-exponential marginal.
  {
    const Index p = 5;
    const CovariateModel exact =
        CovariateModel::independent(p, Marginal::CenteredExponential);
    const CovariateModel sampled = CovariateModel::empirical(
        p,
        [](Rng& rng, Eigen::Ref<Vector> row) {
          for (Index j = 0; j < row.size(); ++j) {
            row[j] = draw_marginal(Marginal::CenteredExponential, rng);
          }
        },
        Vector::Zero(p), Matrix::Identity(p, p));
    const IndexSet subset{0, 2, 3};
    const VarG closed = var_g(exact, subset);
    const VarG mc = var_g(sampled, subset, mc_draws, 0xFEED);
    const bool ok = std::abs(mc.value - closed.value) <= 4.0 * mc.std_error;
    rep.check("Var[g] closed form within 4 SE of Monte Carlo", ok,
              "closed " + std::to_string(closed.value) + ", mc " +
                  std::to_string(mc.value) + " +- " + std::to_string(mc.std_error));
  }

  // Gap selection: determinism and permutation equivariance.
  {
    Rng rng(0x5E1EC7);
    bool ok = true;
    for (int t = 0; t < instances && ok; ++t) {
      const Index p = 3 + static_cast<Index>(rng.index(8));
      Vector stat(p);
      for (Index j = 0; j < p; ++j) stat[j] = rng.uniform();
      const Selection a = gap_select(stat);
      const Selection b = gap_select(stat);
      ok = a.indices == b.indices;
      // Reverse the vector; selected index set must map through the
      // permutation.
      Vector rev = stat.reverse();
      Selection c = gap_select(rev);
      IndexSet mapped;
      for (const Index j : c.indices) mapped.push_back(p - 1 - j);
      std::sort(mapped.begin(), mapped.end());
      ok = ok && mapped == a.indices;
    }
    rep.check("gap selection deterministic and permutation-equivariant", ok);
  }

  // Generator determinism.
  {
    Scenario s;
    s.n = 40;
    s.p = 30;
    s.k = 4;
    s.tau_sq = 1.0;
    s.eta = 0.5;
    s.base_seed = 99;
    const LabeledSample a = gen_dataset(s, 3);
    const LabeledSample b = gen_dataset(s, 3);
    rep.check("gen_dataset bit-identical for equal (seed, rep)",
              a.x == b.x && a.y == b.y);
  }

  // Summary identity RMSE^2 == bias^2 + SE^2 (R-1)/R.
  {
    Scenario s;
    s.n = 30;
    s.p = 10;
    s.k = 3;
    s.tau_sq = 1.0;
    s.eta = 0.7;
    s.reps = 50;
    s.base_seed = 7;
    const auto suite = make_suite({"naive", "tg"});
    const auto rows = run_study(s, suite);
    double worst = 0.0;
    for (const auto& row : rows) {
      const double r = static_cast<double>(row.reps);
      const double lhs = row.rmse * row.rmse;
      const double rhs = row.bias * row.bias + row.se * row.se * (r - 1.0) / r;
      worst = std::max(worst, rel_diff(lhs, rhs));
    }
    rep.check("RMSE^2 == bias^2 + SE^2 (R-1)/R", worst <= 1e-10,
              "max rel " + std::to_string(worst));
  }

  out << (rep.failures == 0 ? "verification passed"
                            : "verification FAILED (" +
                                  std::to_string(rep.failures) + " checks)")
      << "\n";
  return rep.failures;
}

}  // namespace signal_lab
