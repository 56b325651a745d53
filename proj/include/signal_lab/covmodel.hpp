#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "signal_lab/rng.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

enum class Marginal { StandardNormal, CenteredExponential };

double draw_marginal(Marginal marginal, Rng& rng);

// A known covariate distribution: first two moments plus a sampler. The
// estimators assume the whitened form (mean 0, covariance I); whiten() maps
// raw data into it.
struct CovariateModel {
  enum class Kind { IndependentStandardized, GeneralGaussian, Empirical };
  using RowSampler = std::function<void(Rng&, Eigen::Ref<Vector>)>;

  Kind kind = Kind::IndependentStandardized;
  Index p = 0;
  Vector mean;
  Matrix covariance;
  Marginal marginal = Marginal::StandardNormal;
  RowSampler sampler;       // Empirical only
  Matrix gaussian_factor;   // cached Cholesky factor, GeneralGaussian only

  // i.i.d. standardized coordinates: mean 0, covariance I.
  static CovariateModel independent(Index p,
                                    Marginal marginal = Marginal::StandardNormal);
  // N(mean, covariance) with covariance symmetric positive definite.
  static CovariateModel gaussian(Vector mean, Matrix covariance);
  // Arbitrary sampler; mean/covariance are what the caller asserts they are.
  static CovariateModel empirical(Index p, RowSampler sampler, Vector mean,
                                  Matrix covariance);

  bool whitened() const;
  void draw_row(Rng& rng, Eigen::Ref<Vector> row) const;
};

// Symmetric square root and its inverse for an SPD covariance, via
// eigendecomposition (the unique symmetric SPD root, basis independent).
// Throws WhiteningError if the matrix is asymmetric beyond 1e-12 relative or
// has an eigenvalue <= 1e-12 times the largest.
struct WhitenTransform {
  Vector mean;
  Matrix inverse_sqrt;  // covariance^{-1/2}
  Matrix sqrt;          // covariance^{1/2}

  LabeledSample apply(const LabeledSample& raw) const;
  LabeledSample invert(const LabeledSample& whitened) const;
};

WhitenTransform whitening_transform(const Vector& mean, const Matrix& covariance);

// x_i -> covariance^{-1/2} (x_i - mean); responses pass through unchanged.
LabeledSample whiten(const LabeledSample& raw, const Vector& mean,
                     const Matrix& covariance);

// Var[g_S(X)] for g_S(x) = sum_{j<j' in S} x_j x_j' under the whitened model.
// Exact for independent standardized coordinates: |S|(|S|-1)/2. Otherwise
// estimated by seeded Monte Carlo, with a standard error attached.
struct VarG {
  double value = 0.0;
  double std_error = 0.0;  // 0 when exact
};

VarG var_g(const CovariateModel& model, const IndexSet& subset,
           Index n_draws = 1'000'000, std::uint64_t seed = 0x5EED5EEDULL);

// Population quantities feeding the variance formulas and oracle
// coefficients, all defined for the whitened covariates:
//   beta_j = E[W_j],  A = E[W W^T],  theta_S = E[W g_S(X)],
//   mu4 = E[(Y-alpha)^4],  pi_j = E[(Y-alpha)^2 W_j],  wy_j = E[W_j (Y-alpha)]
// with W = X*Y and alpha = E[Y].
struct MomentSet {
  Vector beta;
  double alpha = 0.0;
  Matrix a;
  std::map<IndexSet, Vector> theta;
  Vector wy;
  double mu4 = 0.0;
  Vector pi;
  double sigma_y_sq = 0.0;
};

struct MomentOptions {
  bool compute_a = true;               // O(p^2) per draw; disable for large p
  std::vector<IndexSet> theta_subsets;
  Index chunk_size = 16384;
  int threads = 0;                     // 0: default_threads()
};

// Conditional sampler for Y given a whitened covariate row.
using ResponseLaw = std::function<double(const Eigen::Ref<const Vector>&, Rng&)>;

// Monte-Carlo moment oracle: sample averages over n_draws fresh draws,
// deterministic given the seed (chunk-indexed streams, reduction in chunk
// order). Two passes over the same stream: alpha first, centered moments
// second.
MomentSet population_moments(const CovariateModel& model,
                             const ResponseLaw& response, Index n_draws,
                             std::uint64_t seed, MomentOptions options = {});

}  // namespace signal_lab
