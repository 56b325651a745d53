#include "signal_lab/covmodel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

#include "signal_lab/parallel.hpp"

namespace signal_lab {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kEigenvalueTol = 1e-12;

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + " must be square, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void check_symmetric(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * (scale > 0.0 ? scale : 1.0)) {
    throw WhiteningError("covariance is not symmetric (relative asymmetry " +
                         std::to_string(asym / (scale > 0.0 ? scale : 1.0)) + ")");
  }
}

}  // namespace

double draw_marginal(Marginal marginal, Rng& rng) {
  switch (marginal) {
    case Marginal::StandardNormal:
      return rng.normal();
    case Marginal::CenteredExponential:
      return rng.exponential() - 1.0;
  }
  throw Error("unknown marginal");
}

CovariateModel CovariateModel::independent(Index p, Marginal marginal) {
  if (p < 1) throw ShapeError("covariate dimension must be positive");
  CovariateModel model;
  model.kind = Kind::IndependentStandardized;
  model.p = p;
  model.mean = Vector::Zero(p);
  model.covariance = Matrix::Identity(p, p);
  model.marginal = marginal;
  return model;
}

CovariateModel CovariateModel::gaussian(Vector mean, Matrix covariance) {
  check_square(covariance, "covariance");
  if (mean.size() != covariance.rows()) {
    throw ShapeError("mean length does not match covariance dimension");
  }
  check_symmetric(covariance);
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw WhiteningError("covariance is not positive definite");
  }
  CovariateModel model;
  model.kind = Kind::GeneralGaussian;
  model.p = covariance.rows();
  model.mean = std::move(mean);
  model.covariance = std::move(covariance);
  model.gaussian_factor = llt.matrixL();
  return model;
}

CovariateModel CovariateModel::empirical(Index p, RowSampler sampler, Vector mean,
                                         Matrix covariance) {
  if (p < 1) throw ShapeError("covariate dimension must be positive");
  if (!sampler) throw DataError("empirical model needs a sampler");
  if (mean.size() != p || covariance.rows() != p || covariance.cols() != p) {
    throw ShapeError("empirical model moments do not match dimension");
  }
  CovariateModel model;
  model.kind = Kind::Empirical;
  model.p = p;
  model.mean = std::move(mean);
  model.covariance = std::move(covariance);
  model.sampler = std::move(sampler);
  return model;
}

bool CovariateModel::whitened() const {
  if (kind == Kind::IndependentStandardized) return true;
  const double mean_off = mean.cwiseAbs().maxCoeff();
  const double cov_off =
      (covariance - Matrix::Identity(p, p)).cwiseAbs().maxCoeff();
  return mean_off <= 1e-10 && cov_off <= 1e-10;
}

void CovariateModel::draw_row(Rng& rng, Eigen::Ref<Vector> row) const {
  switch (kind) {
    case Kind::IndependentStandardized:
      for (Index j = 0; j < p; ++j) row[j] = draw_marginal(marginal, rng);
      return;
    case Kind::GeneralGaussian: {
      Vector z(p);
      for (Index j = 0; j < p; ++j) z[j] = rng.normal();
      row = mean + gaussian_factor * z;
      return;
    }
    case Kind::Empirical:
      sampler(rng, row);
      return;
  }
}

WhitenTransform whitening_transform(const Vector& mean, const Matrix& covariance) {
  check_square(covariance, "covariance");
  if (mean.size() != covariance.rows()) {
    throw ShapeError("mean length does not match covariance dimension");
  }
  check_symmetric(covariance);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw WhiteningError("eigendecomposition of the covariance failed");
  }
  const Vector& values = solver.eigenvalues();
  const double largest = values[values.size() - 1];
  if (largest <= 0.0 || values[0] <= kEigenvalueTol * largest) {
    throw WhiteningError("covariance is numerically singular (smallest eigenvalue " +
                         std::to_string(values[0]) + ")");
  }
  WhitenTransform t;
  t.mean = mean;
  t.inverse_sqrt = solver.eigenvectors() *
                   values.cwiseSqrt().cwiseInverse().asDiagonal() *
                   solver.eigenvectors().transpose();
  t.sqrt = solver.eigenvectors() * values.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().transpose();
  return t;
}

LabeledSample WhitenTransform::apply(const LabeledSample& raw) const {
  if (raw.p() != mean.size()) {
    throw ShapeError("sample has " + std::to_string(raw.p()) +
                     " covariates, transform expects " + std::to_string(mean.size()));
  }
  LabeledSample out;
  // inverse_sqrt is symmetric, so row-wise application is a right multiply.
  out.x = (raw.x.rowwise() - mean.transpose()) * inverse_sqrt;
  out.y = raw.y;
  return out;
}

LabeledSample WhitenTransform::invert(const LabeledSample& whitened) const {
  if (whitened.p() != mean.size()) {
    throw ShapeError("sample does not match transform dimension");
  }
  LabeledSample out;
  out.x = (whitened.x * sqrt).rowwise() + mean.transpose();
  out.y = whitened.y;
  return out;
}

LabeledSample whiten(const LabeledSample& raw, const Vector& mean,
                     const Matrix& covariance) {
  return whitening_transform(mean, covariance).apply(raw);
}

VarG var_g(const CovariateModel& model, const IndexSet& subset, Index n_draws,
           std::uint64_t seed) {
  validate_index_set(subset, model.p);
  const Index m = static_cast<Index>(subset.size());
  if (m < 2) {
    throw DegenerateSubsetError("zero-estimator subset needs at least 2 indices");
  }
  if (model.kind == CovariateModel::Kind::IndependentStandardized) {
    // E[(X_j X_j')^2] = 1 per pair and distinct pairs are uncorrelated.
    return VarG{static_cast<double>(m) * static_cast<double>(m - 1) / 2.0, 0.0};
  }
  if (n_draws < 2) throw MomentError("var_g Monte Carlo needs at least 2 draws");
  Rng rng(splitmix64(seed));
  Vector row(model.p);
  double mean_g = 0.0, m2 = 0.0;
  std::vector<double> values(static_cast<std::size_t>(n_draws));
  for (Index i = 0; i < n_draws; ++i) {
    model.draw_row(rng, row);
    double u = 0.0, v = 0.0;
    for (const Index j : subset) {
      u += row[j];
      v += row[j] * row[j];
    }
    values[static_cast<std::size_t>(i)] = 0.5 * (u * u - v);
  }
  for (const double g : values) mean_g += g;
  mean_g /= static_cast<double>(n_draws);
  double m4 = 0.0;
  for (const double g : values) {
    const double d = g - mean_g;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double nd = static_cast<double>(n_draws);
  const double variance = m2 / (nd - 1.0);
  m4 /= nd;
  // Delta-method standard error of a sample variance.
  const double se_sq = (m4 - variance * variance * (nd - 3.0) / (nd - 1.0)) / nd;
  return VarG{variance, se_sq > 0.0 ? std::sqrt(se_sq) : 0.0};
}

namespace {

struct MomentAccumulator {
  double sum_y = 0.0;
  Vector sum_w;
  Matrix sum_a;
  std::vector<Vector> sum_theta;
  Vector sum_wy;
  Vector sum_pi;
  double sum_mu4 = 0.0;
  double sum_ysq = 0.0;
  Index count = 0;
};

}  // namespace

MomentSet population_moments(const CovariateModel& model,
                             const ResponseLaw& response, Index n_draws,
                             std::uint64_t seed, MomentOptions options) {
  if (n_draws < 10'000) {
    throw MomentError("moment oracle needs at least 1e4 draws");
  }
  if (!response) throw DataError("moment oracle needs a response law");
  for (const auto& subset : options.theta_subsets) {
    validate_index_set(subset, model.p);
    if (subset.size() < 2) {
      throw DegenerateSubsetError("theta subset needs at least 2 indices");
    }
  }
  const Index p = model.p;
  const Index chunk = options.chunk_size > 0 ? options.chunk_size : 16384;
  const Index n_chunks = (n_draws + chunk - 1) / chunk;
  const auto chunk_range = [&](Index c) {
    const Index lo = c * chunk;
    return std::pair<Index, Index>(lo, std::min(lo + chunk, n_draws));
  };

  // Pass 1: alpha = E[Y]. Pass 2 replays the identical streams and
  // accumulates everything centered at alpha.
  std::vector<double> chunk_sum_y(static_cast<std::size_t>(n_chunks), 0.0);
  parallel_for(
      n_chunks,
      [&](Index c) {
        auto [lo, hi] = chunk_range(c);
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(c));
        Vector row(p);
        double s = 0.0;
        for (Index i = lo; i < hi; ++i) {
          model.draw_row(rng, row);
          s += response(row, rng);
        }
        chunk_sum_y[static_cast<std::size_t>(c)] = s;
      },
      options.threads);
  double alpha = 0.0;
  for (const double s : chunk_sum_y) alpha += s;
  alpha /= static_cast<double>(n_draws);
  if (!std::isfinite(alpha)) throw DataError("moment oracle saw non-finite draws");

  const std::size_t n_subsets = options.theta_subsets.size();
  std::vector<MomentAccumulator> acc(static_cast<std::size_t>(n_chunks));
  parallel_for(
      n_chunks,
      [&](Index c) {
        auto [lo, hi] = chunk_range(c);
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(c));
        MomentAccumulator& a = acc[static_cast<std::size_t>(c)];
        a.sum_w = Vector::Zero(p);
        a.sum_wy = Vector::Zero(p);
        a.sum_pi = Vector::Zero(p);
        if (options.compute_a) a.sum_a = Matrix::Zero(p, p);
        a.sum_theta.assign(n_subsets, Vector::Zero(p));
        Vector row(p), w(p);
        for (Index i = lo; i < hi; ++i) {
          model.draw_row(rng, row);
          const double y = response(row, rng);
          const double yc = y - alpha;
          w = row * y;
          a.sum_w += w;
          a.sum_wy += w * yc;
          a.sum_pi += w * (yc * yc);
          a.sum_mu4 += yc * yc * yc * yc;
          a.sum_ysq += yc * yc;
          if (options.compute_a) {
            a.sum_a.selfadjointView<Eigen::Lower>().rankUpdate(w);
          }
          for (std::size_t s = 0; s < n_subsets; ++s) {
            double u = 0.0, v = 0.0;
            for (const Index j : options.theta_subsets[s]) {
              u += row[j];
              v += row[j] * row[j];
            }
            a.sum_theta[s] += w * (0.5 * (u * u - v));
          }
          ++a.count;
        }
      },
      options.threads);

  MomentSet out;
  out.alpha = alpha;
  out.beta = Vector::Zero(p);
  out.wy = Vector::Zero(p);
  out.pi = Vector::Zero(p);
  if (options.compute_a) out.a = Matrix::Zero(p, p);
  std::vector<Vector> theta_total(n_subsets, Vector::Zero(p));
  double mu4 = 0.0, ysq = 0.0;
  for (const auto& a : acc) {
    out.beta += a.sum_w;
    out.wy += a.sum_wy;
    out.pi += a.sum_pi;
    mu4 += a.sum_mu4;
    ysq += a.sum_ysq;
    if (options.compute_a) out.a += a.sum_a;
    for (std::size_t s = 0; s < n_subsets; ++s) theta_total[s] += a.sum_theta[s];
  }
  const double nd = static_cast<double>(n_draws);
  out.beta /= nd;
  out.wy /= nd;
  out.pi /= nd;
  out.mu4 = mu4 / nd;
  out.sigma_y_sq = ysq / (nd - 1.0);
  if (options.compute_a) {
    out.a /= nd;
    out.a = out.a.selfadjointView<Eigen::Lower>();  // mirror to full symmetric
  }
  for (std::size_t s = 0; s < n_subsets; ++s) {
    out.theta[options.theta_subsets[s]] = theta_total[s] / nd;
  }
  if (!out.beta.allFinite() || !std::isfinite(out.mu4) ||
      (options.compute_a && !out.a.allFinite())) {
    throw DataError("moment oracle saw non-finite draws");
  }
  return out;
}

}  // namespace signal_lab
