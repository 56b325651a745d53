#include "signal_lab/ustat.hpp"

#include <cmath>

namespace signal_lab {

namespace detail {

// Kahan-compensated per-column sums; the estimators difference large
// near-equal terms, so accumulation error matters once n*p gets large.
Vector compensated_column_sums(const Matrix& m) {
  Vector sums = Vector::Zero(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    double s = 0.0, carry = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double y = m(i, j) - carry;
      const double t = s + y;
      carry = (t - s) - y;
      s = t;
    }
    sums[j] = s;
  }
  return sums;
}

}  // namespace detail

namespace {

constexpr Index kCompensatedThreshold = 1'000'000;  // n*p

Vector column_sums_of(const Matrix& m) {
  if (m.size() > kCompensatedThreshold) return detail::compensated_column_sums(m);
  return m.colwise().sum();
}

}  // namespace

WMatrix build_w(const LabeledSample& sample) {
  validate_sample(sample);
  WMatrix w;
  w.w = sample.x.array().colwise() * sample.y.array();
  w.column_sums = column_sums_of(w.w);
  w.column_sq_sums = column_sums_of(w.w.array().square().matrix());
  return w;
}

Vector beta_sq_hat(const WMatrix& w) {
  const Index n = w.n();
  if (n < 2) throw SampleSizeError("beta_sq_hat needs n >= 2");
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  return (w.column_sums.array().square() - w.column_sq_sums.array()) / denom;
}

double tau_sq_naive(const WMatrix& w) {
  const Index n = w.n();
  if (n < 2) throw SampleSizeError("tau_sq_naive needs n >= 2");
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  return (w.column_sums.squaredNorm() - w.column_sq_sums.sum()) / denom;
}

double sigma_y_sq_hat(const Eigen::Ref<const Vector>& y) {
  const Index n = y.size();
  if (n < 2) throw SampleSizeError("sigma_y_sq_hat needs n >= 2");
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(n - 1);
}

VarTauResult var_tau_naive(const MomentSet& moments, Index n) {
  if (n < 2) throw SampleSizeError("var_tau_naive needs n >= 2");
  if (moments.beta.size() == 0) throw MomentError("var_tau_naive needs beta");
  if (moments.a.rows() != moments.beta.size() ||
      moments.a.cols() != moments.beta.size()) {
    throw MomentError("var_tau_naive needs A = E[WW'] matching beta");
  }
  VarTauResult r;
  const double beta4 = std::pow(moments.beta.squaredNorm(), 2);
  r.zeta1 = moments.beta.dot(moments.a * moments.beta) - beta4;
  r.zeta2 = moments.a.squaredNorm() - beta4;
  const double nn = static_cast<double>(n);
  r.value = 4.0 * (nn - 2.0) / (nn * (nn - 1.0)) * r.zeta1 +
            2.0 / (nn * (nn - 1.0)) * r.zeta2;
  r.negative = r.value < 0.0;  // impossible for genuine moments
  return r;
}

VarSigmaResult var_sigma_hat(const MomentSet& moments, Index n) {
  if (n < 4) throw SampleSizeError("var_sigma_hat needs n >= 4");
  if (moments.pi.size() != moments.beta.size() ||
      moments.wy.size() != moments.beta.size()) {
    throw MomentError("var_sigma_hat needs pi and wy matching beta");
  }
  const double nn = static_cast<double>(n);
  const double tau_sq = moments.beta.squaredNorm();
  const double sy4 = moments.sigma_y_sq * moments.sigma_y_sq;
  VarSigmaResult r;
  r.var_sigma_y_term = moments.mu4 / nn - (nn - 3.0) / (nn * (nn - 1.0)) * sy4;
  r.var_tau_term = var_tau_naive(moments, n).value;
  r.cov_cross_term =
      -(4.0 / nn) * (moments.pi.dot(moments.beta) - tau_sq * moments.sigma_y_sq);
  r.wy_term = 4.0 / (nn * (nn - 1.0)) * moments.wy.squaredNorm();
  r.value = r.var_sigma_y_term + r.var_tau_term + r.cov_cross_term + r.wy_term;
  return r;
}

EstimateBundle estimate_naive(const LabeledSample& sample) {
  const WMatrix w = build_w(sample);
  EstimateBundle b;
  b.beta_sq = beta_sq_hat(w);
  b.tau_sq_hat = tau_sq_naive(w);
  b.sigma_y_sq_hat = sigma_y_sq_hat(sample.y);
  b.sigma_sq_hat = sigma_sq_hat(b.sigma_y_sq_hat, b.tau_sq_hat);
  b.method = "naive";
  return b;
}

}  // namespace signal_lab
