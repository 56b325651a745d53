#include "signal_lab/zeroest.hpp"

#include <utility>

namespace signal_lab {

ZeroStat zero_stat(const LabeledSample& sample, IndexSet subset, double var_g) {
  validate_index_set(subset, sample.p());
  if (subset.size() < 2) {
    throw DegenerateSubsetError("zero-estimator subset needs at least 2 indices");
  }
  if (!(var_g > 0.0)) throw MomentError("Var[g] must be positive");
  const Index n = sample.n();
  ZeroStat z;
  z.subset = std::move(subset);
  z.var_g = var_g;
  Vector u = Vector::Zero(n), v = Vector::Zero(n);
  for (const Index j : z.subset) {
    u += sample.x.col(j);
    v += sample.x.col(j).cwiseProduct(sample.x.col(j));
  }
  z.z_values = 0.5 * (u.array().square() - v.array());
  z.z_bar = z.z_values.mean();
  return z;
}

Coefficient c_hat(const WMatrix& w, const ZeroStat& zstat) {
  const Index n = w.n();
  if (n < 2) throw SampleSizeError("c_hat needs n >= 2");
  if (zstat.z_values.size() != n) {
    throw ShapeError("zero-statistic length does not match the sample");
  }
  // sum_{i1 != i2} W_i1'W_i2 g_i2 = S'(W'g) - g'(row squared norms)
  const Vector wg = w.w.transpose() * zstat.z_values;
  const Vector row_sq = w.w.array().square().matrix().rowwise().sum();
  const double numerator = w.column_sums.dot(wg) - zstat.z_values.dot(row_sq);
  const double scale =
      2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  return Coefficient{scale * numerator / zstat.var_g, CoefficientKind::UStat};
}

Coefficient c_oracle(const MomentSet& moments, const IndexSet& subset,
                     double var_g) {
  if (!(var_g > 0.0)) throw MomentError("Var[g] must be positive");
  const auto it = moments.theta.find(subset);
  if (it == moments.theta.end()) {
    throw MomentError("moment set has no theta entry for the requested subset");
  }
  if (it->second.size() != moments.beta.size()) {
    throw MomentError("theta entry does not match beta dimension");
  }
  return Coefficient{2.0 * moments.beta.dot(it->second) / var_g,
                     CoefficientKind::Oracle};
}

EstimateBundle algorithm1(const LabeledSample& sample, const Selector& selector,
                          const CovariateModel& model) {
  if (!model.whitened()) {
    throw WhiteningError("zero-estimator pipeline expects a whitened model");
  }
  if (sample.p() != model.p) {
    throw ShapeError("sample dimension does not match the covariate model");
  }
  const WMatrix w = build_w(sample);
  EstimateBundle b;
  b.beta_sq = beta_sq_hat(w);
  b.tau_sq_hat = tau_sq_naive(w);
  b.sigma_y_sq_hat = sigma_y_sq_hat(sample.y);
  b.sigma_sq_hat = sigma_sq_hat(b.sigma_y_sq_hat, b.tau_sq_hat);

  Selection sel = selector(sample, b.beta_sq);
  b.method = "zeroest:" + sel.method;
  ZeroExtras extras;
  extras.subset = sel.indices;
  if (sel.indices.size() < 2) {
    // Degenerate selection: report the naive estimate rather than aborting a
    // replicated study.
    extras.no_zero_estimator = true;
    extras.improved = b.tau_sq_hat;
    b.extras = std::move(extras);
    return b;
  }
  const VarG vg = var_g(model, sel.indices);
  const ZeroStat z = zero_stat(sample, sel.indices, vg.value);
  const Coefficient c = c_hat(w, z);
  extras.z_bar = z.z_bar;
  extras.var_g = vg.value;
  extras.coefficient = c.value;
  extras.coefficient_kind = c.kind;
  extras.improved = improve(b.tau_sq_hat, c, z);
  b.extras = std::move(extras);
  return b;
}

}  // namespace signal_lab
