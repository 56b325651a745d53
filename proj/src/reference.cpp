#include "signal_lab/reference.hpp"

namespace signal_lab::reference {

Vector beta_sq_pairwise(const Matrix& w) {
  const Index n = w.rows();
  const Index p = w.cols();
  Vector out = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    double s = 0.0;
    for (Index i1 = 0; i1 < n; ++i1) {
      for (Index i2 = i1 + 1; i2 < n; ++i2) s += w(i1, j) * w(i2, j);
    }
    out[j] = s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  }
  return out;
}

double tau_sq_pairwise(const Matrix& w) {
  const Index n = w.rows();
  double s = 0.0;
  for (Index i1 = 0; i1 < n; ++i1) {
    for (Index i2 = i1 + 1; i2 < n; ++i2) s += w.row(i1).dot(w.row(i2));
  }
  return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double c_hat_numerator_pairwise(const Matrix& w, const Vector& g_values) {
  const Index n = w.rows();
  double s = 0.0;
  for (Index i1 = 0; i1 < n; ++i1) {
    for (Index i2 = 0; i2 < n; ++i2) {
      if (i1 == i2) continue;
      s += w.row(i1).dot(w.row(i2)) * g_values[i2];
    }
  }
  return s * 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double g_pair_enumeration(const Eigen::Ref<const Vector>& row,
                          const IndexSet& subset) {
  double s = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      s += row[subset[a]] * row[subset[b]];
    }
  }
  return s;
}

double sample_variance_two_pass(const Eigen::Ref<const Vector>& y) {
  const Index n = y.size();
  double mean = 0.0;
  for (Index i = 0; i < n; ++i) mean += y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (Index i = 0; i < n; ++i) ss += (y[i] - mean) * (y[i] - mean);
  return ss / static_cast<double>(n - 1);
}

}  // namespace signal_lab::reference
