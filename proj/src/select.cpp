#include "signal_lab/select.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace signal_lab {

Selection gap_select(const Eigen::Ref<const Vector>& beta_sq) {
  const Index p = beta_sq.size();
  if (p < 2) throw SelectionError("gap selection needs at least 2 covariates");
  if (!beta_sq.allFinite()) throw SelectionError("non-finite selection statistic");

  // Stable ascending order: ties keep original index order, so the result
  // is reproducible across platforms.
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return beta_sq[a] < beta_sq[b]; });

  Selection sel;
  sel.method = "gap";
  sel.sorted_values.resize(p);
  for (Index k = 0; k < p; ++k) sel.sorted_values[k] = beta_sq[order[static_cast<std::size_t>(k)]];

  // Largest gap between consecutive order statistics; ties in the argmax go
  // to the largest position (the smallest selected set).
  Index j_star = 1;
  double best = sel.sorted_values[1] - sel.sorted_values[0];
  for (Index k = 2; k < p; ++k) {
    const double gap = sel.sorted_values[k] - sel.sorted_values[k - 1];
    if (gap >= best) {
      best = gap;
      j_star = k;
    }
  }
  sel.gap_position = j_star;
  sel.indices.assign(order.begin() + j_star, order.end());
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel;
}

Selection select_all(Index p) {
  if (p < 1) throw SelectionError("select_all needs p >= 1");
  Selection sel;
  sel.method = "all";
  sel.indices.resize(static_cast<std::size_t>(p));
  std::iota(sel.indices.begin(), sel.indices.end(), Index{0});
  return sel;
}

Selection select_fixed(IndexSet indices, Index p) {
  Selection sel;
  sel.method = "fixed";
  std::sort(indices.begin(), indices.end());
  try {
    validate_index_set(indices, p);
  } catch (const ShapeError& e) {
    throw SelectionError(e.what());
  }
  sel.indices = std::move(indices);
  return sel;
}

Selector make_gap_selector() {
  return [](const LabeledSample&, const Vector& beta_sq) {
    return gap_select(beta_sq);
  };
}

Selector make_all_selector() {
  return [](const LabeledSample& sample, const Vector&) {
    return select_all(sample.p());
  };
}

Selector make_fixed_selector(IndexSet indices) {
  return [indices = std::move(indices)](const LabeledSample& sample,
                                        const Vector&) {
    return select_fixed(indices, sample.p());
  };
}

}  // namespace signal_lab
