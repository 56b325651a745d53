#pragma once

#include <functional>
#include <string>

#include "signal_lab/types.hpp"

namespace signal_lab {

struct Selection {
  IndexSet indices;          // sorted original indices
  std::string method;
  Vector sorted_values;      // ascending input values, stable by index
  Index gap_position = 0;    // j*: first sorted position included
};

// Largest-gap thresholding of the per-covariate statistics (typically the
// estimated squared coefficients): sort ascending, find the largest
// consecutive gap, keep the original indices of everything above it.
// Ties in the gap argmax break toward the largest position, so the
// selected set is the smallest candidate. May return a single index;
// callers that need |S| >= 2 handle the fallback.
Selection gap_select(const Eigen::Ref<const Vector>& beta_sq);

Selection select_all(Index p);

// Fixed subset, validated against p; supports oracle experiments where the
// relevant covariates are known.
Selection select_fixed(IndexSet indices, Index p);

// Selection procedure as used by the estimation pipelines: sees the sample
// and its per-covariate squared-coefficient estimates.
using Selector =
    std::function<Selection(const LabeledSample&, const Vector& beta_sq)>;

Selector make_gap_selector();
Selector make_all_selector();
Selector make_fixed_selector(IndexSet indices);

}  // namespace signal_lab
