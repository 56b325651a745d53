#pragma once

#include <string>
#include <vector>

#include "signal_lab/sim.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

// Strict CSV reader: header `y,x1,...,xp`, one observation per row, finite
// decimal reals. Errors carry the offending 1-based file row.
LabeledSample ingest_csv(const std::string& path);

// Shortest round-trip formatting; re-ingesting reproduces the sample
// bit for bit.
void write_sample_csv(const LabeledSample& sample, const std::string& path);

// Whitening side files: a single CSV row of p means, and p rows of p
// covariance entries.
Vector read_vector_csv(const std::string& path);
Matrix read_matrix_csv(const std::string& path);

// Results table, header
//   eta,tau_sq,estimator,bias,se,rmse,pct_change,sigma_rmse_hat
// reals with 6 significant digits, rows in grid order then estimator order.
std::string render_results(const std::vector<TableRow>& rows);
void emit_results(const std::vector<TableRow>& rows, const std::string& path);

}  // namespace signal_lab
