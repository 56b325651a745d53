#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signal_lab/covmodel.hpp"
#include "signal_lab/sim.hpp"
#include "signal_lab/types.hpp"

namespace signal_lab {

struct RunConfig {
  enum class Mode { Estimate, Simulate, Verify };

  Mode mode = Mode::Simulate;
  std::vector<double> eta_grid;
  std::vector<double> tau_sq_grid;
  Index n = 300;
  Index p = 300;
  Index k = 6;
  Index reps = 100;
  std::vector<std::string> estimators = {"naive", "tg", "th"};
  std::string selector = "theta";
  Index bootstrap_m = 100;
  std::string bootstrap_plugin = "naive";
  std::string out = "results.csv";
  std::uint64_t base_seed = 1;
  Index moment_oracle_n = 1'000'000;
  Marginal covariates = Marginal::CenteredExponential;
  double noise_sd = 1.0;

  Scenario scenario_for(double eta, double tau_sq) const;
  SuiteOptions suite_options() const;
};

// Strict JSON config: unknown keys are errors (reported with their path),
// estimator/selector/plugin names are validated against the registries,
// simulate mode requires a non-empty grid.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);  // for tests

}  // namespace signal_lab
