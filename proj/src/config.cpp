#include "signal_lab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace signal_lab {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown config key '" +
                        (path.empty() ? key : path + "." + key) + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + (path.empty() ? key : path + "." + key) +
                      "': " + e.what());
  }
}

Marginal parse_marginal(const std::string& name) {
  if (name == "centered_exponential") return Marginal::CenteredExponential;
  if (name == "standard_normal") return Marginal::StandardNormal;
  throw ConfigError("unknown covariate marginal '" + name +
                    "' (available: centered_exponential, standard_normal)");
}

}  // namespace

Scenario RunConfig::scenario_for(double eta, double tau_sq) const {
  Scenario s;
  s.n = n;
  s.p = p;
  s.k = k;
  s.eta = eta;
  s.tau_sq = tau_sq;
  s.reps = reps;
  s.base_seed = base_seed;
  s.covariates = covariates;
  s.noise_sd = noise_sd;
  return s;
}

SuiteOptions RunConfig::suite_options() const {
  SuiteOptions o;
  o.selector = selector;
  o.bootstrap_m = bootstrap_m;
  o.bootstrap_plugin = bootstrap_plugin;
  return o;
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root, "",
             {"mode", "grid", "n", "p", "k", "reps", "estimators", "selector",
              "bootstrap", "out", "seed", "moment_oracle_n", "covariates",
              "noise_sd"});

  RunConfig cfg;
  const std::string mode = get_or<std::string>(root, "mode", "", "simulate");
  if (mode == "simulate") {
    cfg.mode = RunConfig::Mode::Simulate;
  } else if (mode == "estimate") {
    cfg.mode = RunConfig::Mode::Estimate;
  } else if (mode == "verify") {
    cfg.mode = RunConfig::Mode::Verify;
  } else {
    throw ConfigError("unknown mode '" + mode +
                      "' (available: estimate, simulate, verify)");
  }

  if (root.contains("grid")) {
    const json& grid = root.at("grid");
    if (!grid.is_object()) throw ConfigError("config key 'grid' must be an object");
    check_keys(grid, "grid", {"eta", "tau_sq"});
    cfg.eta_grid = get_or<std::vector<double>>(grid, "eta", "grid", {});
    cfg.tau_sq_grid = get_or<std::vector<double>>(grid, "tau_sq", "grid", {});
  }
  cfg.n = get_or<Index>(root, "n", "", cfg.n);
  cfg.p = get_or<Index>(root, "p", "", cfg.p);
  cfg.k = get_or<Index>(root, "k", "", cfg.k);
  cfg.reps = get_or<Index>(root, "reps", "", cfg.reps);
  cfg.estimators =
      get_or<std::vector<std::string>>(root, "estimators", "", cfg.estimators);
  cfg.selector = get_or<std::string>(root, "selector", "", cfg.selector);
  if (root.contains("bootstrap")) {
    const json& boot = root.at("bootstrap");
    if (!boot.is_object()) throw ConfigError("config key 'bootstrap' must be an object");
    check_keys(boot, "bootstrap", {"m", "plugin"});
    cfg.bootstrap_m = get_or<Index>(boot, "m", "bootstrap", cfg.bootstrap_m);
    cfg.bootstrap_plugin =
        get_or<std::string>(boot, "plugin", "bootstrap", cfg.bootstrap_plugin);
  }
  cfg.out = get_or<std::string>(root, "out", "", cfg.out);
  cfg.base_seed = get_or<std::uint64_t>(root, "seed", "", cfg.base_seed);
  cfg.moment_oracle_n =
      get_or<Index>(root, "moment_oracle_n", "", cfg.moment_oracle_n);
  cfg.covariates = parse_marginal(get_or<std::string>(
      root, "covariates", "", "centered_exponential"));
  cfg.noise_sd = get_or<double>(root, "noise_sd", "", cfg.noise_sd);

  // Registry validation up front: bad names should fail at parse time, not
  // replicate 37.
  const auto known = suite_estimator_names();
  for (const auto& name : cfg.estimators) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError("config key 'estimators': unknown estimator '" + name +
                        "' (available: " + list + ")");
    }
  }
  if (cfg.selector != "theta" && cfg.selector != "gap" && cfg.selector != "all") {
    throw ConfigError("config key 'selector': unknown selector '" + cfg.selector +
                      "' (available: theta, gap, all)");
  }
  const auto plugins = plugin_names();
  if (std::find(plugins.begin(), plugins.end(), cfg.bootstrap_plugin) ==
      plugins.end()) {
    std::string list;
    for (const auto& k : plugins) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("config key 'bootstrap.plugin': unknown plug-in '" +
                      cfg.bootstrap_plugin + "' (available: " + list + ")");
  }
  if (cfg.bootstrap_m < 2) {
    throw ConfigError("config key 'bootstrap.m': need at least 2 replicates");
  }
  if (cfg.mode == RunConfig::Mode::Simulate) {
    if (cfg.eta_grid.empty() || cfg.tau_sq_grid.empty()) {
      throw ConfigError("simulate mode needs a non-empty grid.eta and grid.tau_sq");
    }
    if (cfg.estimators.empty()) {
      throw ConfigError("simulate mode needs a non-empty estimator suite");
    }
    for (const double eta : cfg.eta_grid) {
      for (const double tau : cfg.tau_sq_grid) {
        cfg.scenario_for(eta, tau).validate();
      }
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace signal_lab
