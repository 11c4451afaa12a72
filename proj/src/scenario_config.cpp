#include <cmath>
#include <numbers>

#include "cohsim/scenario.hpp"

namespace cohsim {
namespace {

using namespace json_field;

struct ScenarioName {
  ScenarioKind kind;
  std::string_view name;
};

constexpr ScenarioName kScenarios[] = {
    {ScenarioKind::MagyarMandel, "magyar_mandel"},
    {ScenarioKind::WolfFiltered, "wolf_filtered"},
    {ScenarioKind::ChiSweep, "chi_sweep"},
    {ScenarioKind::ErgodicityDemo, "ergodicity_demo"},
};

const Json& block(const Json& doc, const char* key) {
  if (!has(doc, key)) throw ConfigError(key, "block is required for this scenario");
  return object(doc.at(key), key);
}

SweepSpec parse_sweep(const Json& doc, std::initializer_list<std::string_view> parameters, bool required) {
  if (!has(doc, "sweep")) {
    if (required) throw ConfigError("sweep", "block is required for this scenario");
    return {};
  }
  const Json& j = object(doc.at("sweep"), "sweep");
  only_keys(j, {"parameter", "start", "stop", "steps"}, "sweep");
  SweepSpec s;
  s.parameter = string(j, "parameter", "sweep");
  bool known = false;
  std::string list;
  for (auto p : parameters) {
    known = known || p == s.parameter;
    list += (list.empty() ? "" : ", ") + std::string(p);
  }
  if (!known) throw ConfigError("sweep.parameter", "expected one of: " + list);
  s.start = number(j, "start", "sweep");
  s.stop = number(j, "stop", "sweep", s.start);
  s.steps = unsigned_integer(j, "steps", "sweep");
  if (s.steps == 0) throw ConfigError("sweep.steps", "sweep is empty; need steps >= 1");
  if (s.steps == 1 && s.stop != s.start) throw ConfigError("sweep.steps", "a range with start != stop needs steps >= 2");
  if (s.stop < s.start) throw ConfigError("sweep.stop", "must be >= sweep.start");
  return s;
}

ScanSettings parse_scan(const Json& doc, VisibilityMethod default_method) {
  ScanSettings s;
  s.method = default_method;
  if (!has(doc, "scan")) return s;
  const Json& j = object(doc.at("scan"), "scan");
  only_keys(j, {"periods", "points_per_period", "method"}, "scan");
  const auto periods = unsigned_integer(j, "periods", "scan", 4);
  const auto ppp = unsigned_integer(j, "points_per_period", "scan", 128);
  if (periods < 2 || periods > 1000) throw ConfigError("scan.periods", "must lie in [2, 1000]");
  if (ppp < 16 || ppp > 100000) throw ConfigError("scan.points_per_period", "must lie in [16, 100000]");
  s.periods = static_cast<int>(periods);
  s.points_per_period = static_cast<int>(ppp);
  if (has(j, "method")) s.method = visibility_method_from_string(string(j, "method", "scan"), "scan.method");
  return s;
}

void parse_two_arms(const Json& doc, ScenarioConfig& cfg, bool arm2_optional, ArmCorrelation default_correlation) {
  const Json& s = block(doc, "sources");
  only_keys(s, {"arm1", "arm2", "correlation"}, "sources");
  if (!has(s, "arm1")) throw ConfigError("sources.arm1", "is required");
  cfg.arm1 = source_model_from_json(s.at("arm1"), "sources.arm1");
  if (has(s, "arm2")) {
    cfg.arm2 = source_model_from_json(s.at("arm2"), "sources.arm2");
  } else if (arm2_optional) {
    cfg.arm2 = cfg.arm1;
  } else {
    throw ConfigError("sources.arm2", "is required");
  }
  cfg.correlation = default_correlation;
  if (has(s, "correlation")) {
    cfg.correlation = arm_correlation_from_string(string(s, "correlation", "sources"), "sources.correlation");
  }
}

void parse_grid_and_carrier(const Json& doc, ScenarioConfig& cfg) {
  cfg.grid = time_grid_from_json(block(doc, "grid"), "grid");
  cfg.carrier_omega0 = number(doc, "carrier_omega0", "", 100.0);
  if (!(cfg.carrier_omega0 > 0.0)) throw ConfigError("carrier_omega0", "must be > 0");
}

void parse_ensemble(const Json& doc, ScenarioConfig& cfg) {
  const Json& e = block(doc, "ensemble");
  if (has(e, "master_seed")) throw ConfigError("ensemble.master_seed", "set the seed with the top-level master_seed");
  cfg.ensemble = ensemble_from_json(e, "ensemble");
  cfg.ensemble.master_seed = cfg.master_seed;
}

/// Detector window widened by the largest |tau|/2 of the scan.
void check_scan_reach(const ScenarioConfig& cfg, double fringe_omega) {
  const double period = 2.0 * std::numbers::pi / std::abs(fringe_omega);
  const double reach = 0.25 * cfg.scan.periods * period;
  const double lo = cfg.detector.t_start - reach;
  const double hi = cfg.detector.t_end() + reach;
  if (!cfg.grid.contains(lo, hi)) {
    throw ConfigError("detector", "window plus scan reach [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                      "] exceeds the grid [" + std::to_string(cfg.grid.t_start) + ", " +
                                      std::to_string(cfg.grid.t_end()) + "]");
  }
  try {
    cfg.detector.validate_on(cfg.grid);
  } catch (const RangeError& e) {
    throw ConfigError("detector", e.what());
  }
}

void check_window(const TimeGrid& grid, double a, double b, const std::string& path) {
  try {
    window_span(grid, a, b);
  } catch (const RangeError& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_magyar_mandel(const Json& doc, ScenarioConfig& cfg) {
  only_keys(doc, {"scenario", "master_seed", "output_dir", "grid", "carrier_omega0", "sources", "detector", "ensemble",
                  "scan", "sweep"},
            "");
  parse_grid_and_carrier(doc, cfg);
  parse_two_arms(doc, cfg, false, ArmCorrelation::Independent);
  for (const auto* m : {&*cfg.arm1, &*cfg.arm2}) {
    if (m->kind() != SourceKind::RandomPhaseCW) {
      throw ConfigError(m == &*cfg.arm1 ? "sources.arm1.kind" : "sources.arm2.kind", "must be RandomPhaseCW");
    }
  }
  cfg.detector = detector_from_json(block(doc, "detector"), "detector");
  parse_ensemble(doc, cfg);
  cfg.scan = parse_scan(doc, VisibilityMethod::Extrema);
  if (has(doc, "sweep")) cfg.sweep = parse_sweep(doc, {"delta_omega"}, false);

  Interferometer setup{*cfg.arm1, *cfg.arm2, cfg.grid, cfg.carrier_omega0, cfg.correlation, {}, {}};
  check_scan_reach(cfg, setup.fringe_omega());
  if (cfg.sweep) check_scan_reach(cfg, cfg.carrier_omega0);
}

void parse_wolf(const Json& doc, ScenarioConfig& cfg) {
  only_keys(doc, {"scenario", "master_seed", "output_dir", "grid", "carrier_omega0", "sources", "detector", "ensemble",
                  "filter", "scan", "sweep"},
            "");
  parse_grid_and_carrier(doc, cfg);
  parse_two_arms(doc, cfg, true, ArmCorrelation::Common);
  if (!cfg.arm1->stationary_ergodic()) {
    throw ConfigError("sources.arm1.kind", "the factorized visibility needs a stationary ergodic source");
  }
  if (!cfg.arm2->stationary_ergodic()) {
    throw ConfigError("sources.arm2.kind", "the factorized visibility needs a stationary ergodic source");
  }
  cfg.detector = detector_from_json(block(doc, "detector"), "detector");
  parse_ensemble(doc, cfg);
  if (cfg.ensemble.n_realizations < 10) throw ConfigError("ensemble.n_realizations", "must be >= 10");
  Json fj = block(doc, "filter");
  if (!has(fj, "center_omega_f")) fj["center_omega_f"] = cfg.carrier_omega0;
  cfg.filter = filter_from_json(fj, "filter");
  cfg.scan = parse_scan(doc, VisibilityMethod::SinusoidFit);
  cfg.sweep = parse_sweep(doc, {"delta_omega"}, true);

  check_scan_reach(cfg, cfg.filter->center_omega_f);
  for (double d : {cfg.sweep->start, cfg.sweep->stop}) {
    for (double side : {0.5, -0.5}) {
      FilterSpec f = *cfg.filter;
      f.center_omega_f += side * d;
      try {
        check_filter_band(cfg.grid, cfg.carrier_omega0, f);
      } catch (const RangeError& e) {
        throw ConfigError("filter", e.what());
      }
    }
  }
}

void parse_chi(const Json& doc, ScenarioConfig& cfg) {
  only_keys(doc, {"scenario", "master_seed", "output_dir", "filter", "chi", "sweep"}, "");
  Json fj = block(doc, "filter");
  if (!has(fj, "center_omega_f")) fj["center_omega_f"] = 0.0;
  cfg.filter = filter_from_json(fj, "filter");
  cfg.sweep = parse_sweep(doc, {"delta_omega"}, true);
  const Json& c = block(doc, "chi");
  only_keys(c, {"T_values", "t_start", "full_support"}, "chi");
  if (has(c, "T_values")) {
    const Json& tv = c.at("T_values");
    if (!tv.is_array()) throw ConfigError("chi.T_values", "expected an array of numbers");
    for (std::size_t i = 0; i < tv.size(); ++i) {
      const std::string p = "chi.T_values[" + std::to_string(i) + "]";
      if (!tv[i].is_number()) throw ConfigError(p, "expected a number");
      const double T = tv[i].get<double>();
      if (!std::isfinite(T) || !(T > 0.0)) throw ConfigError(p, "must be > 0");
      cfg.chi_T_values.push_back(T);
    }
  }
  if (has(c, "t_start")) cfg.chi_t_start = number(c, "t_start", "chi");
  if (has(c, "full_support")) {
    if (!c.at("full_support").is_boolean()) throw ConfigError("chi.full_support", "expected a boolean");
    cfg.chi_full_support = c.at("full_support").get<bool>();
  }
  if (cfg.chi_full_support && cfg.filter->shape != FilterShape::Gaussian) {
    throw ConfigError("chi.full_support", "a finite full-support window needs a Gaussian filter");
  }
  if (cfg.chi_T_values.empty() && !cfg.chi_full_support) {
    throw ConfigError("chi.T_values", "is empty and full_support is off; no windows to evaluate");
  }
}

void parse_ergodicity(const Json& doc, ScenarioConfig& cfg) {
  only_keys(doc, {"scenario", "master_seed", "output_dir", "grid", "carrier_omega0", "sources", "detector", "ensemble",
                  "sweep", "ergodicity"},
            "");
  parse_grid_and_carrier(doc, cfg);
  const Json& s = block(doc, "sources");
  only_keys(s, {"stationary", "nonstationary"}, "sources");
  if (!has(s, "stationary")) throw ConfigError("sources.stationary", "is required");
  if (!has(s, "nonstationary")) throw ConfigError("sources.nonstationary", "is required");
  cfg.stationary = source_model_from_json(s.at("stationary"), "sources.stationary");
  cfg.nonstationary = source_model_from_json(s.at("nonstationary"), "sources.nonstationary");
  if (!cfg.stationary->stationary_ergodic()) throw ConfigError("sources.stationary.kind", "must be stationary");
  if (cfg.nonstationary->stationary_ergodic()) {
    throw ConfigError("sources.nonstationary.kind", "must be BlockadeNonStationary");
  }
  cfg.detector = detector_from_json(block(doc, "detector"), "detector");
  parse_ensemble(doc, cfg);
  if (cfg.ensemble.n_realizations < 2) throw ConfigError("ensemble.n_realizations", "must be >= 2 for error bars");
  cfg.sweep = parse_sweep(doc, {"window_start"}, true);
  cfg.instant = cfg.detector.t_start;
  if (has(doc, "ergodicity")) {
    const Json& e = object(doc.at("ergodicity"), "ergodicity");
    only_keys(e, {"instant"}, "ergodicity");
    cfg.instant = number(e, "instant", "ergodicity", cfg.instant);
  }
  if (!cfg.grid.contains(cfg.instant, cfg.instant)) throw ConfigError("ergodicity.instant", "lies outside the grid");
  const RealVector starts = cfg.sweep->values();
  for (Eigen::Index i = 0; i < starts.size(); ++i) {
    check_window(cfg.grid, starts[i], starts[i] + cfg.detector.T, "sweep");
  }
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  for (const auto& s : kScenarios) {
    if (s.kind == k) return s.name;
  }
  return "unknown";
}

RealVector SweepSpec::values() const {
  RealVector v(static_cast<Eigen::Index>(steps));
  for (std::size_t i = 0; i < steps; ++i) {
    v[static_cast<Eigen::Index>(i)] =
        steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return v;
}

ScenarioConfig parse_scenario(const Json& doc) {
  object(doc, "");
  ScenarioConfig cfg;
  const std::string name = string(doc, "scenario", "");
  bool found = false;
  for (const auto& s : kScenarios) {
    if (s.name == name) {
      cfg.scenario = s.kind;
      found = true;
    }
  }
  if (!found) {
    throw ConfigError("scenario", "unknown scenario '" + name +
                                      "'; expected magyar_mandel, wolf_filtered, chi_sweep or ergodicity_demo");
  }
  cfg.master_seed = unsigned_integer(doc, "master_seed", "", 0);
  cfg.output_dir = string(doc, "output_dir", "", "out");

  switch (cfg.scenario) {
    case ScenarioKind::MagyarMandel: parse_magyar_mandel(doc, cfg); break;
    case ScenarioKind::WolfFiltered: parse_wolf(doc, cfg); break;
    case ScenarioKind::ChiSweep: parse_chi(doc, cfg); break;
    case ScenarioKind::ErgodicityDemo: parse_ergodicity(doc, cfg); break;
  }
  cfg.document = doc;
  cfg.document["master_seed"] = cfg.master_seed;
  return cfg;
}

void set_master_seed(ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.master_seed = seed;
  cfg.ensemble.master_seed = seed;
  cfg.document["master_seed"] = seed;
}

}  // namespace cohsim
