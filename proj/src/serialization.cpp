#include "cohsim/serialization.hpp"

#include <charconv>
#include <cstdint>
#include <cmath>
#include <limits>
#include <sstream>

namespace cohsim {

namespace json_field {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

bool has(const Json& j, const char* key) { return j.is_object() && j.contains(key) && !j.at(key).is_null(); }

double number(const Json& j, const char* key, const std::string& path, std::optional<double> fallback) {
  if (!has(j, key)) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "is required");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

std::uint64_t unsigned_integer(const Json& j, const char* key, const std::string& path,
                               std::optional<std::uint64_t> fallback) {
  if (!has(j, key)) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "is required");
  }
  const Json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(join(path, key), "must be >= 0");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(join(path, key), "expected a non-negative integer");
}

std::string string(const Json& j, const char* key, const std::string& path, std::optional<std::string> fallback) {
  if (!has(j, key)) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "is required");
  }
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

void only_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
  object(j, path);
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == item.key();
    if (!known) throw ConfigError(join(path, item.key()), "unknown field");
  }
}

}  // namespace json_field

using namespace json_field;

std::string format_number(double x) {
  if (std::isnan(x)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

TimeGrid time_grid_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"t_start", "dt", "n"}, path);
  TimeGrid g;
  g.t_start = number(j, "t_start", path, 0.0);
  g.dt = number(j, "dt", path);
  g.n = unsigned_integer(j, "n", path);
  if (!(g.dt > 0.0)) throw ConfigError(join(path, "dt"), "must be > 0");
  if (g.n < 2) throw ConfigError(join(path, "n"), "must be >= 2");
  return g;
}

SourceModel source_model_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"kind", "params"}, path);
  const std::string kind_name = string(j, "kind", path);
  SourceKind kind;
  try {
    kind = source_kind_from_string(kind_name);
  } catch (const ConfigError& e) {
    throw e.under(path);
  }
  const std::string pp = join(path, "params");
  static const Json kEmpty = Json::object();
  const Json& p = has(j, "params") ? object(j.at("params"), pp) : kEmpty;

  SourceModel m;
  switch (kind) {
    case SourceKind::GaussianPulseRandomAmplitude: {
      only_keys(p, {"tau_p", "mean_A", "sigma_A", "timing_jitter"}, pp);
      GaussianPulseRandomAmplitude g;
      g.tau_p = number(p, "tau_p", pp, g.tau_p);
      g.mean_A = number(p, "mean_A", pp, g.mean_A);
      g.sigma_A = number(p, "sigma_A", pp, g.sigma_A);
      g.timing_jitter = number(p, "timing_jitter", pp, g.timing_jitter);
      m = g;
      break;
    }
    case SourceKind::RandomPhaseCW: {
      only_keys(p, {"A0", "detuning", "fixed_phase"}, pp);
      RandomPhaseCW c;
      c.A0 = number(p, "A0", pp, c.A0);
      c.detuning = number(p, "detuning", pp, c.detuning);
      if (has(p, "fixed_phase")) c.fixed_phase = number(p, "fixed_phase", pp);
      m = c;
      break;
    }
    case SourceKind::PhaseDiffusionCW: {
      only_keys(p, {"A0", "D"}, pp);
      PhaseDiffusionCW c;
      c.A0 = number(p, "A0", pp, c.A0);
      c.D = number(p, "D", pp, c.D);
      m = c;
      break;
    }
    case SourceKind::BlockadeNonStationary: {
      only_keys(p, {"A0", "sigma_A", "tau_b"}, pp);
      BlockadeNonStationary b;
      b.A0 = number(p, "A0", pp, b.A0);
      b.sigma_A = number(p, "sigma_A", pp, b.sigma_A);
      b.tau_b = number(p, "tau_b", pp, b.tau_b);
      m = b;
      break;
    }
  }
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw e.under(path);
  }
  return m;
}

DetectorConfig detector_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"alpha", "t_start", "T"}, path);
  DetectorConfig d;
  d.alpha = number(j, "alpha", path, 1.0);
  d.t_start = number(j, "t_start", path, 0.0);
  d.T = number(j, "T", path);
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw e.under(path);
  }
  return d;
}

FilterSpec filter_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"shape", "center_omega_f", "bandwidth_delta"}, path);
  FilterSpec f;
  const std::string shape = string(j, "shape", path, "Gaussian");
  if (shape == "Gaussian") {
    f.shape = FilterShape::Gaussian;
  } else if (shape == "Rectangular") {
    f.shape = FilterShape::Rectangular;
  } else {
    throw ConfigError(join(path, "shape"), "expected Gaussian or Rectangular");
  }
  f.center_omega_f = number(j, "center_omega_f", path, 0.0);
  f.bandwidth_delta = number(j, "bandwidth_delta", path);
  try {
    f.validate();
  } catch (const ConfigError& e) {
    throw e.under(path);
  }
  return f;
}

EnsembleSpec ensemble_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"n_realizations", "master_seed"}, path);
  EnsembleSpec e;
  e.n_realizations = unsigned_integer(j, "n_realizations", path);
  e.master_seed = unsigned_integer(j, "master_seed", path, 0);
  if (e.n_realizations < 1) throw ConfigError(join(path, "n_realizations"), "must be >= 1");
  return e;
}

Json to_json(const TimeGrid& g) { return {{"t_start", g.t_start}, {"dt", g.dt}, {"n", g.n}}; }

Json to_json(const SourceModel& m) {
  Json p = Json::object();
  std::visit(
      [&p](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianPulseRandomAmplitude>) {
          p = {{"tau_p", v.tau_p}, {"mean_A", v.mean_A}, {"sigma_A", v.sigma_A}, {"timing_jitter", v.timing_jitter}};
        } else if constexpr (std::is_same_v<T, RandomPhaseCW>) {
          p = {{"A0", v.A0}, {"detuning", v.detuning}};
          if (v.fixed_phase) p["fixed_phase"] = *v.fixed_phase;
        } else if constexpr (std::is_same_v<T, PhaseDiffusionCW>) {
          p = {{"A0", v.A0}, {"D", v.D}};
        } else {
          p = {{"A0", v.A0}, {"sigma_A", v.sigma_A}, {"tau_b", v.tau_b}};
        }
      },
      m.params());
  return {{"kind", std::string(to_string(m.kind()))}, {"params", p}};
}

Json to_json(const DetectorConfig& d) { return {{"alpha", d.alpha}, {"t_start", d.t_start}, {"T", d.T}}; }

Json to_json(const FilterSpec& f) {
  return {{"shape", std::string(to_string(f.shape))},
          {"center_omega_f", f.center_omega_f},
          {"bandwidth_delta", f.bandwidth_delta}};
}

Json to_json(const VisibilityResult& v) {
  Json j = {{"value", v.value},
            {"raw_value", v.raw_value},
            {"method", std::string(to_string(v.method))},
            {"i_max", v.i_max},
            {"i_min", v.i_min}};
  if (v.fit_residual) j["fit_residual"] = *v.fit_residual;
  if (v.std_error) j["std_error"] = *v.std_error;
  return j;
}

Json to_json(const SpectralCoherenceResult& mu) {
  return {{"mu_re", mu.mu.real()},
          {"mu_im", mu.mu.imag()},
          {"mu_abs", std::abs(mu.mu)},
          {"std_error", mu.std_error},
          {"n_realizations", mu.n_realizations},
          {"requested_offset", mu.requested_offset},
          {"requested_delta", mu.requested_delta},
          {"snapped_offset", mu.snapped_offset},
          {"snapped_delta", mu.snapped_delta}};
}

std::string_view to_string(ArmCorrelation c) { return c == ArmCorrelation::Common ? "common" : "independent"; }

ArmCorrelation arm_correlation_from_string(std::string_view s, const std::string& path) {
  if (s == "common") return ArmCorrelation::Common;
  if (s == "independent") return ArmCorrelation::Independent;
  throw ConfigError(path, "expected common or independent");
}

std::string_view to_string(ScanMode m) { return m == ScanMode::SingleShot ? "single_shot" : "ensemble"; }

std::string_view to_string(VisibilityMethod m) {
  return m == VisibilityMethod::Extrema ? "extrema" : "sinusoid_fit";
}

VisibilityMethod visibility_method_from_string(std::string_view s, const std::string& path) {
  if (s == "extrema") return VisibilityMethod::Extrema;
  if (s == "sinusoid_fit") return VisibilityMethod::SinusoidFit;
  throw ConfigError(path, "expected extrema or sinusoid_fit");
}

std::string_view to_string(FilterShape s) { return s == FilterShape::Gaussian ? "Gaussian" : "Rectangular"; }

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable spectrum_csv(const EnvelopeSpectrum& s) {
  CsvTable t{{"omega", "re", "im"}, {}};
  for (Eigen::Index k = 0; k < s.omegas.size(); ++k) t.add({s.omegas[k], s.values[k].real(), s.values[k].imag()});
  return t;
}

CsvTable fringe_csv(const FringeScan& scan) {
  CsvTable t{{"tau", "intensity", "std_error"}, {}};
  const bool ensemble = scan.mode == ScanMode::Ensemble;
  for (Eigen::Index k = 0; k < scan.taus.size(); ++k) {
    t.add({scan.taus[k], scan.intensities[k],
           ensemble ? scan.std_errors[k] : std::numeric_limits<double>::quiet_NaN()});
  }
  return t;
}

Json fringe_sidecar(const FringeScan& scan, const std::optional<VisibilityResult>& v) {
  const auto& m = scan.metadata;
  Json models = {{"arm1", to_json(m.setup.arm1)}, {"arm2", to_json(m.setup.arm2)}};
  Json j = {{"mode", std::string(to_string(scan.mode))},
            {"fringe_omega", scan.fringe_omega},
            {"n_taus", scan.taus.size()},
            {"master_seed", m.seed.master_seed},
            {"realization_index", m.seed.realization_index},
            {"n_realizations", m.n_realizations},
            {"correlation", std::string(to_string(m.setup.correlation))},
            {"carrier_omega0", m.setup.carrier_omega0},
            {"grid", to_json(m.setup.grid)},
            {"detector", to_json(m.detector)},
            {"models", models}};
  if (m.setup.filter1 || m.setup.filter2) {
    j["filters"] = {{"arm1", m.setup.filter1 ? to_json(*m.setup.filter1) : Json()},
                    {"arm2", m.setup.filter2 ? to_json(*m.setup.filter2) : Json()}};
  }
  if (v) j["visibility"] = to_json(*v);
  return j;
}

}  // namespace cohsim
