#include "cohsim/source_model.hpp"

#include <cmath>
#include <numbers>

namespace cohsim {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string("params.") + name, "must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw ConfigError(std::string("params.") + name, "must be > 0");
}

void require_non_negative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) throw ConfigError(std::string("params.") + name, "must be >= 0");
}

double uniform_phase(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
}

double normal(std::mt19937_64& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::GaussianPulseRandomAmplitude: return "GaussianPulseRandomAmplitude";
    case SourceKind::RandomPhaseCW: return "RandomPhaseCW";
    case SourceKind::PhaseDiffusionCW: return "PhaseDiffusionCW";
    case SourceKind::BlockadeNonStationary: return "BlockadeNonStationary";
  }
  return "unknown";
}

SourceKind source_kind_from_string(std::string_view name) {
  for (auto k : {SourceKind::GaussianPulseRandomAmplitude, SourceKind::RandomPhaseCW, SourceKind::PhaseDiffusionCW,
                 SourceKind::BlockadeNonStationary}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("kind", "unknown source kind '" + std::string(name) + "'");
}

void SourceModel::validate() const {
  std::visit(overloaded{
                 [](const GaussianPulseRandomAmplitude& p) {
                   require_positive(p.tau_p, "tau_p");
                   require_finite(p.mean_A, "mean_A");
                   require_non_negative(p.sigma_A, "sigma_A");
                   require_non_negative(p.timing_jitter, "timing_jitter");
                 },
                 [](const RandomPhaseCW& p) {
                   require_non_negative(p.A0, "A0");
                   require_finite(p.detuning, "detuning");
                   if (p.fixed_phase) require_finite(*p.fixed_phase, "fixed_phase");
                 },
                 [](const PhaseDiffusionCW& p) {
                   require_non_negative(p.A0, "A0");
                   require_non_negative(p.D, "D");
                 },
                 [](const BlockadeNonStationary& p) {
                   require_non_negative(p.A0, "A0");
                   require_non_negative(p.sigma_A, "sigma_A");
                   require_positive(p.tau_b, "tau_b");
                 },
             },
             params_);
}

RealizationDraw SourceModel::draw(const SeedSpec& seed) const {
  auto rng = seed.engine();
  return std::visit(overloaded{
                        [&](const GaussianPulseRandomAmplitude& p) {
                          RealizationDraw d;
                          d.amplitude = normal(rng, p.mean_A, p.sigma_A);
                          d.arrival = normal(rng, 0.0, p.timing_jitter);
                          return d;
                        },
                        [&](const RandomPhaseCW& p) {
                          RealizationDraw d;
                          d.amplitude = p.A0;
                          d.phase = p.fixed_phase ? *p.fixed_phase : uniform_phase(rng);
                          return d;
                        },
                        [&](const PhaseDiffusionCW& p) {
                          RealizationDraw d;
                          d.amplitude = p.A0;
                          d.phase = uniform_phase(rng);
                          return d;
                        },
                        [&](const BlockadeNonStationary& p) {
                          RealizationDraw d;
                          d.amplitude = normal(rng, p.A0, p.sigma_A);
                          d.phase = uniform_phase(rng);
                          return d;
                        },
                    },
                    params_);
}

Complex SourceModel::envelope(const RealizationDraw& d, double t) const {
  return std::visit(overloaded{
                        [&](const GaussianPulseRandomAmplitude& p) {
                          const double s = (t - d.arrival) / p.tau_p;
                          return Complex(d.amplitude * std::exp(-s * s), 0.0);
                        },
                        [&](const RandomPhaseCW& p) { return std::polar(d.amplitude, d.phase - p.detuning * t); },
                        [&](const PhaseDiffusionCW&) -> Complex {
                          throw ConfigError("PhaseDiffusionCW has no closed-form envelope");
                        },
                        [&](const BlockadeNonStationary& p) {
                          return std::polar(1.0, d.phase) * (d.amplitude * std::exp(-t / p.tau_b));
                        },
                    },
                    params_);
}

double SourceModel::expected_decay_ratio(const TimeGrid& grid) const {
  if (const auto* b = std::get_if<BlockadeNonStationary>(&params_)) {
    return std::exp((grid.t_end() - grid.t_start) / b->tau_b);
  }
  return 1.0;
}

}  // namespace cohsim
