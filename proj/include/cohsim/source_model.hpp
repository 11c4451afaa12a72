#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "cohsim/seeding.hpp"
#include "cohsim/time_grid.hpp"

namespace cohsim {

/// z(t) = A exp(-(t - t0)^2 / tau_p^2) with A ~ Normal(mean_A, sigma_A).
/// `timing_jitter` is the standard deviation of the arrival time t0 (0: t0 = 0).
struct GaussianPulseRandomAmplitude {
  double tau_p = 1.0;
  double mean_A = 1.0;
  double sigma_A = 0.0;
  double timing_jitter = 0.0;
};

/// z(t) = A0 exp(i(phi - detuning*t)), phi ~ Uniform[0, 2pi) once per realization.
/// Setting `fixed_phase` pins phi and removes the randomness.
struct RandomPhaseCW {
  double A0 = 1.0;
  double detuning = 0.0;
  std::optional<double> fixed_phase;
};

/// z(t_k) = A0 exp(i phi_k), phi_0 uniform, phi_{k+1} = phi_k + sqrt(D dt) xi_k.
struct PhaseDiffusionCW {
  double A0 = 1.0;
  double D = 1.0;
};

/// z(t) = A exp(-t / tau_b) exp(i phi), A ~ Normal(A0, sigma_A), phi uniform.
/// The mean amplitude decays in absolute time, so the process is not stationary.
struct BlockadeNonStationary {
  double A0 = 1.0;
  double sigma_A = 0.0;
  double tau_b = 1.0;
};

enum class SourceKind { GaussianPulseRandomAmplitude, RandomPhaseCW, PhaseDiffusionCW, BlockadeNonStationary };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

/// Random variables drawn once per realization for the closed-form kinds.
struct RealizationDraw {
  double amplitude = 0.0;
  double phase = 0.0;
  double arrival = 0.0;
};

class SourceModel {
 public:
  using Params = std::variant<GaussianPulseRandomAmplitude, RandomPhaseCW, PhaseDiffusionCW, BlockadeNonStationary>;

  SourceModel() = default;
  template <typename P>
    requires std::is_constructible_v<Params, P>
  SourceModel(P p) : params_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

  const Params& params() const noexcept { return params_; }
  SourceKind kind() const noexcept { return static_cast<SourceKind>(params_.index()); }

  /// True for every kind except BlockadeNonStationary.
  bool stationary_ergodic() const noexcept { return kind() != SourceKind::BlockadeNonStationary; }

  /// Whether z(t) is a closed-form function of t given a RealizationDraw.
  /// PhaseDiffusionCW is a sampled random walk and has no closed form.
  bool has_closed_form() const noexcept { return kind() != SourceKind::PhaseDiffusionCW; }

  /// Throws ConfigError for non-finite or out-of-domain parameters.
  void validate() const;

  RealizationDraw draw(const SeedSpec& seed) const;

  /// Envelope of a closed-form kind at time t for the given draw.
  Complex envelope(const RealizationDraw& d, double t) const;

  /// Expected envelope magnitude ratio between the start and the end of `grid`
  /// (1 for stationary kinds).
  double expected_decay_ratio(const TimeGrid& grid) const;

 private:
  Params params_{RandomPhaseCW{}};
};

}  // namespace cohsim
