#pragma once

#include <cstdint>

#include "cohsim/averaging.hpp"
#include "cohsim/field.hpp"

namespace cohsim {

/// Continuous-transform approximation of the envelope spectrum,
///   Z(nu) = integral z(t) exp(+i nu t) dt  ~  dt * sum_k z_k exp(+i nu t_k),
/// matching the exp(-i omega t) sign of the analytic signal: a component
/// exp(-i nu t) of the envelope sits at offset +nu from the carrier.
/// Inverse: z(t) = (1/2pi) integral Z(nu) exp(-i nu t) dnu.
struct EnvelopeSpectrum {
  RealVector omegas;     ///< ascending bin offsets from the carrier
  ComplexVector values;  ///< Z at each offset
  double d_omega = 0.0;  ///< bin spacing 2 pi / (n dt)
  TimeGrid grid;         ///< grid of the source envelope
  double carrier_omega0 = 0.0;
};

EnvelopeSpectrum envelope_spectrum(const FieldRealization& r);

/// Inverse of envelope_spectrum().
FieldRealization envelope_from_spectrum(const EnvelopeSpectrum& s, const std::string& point_label = "P");

/// Z at an arbitrary offset by direct summation (no bin snapping).
Complex spectrum_at(const FieldRealization& r, double offset);

/// Sum |z|^2 dt and sum |Z|^2 d_omega / 2pi; equal for any envelope.
struct ParsevalCheck {
  double time_energy = 0.0;
  double spectral_energy = 0.0;
  double relative_error() const;
};
ParsevalCheck parseval(const FieldRealization& r, const EnvelopeSpectrum& s);

enum class FilterShape { Gaussian, Rectangular };

/// Spectral filter F(omega - omega_f).
///
/// Gaussian: F(mu) = exp(-mu^2 / delta^2), delta the 1/e amplitude half-width.
/// Rectangular: F(mu) = 1 for |mu| <= delta / 2, delta the full width.
struct FilterSpec {
  FilterShape shape = FilterShape::Gaussian;
  double center_omega_f = 0.0;
  double bandwidth_delta = 1.0;

  void validate() const;
  double response(double mu) const;
  /// f(t) = (1/2pi) integral F(mu) exp(-i mu t) dmu (real for both shapes).
  double temporal(double t) const;
  double temporal_intensity(double t) const {
    const double f = temporal(t);
    return f * f;
  }
  /// Offset beyond which |F| < 1e-12.
  double support_halfwidth() const;
};

/// Multiply the spectrum by F and transform back; the result is carried at
/// omega_f. RangeError if the passband is clipped by the grid's band.
FieldRealization apply_filter_exact(const FieldRealization& r, const FilterSpec& f);

/// The passband check of apply_filter_exact() without any signal.
void check_filter_band(const TimeGrid& grid, double carrier_omega0, const FilterSpec& f);

/// u_f(t) = Z(omega_f - omega0) f(t) exp(-i omega_f t). Requires
/// delta <= 0.1 * estimate_bandwidth(r), else NarrowbandInvalidError.
FieldRealization apply_filter_narrowband(const FieldRealization& r, const FilterSpec& f);

struct CoherenceSetup {
  TimeGrid grid;
  double carrier_omega0 = 100.0;
  ArmCorrelation correlation = ArmCorrelation::Independent;
  unsigned workers = 1;
};

/// Monte Carlo estimate of
///   mu = <Z2*(a) Z1(a + delta)> / sqrt(<|Z1(a + delta)|^2> <|Z2(a)|^2>),
/// with both offsets snapped to the nearest DFT bin.
struct SpectralCoherenceResult {
  Complex mu{};
  double std_error = 0.0;  ///< jackknife over realizations
  std::size_t n_realizations = 0;
  double requested_offset = 0.0;
  double requested_delta = 0.0;
  double snapped_offset = 0.0;  ///< bin used for Z2
  double snapped_delta = 0.0;   ///< Z1 sits at snapped_offset + snapped_delta
  Complex cross_density{};      ///< <Z2* Z1>
  double power1 = 0.0;          ///< <|Z1|^2>
  double power2 = 0.0;          ///< <|Z2|^2>
};

SpectralCoherenceResult spectral_coherence(const SourceModel& model1, const SourceModel& model2, double omega_offset,
                                           double delta_omega, const EnsembleSpec& spec,
                                           const CoherenceSetup& setup);

/// chi = integral |f|^2 exp(-i delta t) dt / integral |f|^2 dt over
/// [t_start, t_start + T], by trapezoid quadrature of the closed-form |f|^2.
Complex chi_factor(const FilterSpec& f, double t_start, double T, double delta_omega);

struct PredictedVisibility {
  double value = 0.0;  ///< clamped to [0, 1]
  double raw = 0.0;    ///< |mu| |chi|
};

PredictedVisibility predicted_visibility(Complex mu, Complex chi);
inline PredictedVisibility predicted_visibility(const SpectralCoherenceResult& mu, Complex chi) {
  return predicted_visibility(mu.mu, chi);
}

}  // namespace cohsim
