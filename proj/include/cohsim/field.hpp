#pragma once

#include <string>

#include "cohsim/seeding.hpp"
#include "cohsim/source_model.hpp"
#include "cohsim/time_grid.hpp"

namespace cohsim {

/// One sampled analytic signal u(P, t) = z(P, t) exp(-i omega0 t).
///
/// Only the slowly varying envelope z is stored; the carrier is applied on
/// evaluation. Immutable once constructed.
class FieldRealization {
 public:
  FieldRealization(TimeGrid grid, double carrier_omega0, ComplexVector envelope, std::string point_label = "P");

  const TimeGrid& grid() const noexcept { return grid_; }
  double carrier_omega0() const noexcept { return carrier_; }
  const ComplexVector& envelope() const noexcept { return envelope_; }
  const std::string& point_label() const noexcept { return label_; }

 private:
  TimeGrid grid_;
  double carrier_;
  ComplexVector envelope_;
  std::string label_;
};

/// Draw one realization of `model` on `grid`. Deterministic in `seed`.
FieldRealization sample_realization(const SourceModel& model, const TimeGrid& grid, double carrier_omega0,
                                    const std::string& point_label, const SeedSpec& seed);

/// u(t_k) = z(t_k) exp(-i omega0 t_k).
Complex evaluate_field(const FieldRealization& r, std::size_t k);

/// The analytic signal at every sample.
ComplexVector analytic_signal(const FieldRealization& r);

/// Same analytic signal written against another carrier:
/// z'(t) = z(t) exp(-i (omega_old - omega_new) t).
FieldRealization with_carrier(const FieldRealization& r, double new_carrier);

/// Band of envelope offsets whose spectral power lies within 40 dB of the peak.
struct OccupiedBand {
  double low = 0.0;     ///< lowest bin above threshold (rad / time)
  double high = 0.0;    ///< highest bin above threshold
  double width = 0.0;   ///< high - low + one bin
  double center = 0.0;  ///< (low + high) / 2
  double bin = 0.0;     ///< spectral resolution 2 pi / (n dt)
};

/// Requires n >= 8 and a non-zero envelope (UndefinedBandwidthError otherwise).
OccupiedBand occupied_band(const FieldRealization& r, double threshold_db = -40.0);

/// Two-sided occupied width at -40 dB, see occupied_band().
double estimate_bandwidth(const FieldRealization& r);

/// Envelope bandwidth below the carrier. A false result is a modelling
/// warning rather than an error.
bool is_quasi_monochromatic(const FieldRealization& r);

}  // namespace cohsim
