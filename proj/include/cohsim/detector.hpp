#pragma once

#include "cohsim/averaging.hpp"
#include "cohsim/field.hpp"

namespace cohsim {

/// Square-law detector with efficiency alpha integrating over [t_start, t_start + T].
struct DetectorConfig {
  double alpha = 1.0;
  double t_start = 0.0;
  double T = 1.0;

  double t_end() const { return t_start + T; }
  void validate() const;
  /// validate() and check the window against a grid (RangeError).
  void validate_on(const TimeGrid& grid) const;
};

/// alpha * integral |u|^2 over the window for one realization. Unnormalized
/// (an energy): no 1/T.
double detect_single_shot(const FieldRealization& r, const DetectorConfig& d);

/// Ensemble mean of detect_single_shot over realizations of `model`.
EnsembleEstimate<double> detect_expected(const SourceModel& model, const TimeGrid& grid, double carrier_omega0,
                                         const DetectorConfig& d, const EnsembleSpec& spec, unsigned workers = 1);

}  // namespace cohsim
