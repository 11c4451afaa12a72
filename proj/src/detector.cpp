#include "cohsim/detector.hpp"

#include <cmath>

namespace cohsim {

void DetectorConfig::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha", "must lie in (0, 1]");
  if (!std::isfinite(t_start)) throw ConfigError("t_start", "must be finite");
  if (!std::isfinite(T) || !(T > 0.0)) throw ConfigError("T", "must be > 0");
}

void DetectorConfig::validate_on(const TimeGrid& grid) const {
  validate();
  window_span(grid, t_start, t_end());
}

double detect_single_shot(const FieldRealization& r, const DetectorConfig& d) {
  d.validate();
  const RealVector intensity = r.envelope().cwiseAbs2();
  return d.alpha * integrate_window(intensity, r.grid(), d.t_start, d.t_end());
}

EnsembleEstimate<double> detect_expected(const SourceModel& model, const TimeGrid& grid, double carrier_omega0,
                                         const DetectorConfig& d, const EnsembleSpec& spec, unsigned workers) {
  d.validate_on(grid);
  return ensemble_average(
      model, grid, carrier_omega0, [&](const FieldRealization& r) { return detect_single_shot(r, d); }, spec,
      workers);
}

}  // namespace cohsim
