#include "cohsim/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cohsim/fft.hpp"

namespace cohsim {

FieldRealization::FieldRealization(TimeGrid grid, double carrier_omega0, ComplexVector envelope,
                                   std::string point_label)
    : grid_(grid), carrier_(carrier_omega0), envelope_(std::move(envelope)), label_(std::move(point_label)) {
  grid_.validate();
  if (!std::isfinite(carrier_)) throw ConfigError("carrier_omega0 must be finite");
  if (static_cast<std::size_t>(envelope_.size()) != grid_.n) {
    throw ConfigError("envelope length " + std::to_string(envelope_.size()) + " does not match grid n " +
                      std::to_string(grid_.n));
  }
}

FieldRealization sample_realization(const SourceModel& model, const TimeGrid& grid, double carrier_omega0,
                                    const std::string& point_label, const SeedSpec& seed) {
  grid.validate();
  model.validate();
  if (!std::isfinite(carrier_omega0)) throw ConfigError("carrier_omega0", "must be finite");

  ComplexVector z(static_cast<Eigen::Index>(grid.n));
  if (const auto* pd = std::get_if<PhaseDiffusionCW>(&model.params())) {
    // Same first draw as SourceModel::draw(), then Euler increments of variance D*dt.
    auto rng = seed.engine();
    double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    const double step = std::sqrt(pd->D * grid.dt);
    std::normal_distribution<double> xi(0.0, 1.0);
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      z[k] = std::polar(pd->A0, phase);
      if (step > 0.0) phase += step * xi(rng);
    }
  } else {
    const RealizationDraw d = model.draw(seed);
    for (std::size_t k = 0; k < grid.n; ++k) z[static_cast<Eigen::Index>(k)] = model.envelope(d, grid.time(k));
  }
  return {grid, carrier_omega0, std::move(z), point_label};
}

Complex evaluate_field(const FieldRealization& r, std::size_t k) {
  if (k >= r.grid().n) {
    throw RangeError("sample index " + std::to_string(k) + " out of range [0, " + std::to_string(r.grid().n) + ")");
  }
  const double t = r.grid().time(k);
  return r.envelope()[static_cast<Eigen::Index>(k)] * std::polar(1.0, -r.carrier_omega0() * t);
}

ComplexVector analytic_signal(const FieldRealization& r) {
  ComplexVector u(r.envelope().size());
  for (std::size_t k = 0; k < r.grid().n; ++k) u[static_cast<Eigen::Index>(k)] = evaluate_field(r, k);
  return u;
}

FieldRealization with_carrier(const FieldRealization& r, double new_carrier) {
  const double shift = r.carrier_omega0() - new_carrier;
  if (shift == 0.0) return r;
  ComplexVector z = r.envelope();
  for (std::size_t k = 0; k < r.grid().n; ++k) {
    z[static_cast<Eigen::Index>(k)] *= std::polar(1.0, -shift * r.grid().time(k));
  }
  return {r.grid(), new_carrier, std::move(z), r.point_label()};
}

OccupiedBand occupied_band(const FieldRealization& r, double threshold_db) {
  const std::size_t n = r.grid().n;
  if (n < 8) throw ConfigError("bandwidth estimate needs at least 8 samples");

  std::vector<Complex> spec(n);
  detail::dft_plus(r.envelope().data(), spec.data(), n);

  std::vector<double> power(n);
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    power[j] = std::norm(spec[j]);
    peak = std::max(peak, power[j]);
  }
  if (!(peak > 0.0)) throw UndefinedBandwidthError("bandwidth undefined for an all-zero envelope");

  const double threshold = peak * std::pow(10.0, threshold_db / 10.0);
  long lo = std::numeric_limits<long>::max();
  long hi = std::numeric_limits<long>::min();
  for (std::size_t j = 0; j < n; ++j) {
    if (power[j] >= threshold) {
      const long m = detail::signed_bin(j, n);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  }

  OccupiedBand band;
  band.bin = 2.0 * std::numbers::pi / r.grid().duration();
  band.low = static_cast<double>(lo) * band.bin;
  band.high = static_cast<double>(hi) * band.bin;
  band.width = band.high - band.low + band.bin;
  band.center = 0.5 * (band.low + band.high);
  return band;
}

double estimate_bandwidth(const FieldRealization& r) { return occupied_band(r).width; }

bool is_quasi_monochromatic(const FieldRealization& r) {
  return estimate_bandwidth(r) < std::abs(r.carrier_omega0());
}

}  // namespace cohsim
