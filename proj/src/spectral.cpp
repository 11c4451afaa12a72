#include "cohsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cohsim/fft.hpp"

namespace cohsim {
namespace {

constexpr double kPi = std::numbers::pi;

double bin_width(const TimeGrid& g) { return 2.0 * kPi / g.duration(); }

// Lowest and highest representable offsets of an n-point grid.
std::pair<double, double> band_limits(const TimeGrid& g) {
  const long n = static_cast<long>(g.n);
  const double bin = bin_width(g);
  return {static_cast<double>(-(n / 2)) * bin, static_cast<double>(n - n / 2 - 1) * bin};
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void check_passband(const TimeGrid& g, const FilterSpec& f, double nu_f) {
  const auto [lo_band, hi_band] = band_limits(g);
  const double half = f.support_halfwidth();
  const double lo = nu_f - half;
  const double hi = nu_f + half;
  const bool covers_all = f.shape == FilterShape::Rectangular && lo <= lo_band && hi >= hi_band;
  if (covers_all) return;
  if (lo < lo_band || hi > hi_band) {
    const double need = std::abs(nu_f) + half;
    throw RangeError("filter passband [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] (offset from carrier) is clipped by the grid band [" + std::to_string(lo_band) + ", " +
                     std::to_string(hi_band) + "]; use dt <= " + std::to_string(kPi / need));
  }
}

}  // namespace

void check_filter_band(const TimeGrid& grid, double carrier_omega0, const FilterSpec& f) {
  grid.validate();
  f.validate();
  check_passband(grid, f, f.center_omega_f - carrier_omega0);
}

EnvelopeSpectrum envelope_spectrum(const FieldRealization& r) {
  const TimeGrid& g = r.grid();
  if (g.n < 8) throw ConfigError("envelope spectrum needs at least 8 samples");
  std::vector<Complex> raw(g.n);
  detail::dft_plus(r.envelope().data(), raw.data(), g.n);

  EnvelopeSpectrum s;
  s.grid = g;
  s.carrier_omega0 = r.carrier_omega0();
  s.d_omega = bin_width(g);
  s.omegas.resize(static_cast<Eigen::Index>(g.n));
  s.values.resize(static_cast<Eigen::Index>(g.n));
  const long n = static_cast<long>(g.n);
  const long first = -(n / 2);
  for (long i = 0; i < n; ++i) {
    const long m = first + i;
    const auto j = static_cast<std::size_t>(m < 0 ? m + n : m);
    const double nu = static_cast<double>(m) * s.d_omega;
    s.omegas[i] = nu;
    s.values[i] = g.dt * std::polar(1.0, nu * g.t_start) * raw[j];
  }
  return s;
}

FieldRealization envelope_from_spectrum(const EnvelopeSpectrum& s, const std::string& point_label) {
  const TimeGrid& g = s.grid;
  const long n = static_cast<long>(g.n);
  if (s.values.size() != n) throw ConfigError("spectrum size does not match its grid");
  std::vector<Complex> raw(g.n);
  for (long i = 0; i < n; ++i) {
    const long m = -(n / 2) + i;
    const auto j = static_cast<std::size_t>(m < 0 ? m + n : m);
    raw[j] = s.values[i] * std::polar(1.0, -s.omegas[i] * g.t_start) / g.dt;
  }
  ComplexVector z(n);
  detail::dft_minus(raw.data(), z.data(), g.n);
  z /= static_cast<double>(n);
  return {g, s.carrier_omega0, std::move(z), point_label};
}

Complex spectrum_at(const FieldRealization& r, double offset) {
  const TimeGrid& g = r.grid();
  // Rotate by a fixed step to avoid one sincos per sample.
  const Complex step = std::polar(1.0, offset * g.dt);
  Complex phase = std::polar(1.0, offset * g.t_start);
  Complex acc(0.0, 0.0);
  const auto& z = r.envelope();
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if ((k & 1023) == 0) phase = std::polar(1.0, offset * g.time(static_cast<std::size_t>(k)));
    acc += z[k] * phase;
    phase *= step;
  }
  return g.dt * acc;
}

double ParsevalCheck::relative_error() const {
  const double scale = std::max(std::abs(time_energy), std::abs(spectral_energy));
  return scale == 0.0 ? 0.0 : std::abs(time_energy - spectral_energy) / scale;
}

ParsevalCheck parseval(const FieldRealization& r, const EnvelopeSpectrum& s) {
  ParsevalCheck c;
  c.time_energy = r.envelope().squaredNorm() * r.grid().dt;
  c.spectral_energy = s.values.squaredNorm() * s.d_omega / (2.0 * kPi);
  return c;
}

void FilterSpec::validate() const {
  if (!std::isfinite(center_omega_f)) throw ConfigError("center_omega_f", "must be finite");
  if (!std::isfinite(bandwidth_delta) || !(bandwidth_delta > 0.0)) {
    throw ConfigError("bandwidth_delta", "must be > 0");
  }
}

double FilterSpec::response(double mu) const {
  switch (shape) {
    case FilterShape::Gaussian: {
      const double x = mu / bandwidth_delta;
      return std::exp(-x * x);
    }
    case FilterShape::Rectangular: return std::abs(mu) <= 0.5 * bandwidth_delta ? 1.0 : 0.0;
  }
  return 0.0;
}

double FilterSpec::temporal(double t) const {
  const double d = bandwidth_delta;
  switch (shape) {
    case FilterShape::Gaussian: return d / (2.0 * std::sqrt(kPi)) * std::exp(-0.25 * d * d * t * t);
    case FilterShape::Rectangular: return d / (2.0 * kPi) * sinc(0.5 * d * t);
  }
  return 0.0;
}

double FilterSpec::support_halfwidth() const {
  switch (shape) {
    case FilterShape::Gaussian: return bandwidth_delta * std::sqrt(12.0 * std::numbers::ln10);
    case FilterShape::Rectangular: return 0.5 * bandwidth_delta;
  }
  return 0.0;
}

FieldRealization apply_filter_exact(const FieldRealization& r, const FilterSpec& f) {
  f.validate();
  const TimeGrid& g = r.grid();
  const double nu_f = f.center_omega_f - r.carrier_omega0();
  check_passband(g, f, nu_f);

  const std::size_t n = g.n;
  const double bin = bin_width(g);
  std::vector<Complex> spec(n);
  detail::dft_plus(r.envelope().data(), spec.data(), n);
  for (std::size_t j = 0; j < n; ++j) {
    spec[j] *= f.response(static_cast<double>(detail::signed_bin(j, n)) * bin - nu_f);
  }
  ComplexVector z(static_cast<Eigen::Index>(n));
  detail::dft_minus(spec.data(), z.data(), n);
  // Undo the 1/n of the transform pair and move to the filter's carrier.
  for (std::size_t k = 0; k < n; ++k) {
    z[static_cast<Eigen::Index>(k)] *= std::polar(1.0 / static_cast<double>(n), nu_f * g.time(k));
  }
  return {g, f.center_omega_f, std::move(z), r.point_label()};
}

FieldRealization apply_filter_narrowband(const FieldRealization& r, const FilterSpec& f) {
  f.validate();
  const double envelope_band = estimate_bandwidth(r);
  if (f.bandwidth_delta > 0.1 * envelope_band) {
    throw NarrowbandInvalidError("narrowband approximation needs bandwidth_delta <= 0.1 * envelope bandwidth (" +
                                 std::to_string(0.1 * envelope_band) + "), got " + std::to_string(f.bandwidth_delta));
  }
  const Complex z_at_filter = spectrum_at(r, f.center_omega_f - r.carrier_omega0());
  const TimeGrid& g = r.grid();
  ComplexVector z(static_cast<Eigen::Index>(g.n));
  for (std::size_t k = 0; k < g.n; ++k) z[static_cast<Eigen::Index>(k)] = z_at_filter * f.temporal(g.time(k));
  return {g, f.center_omega_f, std::move(z), r.point_label()};
}

SpectralCoherenceResult spectral_coherence(const SourceModel& model1, const SourceModel& model2, double omega_offset,
                                           double delta_omega, const EnsembleSpec& spec,
                                           const CoherenceSetup& setup) {
  spec.validate();
  setup.grid.validate();
  model1.validate();
  model2.validate();
  if (spec.n_realizations < 10) throw ConfigError("ensemble.n_realizations", "spectral coherence needs >= 10");
  if (!std::isfinite(omega_offset) || !std::isfinite(delta_omega)) {
    throw ConfigError("spectral coherence offsets must be finite");
  }

  const TimeGrid& g = setup.grid;
  const double bin = bin_width(g);
  const auto [lo_band, hi_band] = band_limits(g);
  SpectralCoherenceResult out;
  out.requested_offset = omega_offset;
  out.requested_delta = delta_omega;
  out.snapped_offset = std::round(omega_offset / bin) * bin;
  const double snapped_upper = std::round((omega_offset + delta_omega) / bin) * bin;
  out.snapped_delta = snapped_upper - out.snapped_offset;
  for (double nu : {out.snapped_offset, snapped_upper}) {
    if (nu < lo_band - 0.5 * bin || nu > hi_band + 0.5 * bin) {
      throw RangeError("spectral coherence offset " + std::to_string(nu) + " outside the grid band");
    }
  }

  const std::size_t n = spec.n_realizations;
  std::vector<Complex> cross(n);
  std::vector<double> p1(n), p2(n), mean_bin_power(n);
  parallel_for(n, setup.workers, [&](std::size_t i) {
    const SeedSpec base = spec.seed(i);
    const auto r1 = sample_realization(model1, g, setup.carrier_omega0, "P1", arm_seed(base, 0, setup.correlation));
    const auto r2 = sample_realization(model2, g, setup.carrier_omega0, "P2", arm_seed(base, 1, setup.correlation));
    const Complex z1 = spectrum_at(r1, snapped_upper);
    const Complex z2 = spectrum_at(r2, out.snapped_offset);
    // Written out so that z1 == z2 gives cross == p1 == p2 bit for bit.
    cross[i] = Complex(z2.real() * z1.real() + z2.imag() * z1.imag(), z2.real() * z1.imag() - z2.imag() * z1.real());
    p1[i] = z1.real() * z1.real() + z1.imag() * z1.imag();
    p2[i] = z2.real() * z2.real() + z2.imag() * z2.imag();
    // Mean power per bin, sum |Z|^2 / n = dt^2 sum |z|^2 (Parseval).
    mean_bin_power[i] = 0.5 * g.dt * g.dt * (r1.envelope().squaredNorm() + r2.envelope().squaredNorm());
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p1[i]) || !std::isfinite(p2[i]) || !std::isfinite(cross[i].real()) ||
        !std::isfinite(cross[i].imag())) {
      throw EnsembleError(i, "spectral sample is not finite");
    }
  }

  const double dn = static_cast<double>(n);
  const Complex s_cross = pairwise_sum(cross);
  const double s1 = pairwise_sum(p1);
  const double s2 = pairwise_sum(p2);
  const double reference = pairwise_sum(mean_bin_power);
  out.n_realizations = n;
  out.cross_density = s_cross / dn;
  out.power1 = s1 / dn;
  out.power2 = s2 / dn;

  // Power at a bin this far below the mean bin power is rounding noise.
  const double null_level = 1e-20 * reference;
  const bool null1 = !(s1 > null_level);
  const bool null2 = !(s2 > null_level);
  if (null1 && null2) {
    throw DegenerateCoherenceError("both spectra vanish at the requested bins; spectral coherence is undefined");
  }
  if (null1 || null2) {
    // Disjoint spectral support: the cross density is bounded by the null side.
    out.mu = Complex(0.0, 0.0);
    out.std_error = 0.0;
    return out;
  }

  out.mu = s_cross / std::sqrt(s1 * s2);

  std::vector<Complex> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = s1 - p1[i];
    const double b = s2 - p2[i];
    loo[i] = (a > 0.0 && b > 0.0) ? (s_cross - cross[i]) / std::sqrt(a * b) : out.mu;
  }
  const Complex loo_mean = pairwise_sum(loo) / dn;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::norm(loo[i] - loo_mean);
  out.std_error = std::sqrt((dn - 1.0) / dn * pairwise_sum(dev));
  return out;
}

Complex chi_factor(const FilterSpec& f, double t_start, double T, double delta_omega) {
  f.validate();
  if (!std::isfinite(T) || !(T > 0.0)) throw ConfigError("T", "must be > 0");
  if (!std::isfinite(t_start) || !std::isfinite(delta_omega)) throw ConfigError("chi arguments must be finite");

  // At least 4096 intervals per oscillation of exp(-i delta t).
  const double periods = T * std::abs(delta_omega) / (2.0 * kPi);
  const auto intervals =
      static_cast<std::size_t>(std::clamp(std::ceil(4096.0 * periods), 16384.0, static_cast<double>(1u << 24)));
  const double h = T / static_cast<double>(intervals);

  double num_re = 0.0;
  double num_im = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double t = t_start + static_cast<double>(k) * h;
    const double w = (k == 0 || k == intervals) ? 0.5 : 1.0;
    const double g = w * f.temporal_intensity(t);
    num_re += g * std::cos(delta_omega * t);
    num_im -= g * std::sin(delta_omega * t);
    den += g;
  }
  if (!(den > 0.0)) throw NumericalError("filter response vanishes over the window");
  return {num_re / den, num_im / den};
}

PredictedVisibility predicted_visibility(Complex mu, Complex chi) {
  PredictedVisibility p;
  p.raw = std::abs(mu) * std::abs(chi);
  p.value = std::clamp(p.raw, 0.0, 1.0);
  return p;
}

}  // namespace cohsim
