#include <doctest.h>

#include <cmath>
#include <vector>

#include "cohsim/interference.hpp"
#include "cohsim/spectral.hpp"
#include "oracles.hpp"

using namespace cohsim;

namespace {

constexpr double kPi = std::numbers::pi;

FieldRealization field(const TimeGrid& g, const std::function<Complex(double)>& z, double carrier = 100.0) {
  ComplexVector v(static_cast<Eigen::Index>(g.n));
  for (std::size_t k = 0; k < g.n; ++k) v[static_cast<Eigen::Index>(k)] = z(g.time(k));
  return {g, carrier, v};
}

std::vector<oracle::cplx> samples(const FieldRealization& r) {
  return {r.envelope().data(), r.envelope().data() + r.envelope().size()};
}

Eigen::Index bin_of(const EnvelopeSpectrum& s, double nu) {
  Eigen::Index best = 0;
  (s.omegas.array() - nu).abs().minCoeff(&best);
  return best;
}

}  // namespace

TEST_CASE("spectrum of a constant envelope is a single line at zero offset") {
  const TimeGrid g{0.0, 0.01, 512};
  const auto s = envelope_spectrum(field(g, [](double) { return Complex(2.0, 0.0); }));
  const Eigen::Index zero = bin_of(s, 0.0);
  CHECK(s.omegas[zero] == 0.0);
  CHECK(std::abs(s.values[zero] - Complex(2.0 * g.duration(), 0.0)) < 1e-12);
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (i != zero) CHECK(std::abs(s.values[i]) < 1e-12);
  }
}

TEST_CASE("a component exp(-i d t) sits at offset +d") {
  const TimeGrid g{-1.3, 0.01, 400};
  const double bin = 2.0 * kPi / g.duration();
  for (int m : {3, -7, 25}) {
    const double d = m * bin;
    const auto s = envelope_spectrum(field(g, [d](double t) { return std::exp(Complex(0.0, -d * t)); }));
    Eigen::Index peak = 0;
    s.values.cwiseAbs().maxCoeff(&peak);
    CHECK(s.omegas[peak] == doctest::Approx(d));
    CHECK(std::abs(spectrum_at(field(g, [d](double t) { return std::exp(Complex(0.0, -d * t)); }), -d)) <
          1e-10);
  }
}

TEST_CASE("Gaussian envelope spectrum against the closed-form transform") {
  const double tau = 0.7;
  const TimeGrid g{-20.0, 0.01, 4000};
  const auto r = field(g, [tau](double t) { return Complex(std::exp(-t * t / (tau * tau)), 0.0); });
  const auto s = envelope_spectrum(r);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.omegas.size(); ++i) {
    const double nu = s.omegas[i];
    if (std::abs(nu) > 30.0) continue;
    const double closed = tau * std::sqrt(kPi) * std::exp(-nu * nu * tau * tau / 4.0);
    worst = std::max(worst, std::abs(s.values[i] - closed));
  }
  CHECK(worst < 1e-6);
  // Off-bin evaluation matches the closed form and a Simpson integral.
  for (double nu : {0.37, -2.9, 5.05}) {
    const double closed = tau * std::sqrt(kPi) * std::exp(-nu * nu * tau * tau / 4.0);
    const auto quad = oracle::simpson(
        [&](double t) { return std::exp(-t * t / (tau * tau)) * std::exp(oracle::cplx(0.0, nu * t)); }, -20.0, 20.0,
        400000);
    CHECK(std::abs(quad - closed) < 1e-9);
    CHECK(std::abs(spectrum_at(r, nu) - closed) < 1e-6);
    CHECK(std::abs(spectrum_at(r, nu) - oracle::direct_spectrum(samples(r), g.t_start, g.dt, nu)) < 1e-9);
  }
}

TEST_CASE("Parseval and inverse transform") {
  const TimeGrid g{-3.0, 0.02, 333};
  const auto r = field(g, [](double t) {
    return Complex(std::cos(3.0 * t) * std::exp(-t * t), 0.4 * std::sin(7.0 * t) + 0.1 * t);
  });
  const auto s = envelope_spectrum(r);
  CHECK(parseval(r, s).relative_error() < 1e-9);
  const auto back = envelope_from_spectrum(s);
  CHECK((back.envelope() - r.envelope()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.grid() == g);
  CHECK_THROWS_AS(envelope_spectrum(field(TimeGrid{0.0, 1.0, 7}, [](double) { return Complex(1.0, 0.0); })),
                  ConfigError);
}

TEST_CASE("filter responses") {
  const FilterSpec gauss{FilterShape::Gaussian, 0.0, 2.0};
  CHECK(gauss.response(0.0) == 1.0);
  CHECK(gauss.response(2.0) == doctest::Approx(std::exp(-1.0)));
  const FilterSpec rect{FilterShape::Rectangular, 0.0, 2.0};
  CHECK(rect.response(0.99) == 1.0);
  CHECK(rect.response(1.01) == 0.0);
  // The closed-form temporal responses are the inverse transforms of F.
  for (double t : {0.0, 0.3, -1.7, 4.0}) {
    CHECK(gauss.temporal(t) ==
          doctest::Approx(oracle::inverse_transform([&](double m) { return gauss.response(m); }, t, 20.0, 20000))
              .epsilon(1e-9));
    const double rect_oracle = oracle::simpson([t](double m) { return std::cos(m * t); }, -1.0, 1.0, 20000) / (2.0 * kPi);
    CHECK(std::abs(rect.temporal(t) - rect_oracle) < 1e-12);
  }
  CHECK_THROWS_AS((FilterSpec{FilterShape::Gaussian, 0.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((FilterSpec{FilterShape::Gaussian, NAN, 1.0}.validate()), ConfigError);
}

TEST_CASE("an all-pass rectangular filter is the identity") {
  const TimeGrid g{-2.0, 0.01, 400};
  const auto r = field(g, [](double t) { return Complex(std::exp(-t * t), std::sin(5.0 * t)); });
  const auto out = apply_filter_exact(r, FilterSpec{FilterShape::Rectangular, 100.0, 1e6});
  CHECK(out.carrier_omega0() == 100.0);
  CHECK((out.envelope() - r.envelope()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stopband components are removed") {
  const TimeGrid g{0.0, 0.01, 1000};
  const double bin = 2.0 * kPi / g.duration();
  const double d = 40.0 * bin;
  const auto r = field(g, [d](double t) { return std::exp(Complex(0.0, -d * t)); });
  const auto out = apply_filter_exact(r, FilterSpec{FilterShape::Rectangular, 100.0, 10.0 * bin});
  CHECK(out.envelope().cwiseAbs().maxCoeff() <= 1e-10);
  const auto gauss = apply_filter_exact(r, FilterSpec{FilterShape::Gaussian, 100.0, 3.0 * bin});
  CHECK(gauss.envelope().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("filtered output bandwidth follows the filter") {
  const TimeGrid g{-20.0, 0.005, 8000};
  const auto r = field(g, [](double t) { return Complex(std::exp(-t * t / 0.0025), 0.0); });
  for (double delta : {2.0, 5.0}) {
    const auto out = apply_filter_exact(r, FilterSpec{FilterShape::Gaussian, 100.0, delta});
    // -40 dB full width of |F|^2 = exp(-2 mu^2 / delta^2).
    const double expected = 2.0 * delta * std::sqrt(2.0 * std::numbers::ln10);
    CHECK(estimate_bandwidth(out) == doctest::Approx(expected).epsilon(0.05));
  }
}

TEST_CASE("a clipped passband is rejected with a sampling hint") {
  const TimeGrid g{0.0, 0.1, 256};
  const auto r = field(g, [](double) { return Complex(1.0, 0.0); });
  try {
    apply_filter_exact(r, FilterSpec{FilterShape::Gaussian, 140.0, 1.0});
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("dt <=") != std::string::npos);
  }
  CHECK_THROWS_AS(check_filter_band(g, 100.0, FilterSpec{FilterShape::Gaussian, 100.0 - 30.0, 1.0}), RangeError);
  CHECK_NOTHROW(check_filter_band(g, 100.0, FilterSpec{FilterShape::Gaussian, 105.0, 1.0}));
}

TEST_CASE("narrowband filtering") {
  const double tau = 0.05;
  const TimeGrid g{-10.0, 0.002, 10000};
  const auto r = field(g, [tau](double t) { return Complex(std::exp(-t * t / (tau * tau)), 0.0); });
  const double band = estimate_bandwidth(r);
  REQUIRE(band > 100.0);

  SUBCASE("proportional to the filter's temporal intensity") {
    const FilterSpec f{FilterShape::Gaussian, 103.0, 2.0};
    const auto out = apply_filter_narrowband(r, f);
    CHECK(out.carrier_omega0() == 103.0);
    const double z_at = tau * std::sqrt(kPi) * std::exp(-9.0 * tau * tau / 4.0);
    double worst = 0.0;
    for (double t : {-1.0, -0.2, 0.0, 0.5, 1.3}) {
      const auto k = static_cast<std::size_t>(std::lround((t - g.t_start) / g.dt));
      const double tk = g.time(k);
      const double f_oracle = oracle::inverse_transform([&](double m) { return f.response(m); }, tk, 24.0, 40000);
      const double expected = z_at * z_at * f_oracle * f_oracle;
      worst = std::max(worst, std::abs(std::norm(out.envelope()[static_cast<Eigen::Index>(k)]) - expected) /
                                  (z_at * z_at * f.temporal(0.0) * f.temporal(0.0)));
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("agrees with exact filtering when the filter is narrow") {
    const FilterSpec f{FilterShape::Gaussian, 100.0, 0.02 * band};
    const auto a = apply_filter_exact(r, f);
    const auto b = apply_filter_narrowband(r, f);
    CHECK((a.envelope() - b.envelope()).norm() / a.envelope().norm() <= 0.02);
  }
  SUBCASE("refuses a wide filter") {
    CHECK_THROWS_AS(apply_filter_narrowband(r, FilterSpec{FilterShape::Gaussian, 100.0, 0.5 * band}),
                    NarrowbandInvalidError);
  }
  SUBCASE("vanishing spectrum at the filter centre") {
    const auto odd = field(g, [](double t) { return Complex(t * std::exp(-t * t), 0.0); });
    const auto out = apply_filter_narrowband(odd, FilterSpec{FilterShape::Gaussian, 100.0, 0.01});
    CHECK(out.envelope().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectral coherence examples") {
  const TimeGrid g{-8.0, 0.05, 320};
  const double bin = 2.0 * kPi / g.duration();
  const SourceModel pulse = GaussianPulseRandomAmplitude{0.5, 1.0, 0.3, 0.4};

  SUBCASE("a field against itself is fully coherent") {
    const auto r = spectral_coherence(pulse, pulse, 0.0, 0.0, {200, 1}, {g, 100.0, ArmCorrelation::Common, 1});
    CHECK(r.mu == Complex(1.0, 0.0));
    CHECK(r.n_realizations == 200);
  }
  SUBCASE("independent random-phase fields are incoherent") {
    const SourceModel cw = PhaseDiffusionCW{1.0, 0.5};
    const auto r = spectral_coherence(cw, cw, 0.0, 0.0, {10000, 2}, {g, 100.0, ArmCorrelation::Independent, 1});
    CHECK(std::abs(r.mu) <= 0.04);
    CHECK(r.std_error > 0.0);
  }
  SUBCASE("a bin-aligned line has no power one bin away") {
    const SourceModel cw = RandomPhaseCW{1.0, 0.0, std::nullopt};
    const auto r = spectral_coherence(cw, cw, 0.0, bin, {20, 3}, {g, 100.0, ArmCorrelation::Common, 1});
    CHECK(std::abs(r.mu) < 1e-12);
    CHECK(r.snapped_delta == doctest::Approx(bin));
    CHECK_THROWS_AS(spectral_coherence(cw, cw, 3.0 * bin, bin, {20, 3}, {g, 100.0, ArmCorrelation::Common, 1}),
                    DegenerateCoherenceError);
  }
  SUBCASE("argument errors") {
    const CoherenceSetup s{g, 100.0, ArmCorrelation::Common, 1};
    CHECK_THROWS_AS(spectral_coherence(pulse, pulse, 0.0, 0.0, {9, 1}, s), ConfigError);
    CHECK_THROWS_AS(spectral_coherence(pulse, pulse, 1e4, 0.0, {50, 1}, s), RangeError);
    CHECK_THROWS_AS(spectral_coherence(pulse, pulse, 0.0, NAN, {50, 1}, s), ConfigError);
  }
  SUBCASE("offsets snap to bins") {
    const auto r = spectral_coherence(pulse, pulse, 0.4 * bin, 2.3 * bin, {20, 1}, {g, 100.0, ArmCorrelation::Common, 1});
    CHECK(r.snapped_offset == 0.0);
    CHECK(r.snapped_delta == doctest::Approx(3.0 * bin));
    CHECK(r.requested_delta == 2.3 * bin);
  }
}

TEST_CASE("spectral coherence is bounded by one within its error") {
  const TimeGrid g{-8.0, 0.05, 320};
  const SourceModel pulse = GaussianPulseRandomAmplitude{0.5, 1.0, 0.5, 0.7};
  const SourceModel cw = PhaseDiffusionCW{1.0, 2.0};
  for (auto corr : {ArmCorrelation::Common, ArmCorrelation::Independent}) {
    for (double delta : {0.0, 0.5, 1.5, 3.0}) {
      for (const SourceModel* m : {&pulse, &cw}) {
        const auto r = spectral_coherence(*m, *m, -0.3, delta, {300, 17}, {g, 100.0, corr, 1});
        CHECK(std::abs(r.mu) <= 1.0 + 3.0 * r.std_error + 1e-12);
      }
    }
  }
}

TEST_CASE("spectral coherence against a direct leave-one-out oracle") {
  const TimeGrid g{-6.0, 0.05, 240};
  const SourceModel pulse = GaussianPulseRandomAmplitude{0.4, 1.0, 0.4, 0.5};
  const EnsembleSpec spec{40, 77};
  const CoherenceSetup setup{g, 100.0, ArmCorrelation::Common, 1};
  const double offset = -0.6;
  const double delta = 1.1;
  const auto r = spectral_coherence(pulse, pulse, offset, delta, spec, setup);

  std::vector<oracle::cplx> z1, z2;
  for (std::size_t i = 0; i < spec.n_realizations; ++i) {
    const auto f = sample_realization(pulse, g, 100.0, "P", spec.seed(i));
    z1.push_back(oracle::direct_spectrum(samples(f), g.t_start, g.dt, r.snapped_offset + r.snapped_delta));
    z2.push_back(oracle::direct_spectrum(samples(f), g.t_start, g.dt, r.snapped_offset));
  }
  auto mu_without = [&](std::size_t skip) {
    oracle::cplx c = 0.0;
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < z1.size(); ++i) {
      if (i == skip) continue;
      c += std::conj(z2[i]) * z1[i];
      a += std::norm(z1[i]);
      b += std::norm(z2[i]);
    }
    return c / std::sqrt(a * b);
  };
  const oracle::cplx mu = mu_without(z1.size());
  CHECK(std::abs(r.mu - mu) < 1e-9);

  std::vector<oracle::cplx> loo(z1.size());
  oracle::cplx mean = 0.0;
  for (std::size_t i = 0; i < z1.size(); ++i) mean += (loo[i] = mu_without(i));
  mean /= static_cast<double>(z1.size());
  double ss = 0.0;
  for (const auto& x : loo) ss += std::norm(x - mean);
  const double n = static_cast<double>(z1.size());
  CHECK(r.std_error == doctest::Approx(std::sqrt((n - 1.0) / n * ss)).epsilon(1e-8));
}

TEST_CASE("jittered pulses: coherence falls with frequency separation") {
  // Arrival jitter sigma multiplies Z by exp(i nu t0): mu = exp(-delta^2 sigma^2 / 2).
  const TimeGrid g{-10.0, 0.05, 400};
  const double sigma = 0.8;
  const SourceModel pulse = GaussianPulseRandomAmplitude{0.3, 1.0, 0.0, sigma};
  for (double delta : {0.0, 0.8, 1.6, 2.5}) {
    const auto r = spectral_coherence(pulse, pulse, -0.5 * delta, delta, {4000, 5}, {g, 100.0, ArmCorrelation::Common, 1});
    const double expected = std::exp(-0.5 * r.snapped_delta * r.snapped_delta * sigma * sigma);
    CAPTURE(delta);
    CHECK(std::abs(std::abs(r.mu) - expected) <= 4.0 * r.std_error + 1e-3);
  }
}

TEST_CASE("chi factor") {
  const FilterSpec wide{FilterShape::Gaussian, 100.0, 1e-4};
  const FilterSpec narrow{FilterShape::Gaussian, 100.0, 0.5};

  SUBCASE("no frequency difference gives exactly one") {
    CHECK(chi_factor(narrow, -1.0, 2.0, 0.0) == Complex(1.0, 0.0));
    CHECK(chi_factor(FilterSpec{FilterShape::Rectangular, 0.0, 3.0}, 0.2, 5.0, 0.0) == Complex(1.0, 0.0));
  }
  SUBCASE("flat temporal response reduces to the window average of the beat") {
    for (double d : {0.3, 1.0, 2.5, 7.0}) {
      for (double t0 : {-0.5, 0.0, 1.2}) {
        const Complex chi = chi_factor(wide, t0, 1.0, d);
        CHECK(std::abs(chi - oracle::window_average_of_tone(d, t0, 1.0)) < 1e-6);
      }
    }
    CHECK(std::abs(chi_factor(wide, -0.5, 1.0, 2.0 * kPi)) < 1e-6);
    CHECK(std::abs(chi_factor(wide, 0.3, 2.0, kPi)) < 1e-6);
  }
  SUBCASE("full support of a Gaussian filter") {
    for (double d : {0.1, 0.4, 0.9, 1.5}) {
      const double half = std::sqrt(80.0) / narrow.bandwidth_delta;
      const Complex chi = chi_factor(narrow, -half, 2.0 * half, d);
      const double expected = std::exp(-d * d / (2.0 * narrow.bandwidth_delta * narrow.bandwidth_delta));
      CHECK(std::abs(chi - expected) < 1e-6);
    }
  }
  SUBCASE("bounded by one and conjugate symmetric") {
    for (const auto& f : {wide, narrow, FilterSpec{FilterShape::Rectangular, 0.0, 2.0}}) {
      for (double d : {0.01, 0.7, 3.3, 12.0}) {
        for (double t0 : {-3.0, 0.0, 0.8}) {
          const Complex a = chi_factor(f, t0, 1.7, d);
          const Complex b = chi_factor(f, t0, 1.7, -d);
          CHECK(std::abs(a) <= 1.0 + 1e-12);
          CHECK(b.real() == a.real());
          CHECK(b.imag() == -a.imag());
        }
      }
    }
  }
  SUBCASE("magnitude decreases from zero separation up to the first null") {
    const double T = 2.0;
    double prev = 1.0;
    for (int i = 1; i <= 40; ++i) {
      const double d = 2.0 * kPi / T * i / 40.0;
      const double v = std::abs(chi_factor(narrow, -0.5 * T, T, d));
      CHECK(v < prev);
      prev = v;
    }
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(chi_factor(narrow, 0.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(chi_factor(narrow, 0.0, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(chi_factor(narrow, 0.0, 1.0, NAN), ConfigError);
  }
}

TEST_CASE("predicted visibility") {
  CHECK(predicted_visibility(Complex(0.5, 0.0), Complex(0.0, 0.8)).value == doctest::Approx(0.4));
  CHECK(predicted_visibility(Complex(1.0, 0.0), Complex(1.0, 0.0)).value == 1.0);
  const auto over = predicted_visibility(Complex(1.1, 0.0), Complex(1.0, 0.5));
  CHECK(over.value == 1.0);
  CHECK(over.raw == doctest::Approx(1.1 * std::abs(Complex(1.0, 0.5))));
  SpectralCoherenceResult r;
  r.mu = Complex(0.0, 0.6);
  CHECK(predicted_visibility(r, Complex(0.5, 0.0)).value == doctest::Approx(0.3));
}

TEST_CASE("non-stationary source: filtered visibility against the stationary prediction") {
  // Recorded for comparison only; the factorized prediction is not expected to hold here.
  const TimeGrid g{-10.0, 0.02, 1000};
  const SourceModel blockade = BlockadeNonStationary{1.0, 0.2, 3.0};
  const double dw = 0.6;
  const FilterSpec f1{FilterShape::Gaussian, 100.0 + 0.5 * dw, 0.2};
  const FilterSpec f2{FilterShape::Gaussian, 100.0 - 0.5 * dw, 0.2};
  const Interferometer setup{blockade, blockade, g, 100.0, ArmCorrelation::Common, f1, f2};
  const DetectorConfig d{1.0, -1.0, 2.0};
  const auto scan = fringe_scan_ensemble(setup, default_taus(setup.fringe_omega()), d, {200, 4});
  const auto v = jackknife_visibility(scan, VisibilityMethod::SinusoidFit);
  const auto mu = spectral_coherence(blockade, blockade, f2.center_omega_f - 100.0, dw, {200, 4},
                                     {g, 100.0, ArmCorrelation::Common, 1});
  const auto pred = predicted_visibility(mu, chi_factor(f1, d.t_start, d.T, dw));
  CHECK(std::isfinite(v.value));
  CHECK(std::isfinite(pred.value));
  MESSAGE("blockade: measured V = " << v.value << " +- " << *v.std_error << ", predicted |mu||chi| = " << pred.value);
}
