#include "cohsim/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace cohsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Four-point Lagrange (cubic) interpolation of the envelope at time t.
Complex interpolate_envelope(const FieldRealization& r, double t) {
  const TimeGrid& g = r.grid();
  const auto& z = r.envelope();
  const double u = (t - g.t_start) / g.dt;
  const double nearest = std::round(u);
  const auto last = static_cast<long>(g.n) - 1;
  if (std::abs(u - nearest) < 1e-9) {
    const long k = std::clamp(static_cast<long>(nearest), 0L, last);
    return z[k];
  }
  if (g.n < 4) {
    const long j = std::clamp(static_cast<long>(std::floor(u)), 0L, last - 1);
    const double x = u - static_cast<double>(j);
    return z[j] + (z[j + 1] - z[j]) * x;
  }
  const long j = std::clamp(static_cast<long>(std::floor(u)), 1L, last - 2);
  const double x = u - static_cast<double>(j);
  const double wm = -x * (x - 1.0) * (x - 2.0) / 6.0;
  const double w0 = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
  const double w1 = -(x + 1.0) * x * (x - 2.0) / 2.0;
  const double w2 = (x + 1.0) * x * (x - 1.0) / 6.0;
  return wm * z[j - 1] + w0 * z[j] + w1 * z[j + 1] + w2 * z[j + 2];
}

// One arm of the interferometer for one detection: either a closed-form
// envelope evaluated exactly at shifted times, or a sampled (possibly
// filtered) realization that is interpolated.
class ArmField {
 public:
  ArmField(const SourceModel& model, RealizationDraw draw, double carrier)
      : model_(&model), draw_(draw), carrier_(carrier) {}
  explicit ArmField(FieldRealization r) : sampled_(std::move(r)), carrier_(sampled_->carrier_omega0()) {}

  Complex envelope(double t) const {
    return sampled_ ? interpolate_envelope(*sampled_, t) : model_->envelope(draw_, t);
  }
  double carrier() const { return carrier_; }

 private:
  const SourceModel* model_ = nullptr;
  RealizationDraw draw_{};
  std::optional<FieldRealization> sampled_;
  double carrier_;
};

ArmField make_arm(const Interferometer& s, std::size_t arm, const SeedSpec& base) {
  const SourceModel& model = arm == 0 ? s.arm1 : s.arm2;
  const auto& filter = arm == 0 ? s.filter1 : s.filter2;
  const SeedSpec seed = arm_seed(base, arm, s.correlation);
  if (!filter && model.has_closed_form()) return {model, model.draw(seed), s.carrier_omega0};
  auto r = sample_realization(model, s.grid, s.carrier_omega0, arm == 0 ? "P1" : "P2", seed);
  if (filter) r = apply_filter_exact(r, *filter);
  return ArmField(std::move(r));
}

// Shared evaluation of alpha * (1/T) integral |u1(t - tau/2) + u2(t + tau/2)|^2
// on the grid samples touched by the detector window.
class PairDetector {
 public:
  PairDetector(const TimeGrid& grid, const DetectorConfig& d) : d_(d) {
    const WindowSpan span = window_span(grid, d.t_start, d.t_end());
    first_ = span.first;
    sub_ = TimeGrid{grid.time(span.first), grid.dt, span.last - span.first + 1};
    times_.resize(static_cast<Eigen::Index>(sub_.n));
    for (std::size_t k = 0; k < sub_.n; ++k) times_[static_cast<Eigen::Index>(k)] = grid.time(first_ + k);
    intensity_.resize(static_cast<Eigen::Index>(sub_.n));
  }

  double detect(const ArmField& a1, const ArmField& a2, double tau) {
    const double w1 = a1.carrier();
    const double w2 = a2.carrier();
    const Complex p1 = std::polar(1.0, 0.5 * w1 * tau);
    const Complex p2 = std::polar(1.0, -0.5 * w2 * tau);
    const double beat = w1 - w2;
    for (Eigen::Index k = 0; k < times_.size(); ++k) {
      const double t = times_[k];
      Complex v1 = a1.envelope(t - 0.5 * tau) * p1;
      if (beat != 0.0) v1 *= std::polar(1.0, -beat * t);
      const Complex v = v1 + a2.envelope(t + 0.5 * tau) * p2;
      intensity_[k] = std::norm(v);
    }
    return d_.alpha * integrate_window(intensity_, sub_, d_.t_start, d_.t_end()) / d_.T;
  }

 private:
  DetectorConfig d_;
  std::size_t first_ = 0;
  TimeGrid sub_;
  RealVector times_;
  RealVector intensity_;
};

void check_scan(const Interferometer& s, const RealVector& taus, const DetectorConfig& d) {
  s.validate();
  d.validate_on(s.grid);
  if (taus.size() < 2) throw ConfigError("scan needs at least 2 delays");
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus[i])) throw ConfigError("scan delays must be finite");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw ConfigError("scan delays must be strictly ascending");
  }
  const double period = kTwoPi / std::abs(s.fringe_omega());
  for (Eigen::Index i = 1; i < taus.size(); ++i) {
    if (taus[i] - taus[i - 1] > period / 16.0 * (1.0 + 1e-9)) {
      throw ConfigError("scan is sampled below 16 points per fringe period");
    }
  }
  const double reach = 0.5 * std::max(std::abs(taus[0]), std::abs(taus[taus.size() - 1]));
  if (!s.grid.contains(d.t_start - reach, d.t_end() + reach)) {
    throw RangeError("detector window widened by max |tau|/2 = " + std::to_string(reach) + " leaves the grid");
  }
}

double extrema_visibility(const RealVector& y, double& i_max, double& i_min) {
  Eigen::Index jmax = 0;
  Eigen::Index jmin = 0;
  for (Eigen::Index j = 1; j < y.size(); ++j) {
    if (y[j] > y[jmax]) jmax = j;
    if (y[j] < y[jmin]) jmin = j;
  }
  i_max = y[jmax];
  i_min = y[jmin];
  const double sum = i_max + i_min;
  return sum == 0.0 ? 0.0 : (i_max - i_min) / sum;
}

Eigen::MatrixXd fringe_design(const RealVector& taus, double omega) {
  Eigen::MatrixXd x(taus.size(), 3);
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(omega * taus[i]);
    x(i, 2) = std::sin(omega * taus[i]);
  }
  return x;
}

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> fringe_solver(const RealVector& taus, double omega) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fringe_design(taus, omega));
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw FitError("sinusoid fit is singular for these delays");
  return qr;
}

double fit_visibility(const Eigen::Vector3d& c, double& i_max, double& i_min) {
  const double a = c[0];
  const double b = std::hypot(c[1], c[2]);
  if (!(a > 0.0)) throw FitError("sinusoid fit has non-positive mean intensity");
  i_max = a + b;
  i_min = a - b;
  return b / a;
}

void check_visibility_input(const RealVector& taus, const RealVector& y, double omega) {
  if (taus.size() != y.size()) throw ConfigError("delays and intensities differ in length");
  if (taus.size() < 3) throw InsufficientScanError("scan needs at least 3 points");
  if (!(std::abs(omega) > 0.0) || !std::isfinite(omega)) throw ConfigError("fringe frequency must be non-zero");
  const double period = kTwoPi / std::abs(omega);
  const double range = taus[taus.size() - 1] - taus[0];
  if (range < 2.0 * period * (1.0 - 1e-9)) {
    throw InsufficientScanError("scan covers " + std::to_string(range / period) + " fringe periods; need >= 2");
  }
  for (Eigen::Index i = 1; i < taus.size(); ++i) {
    if (taus[i] - taus[i - 1] > period / 16.0 * (1.0 + 1e-9)) {
      throw ConfigError("scan is sampled below 16 points per fringe period");
    }
  }
}

}  // namespace

FieldRealization superpose(const FieldRealization& r1, const FieldRealization& r2, const DelaySpec& delay) {
  if (!(r1.grid() == r2.grid())) throw ConfigError("superpose needs identical grids");
  if (r1.carrier_omega0() != r2.carrier_omega0()) throw ConfigError("superpose needs identical carriers");
  if (!std::isfinite(delay.tau)) throw ConfigError("delay must be finite");
  const TimeGrid& g = r1.grid();
  const double half = 0.5 * std::abs(delay.tau);
  const double u_lo = std::ceil(half / g.dt - 1e-9);
  const double u_hi = std::floor(static_cast<double>(g.n - 1) - half / g.dt + 1e-9);
  if (!(u_hi - u_lo >= 1.0)) {
    throw RangeError("delay " + std::to_string(delay.tau) + " leaves fewer than 2 overlapping samples");
  }
  const auto k0 = static_cast<std::size_t>(u_lo);
  const auto k1 = static_cast<std::size_t>(u_hi);
  const TimeGrid out{g.time(k0), g.dt, k1 - k0 + 1};

  const double w0 = r1.carrier_omega0();
  const Complex p1 = std::polar(1.0, 0.5 * w0 * delay.tau);
  const Complex p2 = std::polar(1.0, -0.5 * w0 * delay.tau);
  ComplexVector z(static_cast<Eigen::Index>(out.n));
  for (std::size_t k = 0; k < out.n; ++k) {
    const double t = g.time(k0 + k);
    z[static_cast<Eigen::Index>(k)] = interpolate_envelope(r1, t - 0.5 * delay.tau) * p1 +
                                      interpolate_envelope(r2, t + 0.5 * delay.tau) * p2;
  }
  return {out, w0, std::move(z), r1.point_label() + "+" + r2.point_label()};
}

double magyar_mandel_signal(const FieldRealization& r1, const FieldRealization& r2, const DelaySpec& delay,
                            const DetectorConfig& d) {
  d.validate();
  const FieldRealization sum = superpose(r1, r2, delay);
  const RealVector intensity = sum.envelope().cwiseAbs2();
  return time_average(intensity, sum.grid(), d.t_start, d.T);
}

void Interferometer::validate() const {
  grid.validate();
  arm1.validate();
  arm2.validate();
  if (!std::isfinite(carrier_omega0) || !(carrier_omega0 > 0.0)) {
    throw ConfigError("carrier_omega0", "must be > 0");
  }
  if (filter1) filter1->validate();
  if (filter2) filter2->validate();
}

double Interferometer::fringe_omega() const {
  auto arm_frequency = [this](const SourceModel& m, const std::optional<FilterSpec>& f) {
    if (f) return f->center_omega_f;
    double w = carrier_omega0;
    if (const auto* cw = std::get_if<RandomPhaseCW>(&m.params())) w += cw->detuning;
    return w;
  };
  return 0.5 * (arm_frequency(arm1, filter1) + arm_frequency(arm2, filter2));
}

RealVector default_taus(double fringe_omega, int periods, int points_per_period) {
  if (periods < 1 || points_per_period < 1) throw ConfigError("scan", "periods and points_per_period must be >= 1");
  const double period = kTwoPi / std::abs(fringe_omega);
  const int n = periods * points_per_period + 1;
  RealVector taus(n);
  const double step = period / points_per_period;
  const double start = -0.5 * periods * period;
  for (int i = 0; i < n; ++i) taus[i] = start + i * step;
  return taus;
}

FringeScan fringe_scan_single_shot(const Interferometer& setup, const RealVector& taus, const DetectorConfig& d,
                                   const SeedSpec& seed) {
  check_scan(setup, taus, d);
  const ArmField a1 = make_arm(setup, 0, seed);
  const ArmField a2 = make_arm(setup, 1, seed);
  PairDetector det(setup.grid, d);

  FringeScan scan;
  scan.mode = ScanMode::SingleShot;
  scan.taus = taus;
  scan.fringe_omega = setup.fringe_omega();
  scan.intensities.resize(taus.size());
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    scan.intensities[i] = det.detect(a1, a2, taus[i]);
    if (!std::isfinite(scan.intensities[i])) throw NumericalError("detected intensity is not finite");
  }
  scan.metadata = {setup, d, seed, 1};
  return scan;
}

FringeScan fringe_scan_ensemble(const Interferometer& setup, const RealVector& taus, const DetectorConfig& d,
                                const EnsembleSpec& spec, unsigned workers) {
  check_scan(setup, taus, d);
  spec.validate();
  const std::size_t n = spec.n_realizations;
  const Eigen::Index m = taus.size();

  FringeScan scan;
  scan.mode = ScanMode::Ensemble;
  scan.taus = taus;
  scan.fringe_omega = setup.fringe_omega();
  scan.members.resize(static_cast<Eigen::Index>(n), m);
  parallel_for(n, workers, [&](std::size_t i) {
    const SeedSpec base = spec.seed(i);
    const ArmField a1 = make_arm(setup, 0, base);
    const ArmField a2 = make_arm(setup, 1, base);
    PairDetector det(setup.grid, d);
    for (Eigen::Index j = 0; j < m; ++j) scan.members(static_cast<Eigen::Index>(i), j) = det.detect(a1, a2, taus[j]);
  });

  scan.intensities.resize(m);
  scan.std_errors.resize(m);
  std::vector<double> column(n);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = scan.members(static_cast<Eigen::Index>(i), j);
      if (!std::isfinite(column[i])) throw EnsembleError(i, "detected intensity is not finite");
    }
    const auto est = summarize(column);
    scan.intensities[j] = est.mean;
    scan.std_errors[j] = est.std_error;
  }
  scan.metadata = {setup, d, spec.seed(0), n};
  return scan;
}

VisibilityResult extract_visibility(const RealVector& taus, const RealVector& y, double fringe_omega,
                                    VisibilityMethod method) {
  check_visibility_input(taus, y, fringe_omega);
  VisibilityResult v;
  v.method = method;
  if (method == VisibilityMethod::Extrema) {
    v.raw_value = extrema_visibility(y, v.i_max, v.i_min);
  } else {
    const auto qr = fringe_solver(taus, fringe_omega);
    const Eigen::Vector3d c = qr.solve(y);
    v.raw_value = fit_visibility(c, v.i_max, v.i_min);
    const RealVector residual = y - fringe_design(taus, fringe_omega) * c;
    v.fit_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(y.size()));
  }
  v.value = std::clamp(v.raw_value, 0.0, 1.0);
  return v;
}

VisibilityResult extract_visibility(const FringeScan& scan, VisibilityMethod method) {
  return extract_visibility(scan.taus, scan.intensities, scan.fringe_omega, method);
}

VisibilityResult jackknife_visibility(const FringeScan& scan, VisibilityMethod method) {
  if (scan.mode != ScanMode::Ensemble || scan.members.rows() < 2) {
    throw ConfigError("jackknife visibility needs an ensemble scan with at least 2 members");
  }
  VisibilityResult v = extract_visibility(scan, method);
  const Eigen::Index n = scan.members.rows();
  const double dn = static_cast<double>(n);
  std::vector<double> loo(static_cast<std::size_t>(n));

  if (method == VisibilityMethod::Extrema) {
    const RealVector total = scan.intensities * dn;
    for (Eigen::Index i = 0; i < n; ++i) {
      const RealVector y = (total - scan.members.row(i).transpose()) / (dn - 1.0);
      double hi = 0.0;
      double lo = 0.0;
      loo[static_cast<std::size_t>(i)] = extrema_visibility(y, hi, lo);
    }
  } else {
    // The fit is linear in the intensities, so leave-one-out coefficients
    // follow from per-member coefficients.
    const auto qr = fringe_solver(scan.taus, scan.fringe_omega);
    const Eigen::MatrixXd coef = qr.solve(scan.members.transpose());  // 3 x n
    const Eigen::Vector3d total = qr.solve(scan.intensities) * dn;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector3d c = (total - coef.col(i)) / (dn - 1.0);
      double hi = 0.0;
      double lo = 0.0;
      loo[static_cast<std::size_t>(i)] = fit_visibility(c, hi, lo);
    }
  }
  const double mean = pairwise_sum(loo) / dn;
  std::vector<double> dev(loo.size());
  for (std::size_t i = 0; i < loo.size(); ++i) dev[i] = (loo[i] - mean) * (loo[i] - mean);
  v.std_error = std::sqrt((dn - 1.0) / dn * pairwise_sum(dev));
  return v;
}

}  // namespace cohsim
