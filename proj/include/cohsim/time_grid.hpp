#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "cohsim/errors.hpp"

namespace cohsim {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Uniform sampling of time: sample k sits at t_start + k*dt.
struct TimeGrid {
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t n = 2;

  /// Throws ConfigError unless dt > 0, n >= 2 and both values are finite.
  void validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(dt)) throw ConfigError("grid: non-finite t_start or dt");
    if (!(dt > 0.0)) throw ConfigError("grid: dt must be > 0");
    if (n < 2) throw ConfigError("grid: n must be >= 2");
  }

  double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  double t_end() const { return time(n - 1); }
  /// Span covered by the samples, (n-1)*dt.
  double span() const { return static_cast<double>(n - 1) * dt; }
  /// Record duration n*dt, the period of the discrete spectrum.
  double duration() const { return static_cast<double>(n) * dt; }

  /// The same grid moved by `offset` in time.
  TimeGrid shifted(double offset) const { return {t_start + offset, dt, n}; }

  bool contains(double a, double b) const {
    const double tol = 1e-9 * dt;
    return a >= t_start - tol && b <= t_end() + tol && a <= b;
  }

  RealVector times() const {
    RealVector t(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) t[static_cast<Eigen::Index>(k)] = time(k);
    return t;
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.n == b.n && a.t_start == b.t_start && a.dt == b.dt;
  }
};

}  // namespace cohsim
