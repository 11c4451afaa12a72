#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "cohsim/errors.hpp"
#include "cohsim/time_grid.hpp"

namespace cohsim {

/// Sample indices touched by a window [a, b] on a grid: [first, last] covers
/// the interior samples plus the neighbours needed to interpolate the ends.
struct WindowSpan {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t interior = 0;  ///< number of grid samples inside [a, b]
};

namespace detail {
inline constexpr double kSnap = 1e-9;

inline double grid_coordinate(const TimeGrid& g, double t) {
  const double u = (t - g.t_start) / g.dt;
  const double r = std::round(u);
  return std::abs(u - r) < kSnap ? r : u;
}
}  // namespace detail

/// Throws RangeError when the window leaves the grid or holds fewer than two
/// samples.
inline WindowSpan window_span(const TimeGrid& g, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    throw RangeError("window [" + std::to_string(a) + ", " + std::to_string(b) + "] is empty or non-finite");
  }
  if (!g.contains(a, b)) {
    throw RangeError("window [" + std::to_string(a) + ", " + std::to_string(b) + "] outside grid [" +
                     std::to_string(g.t_start) + ", " + std::to_string(g.t_end()) + "]");
  }
  const double ua = std::max(0.0, detail::grid_coordinate(g, a));
  const double ub = std::min(static_cast<double>(g.n - 1), detail::grid_coordinate(g, b));
  const auto k0 = static_cast<std::size_t>(std::ceil(ua));
  const auto k1 = static_cast<std::size_t>(std::floor(ub));
  if (k1 < k0 + 1) throw RangeError("window holds fewer than 2 grid samples");
  WindowSpan s;
  s.first = static_cast<double>(k0) > ua ? k0 - 1 : k0;
  s.last = static_cast<double>(k1) < ub ? k1 + 1 : k1;
  s.interior = k1 - k0 + 1;
  return s;
}

/// Composite trapezoid of grid samples over [a, b]. End intervals that do not
/// land on grid points use linear interpolation, so the rule stays exact for
/// linear integrands. Works for real and complex expressions.
template <typename Derived>
typename Derived::Scalar integrate_window(const Eigen::DenseBase<Derived>& samples, const TimeGrid& g, double a,
                                          double b) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(samples.size()) != g.n) throw ConfigError("sample count does not match grid");
  window_span(g, a, b);
  const double ua = std::max(0.0, detail::grid_coordinate(g, a));
  const double ub = std::min(static_cast<double>(g.n - 1), detail::grid_coordinate(g, b));
  const auto k0 = static_cast<Eigen::Index>(std::ceil(ua));
  const auto k1 = static_cast<Eigen::Index>(std::floor(ub));
  const auto& f = samples.derived();

  Scalar inner = Scalar(0);
  for (Eigen::Index k = k0 + 1; k < k1; ++k) inner += f(k);
  Scalar total = g.dt * (inner + Scalar(0.5) * (f(k0) + f(k1)));

  if (static_cast<double>(k0) > ua) {
    const double frac = static_cast<double>(k0) - ua;
    const Scalar fa = f(k0) + (f(k0 - 1) - f(k0)) * frac;
    total += Scalar(0.5 * frac * g.dt) * (fa + f(k0));
  }
  if (static_cast<double>(k1) < ub) {
    const double frac = ub - static_cast<double>(k1);
    const Scalar fb = f(k1) + (f(k1 + 1) - f(k1)) * frac;
    total += Scalar(0.5 * frac * g.dt) * (fb + f(k1));
  }
  return total;
}

/// Composite trapezoid over all samples of a uniform grid with spacing h.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::DenseBase<Derived>& samples, double h) {
  using Scalar = typename Derived::Scalar;
  const auto& f = samples.derived();
  const Eigen::Index n = f.size();
  if (n < 2) return Scalar(0);
  return h * (f.segment(1, n - 2).sum() + Scalar(0.5) * (f(0) + f(n - 1)));
}

}  // namespace cohsim
