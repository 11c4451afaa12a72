#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "cohsim/errors.hpp"
#include "cohsim/field.hpp"
#include "cohsim/parallel.hpp"
#include "cohsim/quadrature.hpp"

namespace cohsim {

/// Monte Carlo stand-in for the expectation over field realizations.
struct EnsembleSpec {
  std::size_t n_realizations = 1;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (n_realizations < 1) throw ConfigError("n_realizations", "must be >= 1");
  }
  SeedSpec seed(std::size_t index) const { return {master_seed, index}; }
};

/// Sample mean and its standard error (unbiased variance; NaN when n == 1).
template <typename Scalar>
struct EnsembleEstimate {
  Scalar mean{};
  double std_error = 0.0;
  std::size_t n = 0;
};

namespace detail {
template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Scalar>
bool finite(const Scalar& x) {
  if constexpr (is_complex<Scalar>::value) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  } else {
    return std::isfinite(x);
  }
}
}  // namespace detail

/// Mean and standard error of values already laid out by realization index.
template <typename Scalar>
EnsembleEstimate<Scalar> summarize(const std::vector<Scalar>& values) {
  EnsembleEstimate<Scalar> out;
  out.n = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() < 2) {
    out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::norm(values[i] - out.mean);
  out.std_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return out;
}

/// (1/T) times the trapezoid integral of the samples over [t_start, t_start + T].
template <typename Derived>
typename Derived::Scalar time_average(const Eigen::DenseBase<Derived>& samples, const TimeGrid& grid, double t_start,
                                      double T) {
  if (!(T > 0.0)) throw RangeError("averaging window T must be > 0");
  return integrate_window(samples, grid, t_start, t_start + T) / T;
}

/// Evaluates statistic(i) for every realization index, possibly on several
/// workers, and reduces in index order. The result is bit-identical for any
/// worker count. Non-finite values raise EnsembleError naming the lowest
/// offending index.
template <typename Statistic>
auto ensemble_average(Statistic&& statistic, const EnsembleSpec& spec, unsigned workers = 1) {
  using Scalar = std::decay_t<decltype(statistic(std::size_t{0}))>;
  spec.validate();
  std::vector<Scalar> values(spec.n_realizations);
  parallel_for(spec.n_realizations, workers, [&](std::size_t i) { values[i] = statistic(i); });
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!detail::finite(values[i])) throw EnsembleError(i, "statistic is not finite");
  }
  return summarize(values);
}

/// Ensemble average of a statistic of one field realization of `model`.
template <typename Statistic>
auto ensemble_average(const SourceModel& model, const TimeGrid& grid, double carrier_omega0,
                      Statistic&& statistic, const EnsembleSpec& spec, unsigned workers = 1) {
  model.validate();
  return ensemble_average(
      [&](std::size_t i) { return statistic(sample_realization(model, grid, carrier_omega0, "P", spec.seed(i))); },
      spec, workers);
}

}  // namespace cohsim
