#pragma once

#include <optional>
#include <vector>

#include "cohsim/detector.hpp"
#include "cohsim/field.hpp"
#include "cohsim/spectral.hpp"

namespace cohsim {

/// Path delay tau, applied as u(P1, t - tau/2) + u(P2, t + tau/2).
struct DelaySpec {
  double tau = 0.0;
};

/// Summed analytic signal u1(t - tau/2) + u2(t + tau/2) on the part of the
/// grid where both shifted arms are defined. Envelopes are shifted by cubic
/// interpolation; carrier phases exp(+-i omega0 tau/2) are exact.
FieldRealization superpose(const FieldRealization& r1, const FieldRealization& r2, const DelaySpec& delay);

/// (1/T) integral over the detector window of |u1(t - tau/2) + u2(t + tau/2)|^2.
/// Detector efficiency is not applied.
double magyar_mandel_signal(const FieldRealization& r1, const FieldRealization& r2, const DelaySpec& delay,
                            const DetectorConfig& d);

/// Two sources feeding a two-pinhole interferometer, optionally filtered at
/// each pinhole before the fields meet.
struct Interferometer {
  SourceModel arm1;
  SourceModel arm2;
  TimeGrid grid;
  double carrier_omega0 = 100.0;
  ArmCorrelation correlation = ArmCorrelation::Independent;
  std::optional<FilterSpec> filter1;
  std::optional<FilterSpec> filter2;

  void validate() const;
  /// Angular frequency of the fringes in tau: the mean optical frequency of the arms.
  double fringe_omega() const;
};

enum class ScanMode { SingleShot, Ensemble };
enum class VisibilityMethod { Extrema, SinusoidFit };

struct ScanMetadata {
  Interferometer setup;
  DetectorConfig detector;
  SeedSpec seed;                  ///< single-shot draw, or ensemble master seed at index 0
  std::size_t n_realizations = 1;
};

/// Detected time-averaged intensity alpha * S/T versus delay.
struct FringeScan {
  RealVector taus;
  RealVector intensities;
  RealVector std_errors;  ///< ensemble mode only; empty otherwise
  ScanMode mode = ScanMode::SingleShot;
  double fringe_omega = 0.0;
  Eigen::MatrixXd members;  ///< ensemble mode: one row of intensities per realization
  ScanMetadata metadata;
};

/// Delays covering `periods` fringe periods centred on 0 (both ends included).
RealVector default_taus(double fringe_omega, int periods = 4, int points_per_period = 128);

/// One realization per arm held fixed across every delay: one detection.
FringeScan fringe_scan_single_shot(const Interferometer& setup, const RealVector& taus, const DetectorConfig& d,
                                   const SeedSpec& seed);

/// Fresh realizations for every ensemble member; the detected intensities are
/// averaged member by member in index order.
FringeScan fringe_scan_ensemble(const Interferometer& setup, const RealVector& taus, const DetectorConfig& d,
                                const EnsembleSpec& spec, unsigned workers = 1);

struct VisibilityResult {
  double value = 0.0;      ///< clamped to [0, 1]
  double raw_value = 0.0;  ///< (i_max - i_min) / (i_max + i_min)
  VisibilityMethod method = VisibilityMethod::Extrema;
  double i_max = 0.0;
  double i_min = 0.0;
  std::optional<double> fit_residual;  ///< RMS residual, sinusoid_fit only
  std::optional<double> std_error;     ///< jackknife, ensemble scans only
};

VisibilityResult extract_visibility(const FringeScan& scan, VisibilityMethod method);

/// As above on bare arrays.
VisibilityResult extract_visibility(const RealVector& taus, const RealVector& intensities, double fringe_omega,
                                    VisibilityMethod method);

/// extract_visibility() plus a leave-one-out jackknife error over the
/// ensemble members. Requires an ensemble scan with >= 2 members.
VisibilityResult jackknife_visibility(const FringeScan& scan, VisibilityMethod method);

}  // namespace cohsim
