#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cohsim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. `path` names the offending field
/// (e.g. "sources.arm1.params.tau_p") when the error came from a config.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
  ConfigError(std::string path, const std::string& msg)
      : Error(path.empty() ? msg : path + ": " + msg), path_(std::move(path)), detail_(msg) {}
  const std::string& path() const noexcept { return path_; }
  /// Same error reported under a parent path, e.g. "sources.arm1" + "params.tau_p".
  ConfigError under(const std::string& prefix) const {
    return {path_.empty() ? prefix : prefix + "." + path_, detail_.empty() ? what() : detail_};
  }

 private:
  std::string path_;
  std::string detail_;
};

/// A window, delay or passband fell outside what a grid can represent.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable numerical result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo statistic returned a non-finite value.
class EnsembleError : public NumericalError {
 public:
  EnsembleError(std::size_t index, const std::string& msg)
      : NumericalError("realization " + std::to_string(index) + ": " + msg), index_(index) {}
  std::size_t realization_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class UndefinedBandwidthError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NarrowbandInvalidError : public Error {
 public:
  using Error::Error;
};

class InsufficientScanError : public Error {
 public:
  using Error::Error;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCoherenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cohsim
