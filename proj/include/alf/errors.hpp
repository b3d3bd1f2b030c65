#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain where an object is defined (r <= 1, inside a horizon, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value or failed linear solve.
class NumericError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested Fourier mode.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Radial grid too coarse for the finite-difference operator.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Source does not decay fast enough for a tail integral to converge.
class DecayError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class IllPosedWindowError : public Error {
 public:
  using Error::Error;
};

/// Extrapolation failed; carries the per-radius table for diagnostics.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> radii,
                      std::vector<double> values)
      : Error(what), radii_(std::move(radii)), values_(std::move(values)) {}

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

/// Invalid run configuration; `key()` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace alf
