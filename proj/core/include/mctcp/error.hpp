#pragma once

#include <stdexcept>
#include <string>

namespace mctcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (negative radius, t <= 0, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Node placement that the channel model cannot describe (overlapping nodes).
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// The analytic assimilation law left its regime of validity (P_A > 1).
class ModelOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A search over a bounded domain found no admissible value.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo calibration collected too few absorptions.
class CalibrationFailed : public Error {
 public:
  CalibrationFailed(const std::string& what, long long achieved)
      : Error(what), achieved_(achieved) {}
  long long achieved() const noexcept { return achieved_; }

 private:
  long long achieved_;
};

/// No channel statistics are available for a requested (species, distance).
class MissingCalibration : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mctcp
