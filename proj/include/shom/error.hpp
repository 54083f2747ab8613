#pragma once

#include <stdexcept>
#include <string>

namespace shom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the validity window of an empirical model.
class OutOfModelRange : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Wavelength grid does not cover the requested spectral support.
class GridTooNarrow : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Cosine-form coincidence probability requires a real, phase-free amplitude.
class NonRealAmplitude : public Error {
 public:
  using Error::Error;
};

class InconsistentMarginals : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

class DegenerateMap : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable data file (frame lists, matrices).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Config parse failure; carries the 1-based line number when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace shom
